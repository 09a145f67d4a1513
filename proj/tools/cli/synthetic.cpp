#include "cli/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tnqe::cli {

namespace {

double blob(double x, double y, double cx, double cy, double sa, double sb, double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    const double u = c * (x - cx) + s * (y - cy);
    const double v = -s * (x - cx) + c * (y - cy);
    return std::exp(-0.5 * (u * u / (sa * sa) + v * v / (sb * sb)));
}

} // namespace

Image gaussian_blob(std::size_t size) {
    Image img = Image::zeros(size);
    const double n = static_cast<double>(size);
    const double mid = (n - 1.0) / 2.0;
    for (std::size_t x = 0; x < size; ++x)
        for (std::size_t y = 0; y < size; ++y)
            img.at(x, y) = blob(static_cast<double>(x), static_cast<double>(y), mid, mid, 0.22 * n, 0.11 * n, 0.6);
    return img;
}

Image synthetic_scene(std::size_t size) {
    Image img = Image::zeros(size);
    const double n = static_cast<double>(size);
    for (std::size_t x = 0; x < size; ++x)
        for (std::size_t y = 0; y < size; ++y) {
            const double px = static_cast<double>(x) / n, py = static_cast<double>(y) / n;
            double v = 0.8 * blob(px, py, 0.3, 0.35, 0.12, 0.05, 0.4);
            v += 0.6 * blob(px, py, 0.7, 0.6, 0.08, 0.15, -0.7);
            v += 0.5 * blob(px, py, 0.25, 0.75, 0.05, 0.05, 0.0);
            const double r = std::hypot(px - 0.55, py - 0.5);
            v += 0.4 * std::exp(-std::pow((r - 0.3) / 0.03, 2));
            img.at(x, y) = std::min(v, 1.0);
        }
    return img;
}

Image random_image(std::size_t size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Image img = Image::zeros(size);
    for (double& v : img.pixels()) v = u(rng);
    return img;
}

} // namespace tnqe::cli
