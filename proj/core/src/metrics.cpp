#include "tnqe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tnqe/error.hpp"

namespace tnqe {

namespace {

void check_sizes(const Image& a, const Image& b) {
    if (a.size() != b.size())
        throw InvalidInput("image sizes differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
}

Image clamp_unit(const Image& img, bool& clamped) {
    Image out = img;
    for (double& v : out.pixels()) {
        const double c = std::clamp(v, 0.0, 1.0);
        if (c != v) clamped = true;
        v = c;
    }
    return out;
}

} // namespace

double mse(const Image& ref, const Image& test) {
    check_sizes(ref, test);
    const auto a = ref.pixels(), b = test.pixels();
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - b[i]) * (a[i] - b[i]);
    return acc / static_cast<double>(a.size());
}

double bce(const Image& ref, const Image& test) {
    check_sizes(ref, test);
    const auto y = ref.pixels(), p = test.pixels();
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double q = std::clamp(p[i], kBceClamp, 1.0 - kBceClamp);
        acc += y[i] * std::log(q) + (1.0 - y[i]) * std::log(1.0 - q);
    }
    return -acc / static_cast<double>(y.size());
}

double psnr(const Image& ref, const Image& test) {
    const double m = mse(ref, test);
    if (m == 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / m));
}

double ssim(const Image& ref, const Image& test) {
    check_sizes(ref, test);
    const std::size_t n = ref.size();
    const std::size_t w = std::min<std::size_t>(kSsimWindow, n);
    const double count = static_cast<double>(w * w);
    double total = 0.0;
    std::size_t windows = 0;
    for (std::size_t x0 = 0; x0 + w <= n; ++x0)
        for (std::size_t y0 = 0; y0 + w <= n; ++y0) {
            double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
            for (std::size_t x = x0; x < x0 + w; ++x)
                for (std::size_t y = y0; y < y0 + w; ++y) {
                    const double a = ref.at(x, y), b = test.at(x, y);
                    sa += a;
                    sb += b;
                    saa += a * a;
                    sbb += b * b;
                    sab += a * b;
                }
            const double ma = sa / count, mb = sb / count;
            const double va = saa / count - ma * ma, vb = sbb / count - mb * mb;
            const double cov = sab / count - ma * mb;
            total += ((2 * ma * mb + kSsimC1) * (2 * cov + kSsimC2)) /
                     ((ma * ma + mb * mb + kSsimC1) * (va + vb + kSsimC2));
            ++windows;
        }
    return total / static_cast<double>(windows);
}

QualityReport evaluate(const Image& ref, const Image& test) {
    check_sizes(ref, test);
    QualityReport r;
    const Image a = clamp_unit(ref, r.clamped);
    const Image b = clamp_unit(test, r.clamped);
    r.mse = mse(a, b);
    r.bce = bce(a, b);
    r.psnr = psnr(a, b);
    r.ssim = ssim(a, b);
    return r;
}

} // namespace tnqe
