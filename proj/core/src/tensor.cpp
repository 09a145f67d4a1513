#include "tnqe/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tnqe/error.hpp"

namespace tnqe {

namespace {

using RowMajorR = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMajorC = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::size_t pow4(int k) { return std::size_t{1} << (2 * k); }

} // namespace

Image::Image(std::size_t size, std::vector<double> pixels) : size_(size), pixels_(std::move(pixels)) {
    if (!is_power_of_two(size))
        throw InvalidInput("image side " + std::to_string(size) + " is not a power of two");
    if (pixels_.size() != size * size)
        throw InvalidInput("image expects " + std::to_string(size * size) + " pixels, got " +
                           std::to_string(pixels_.size()));
    for (double v : pixels_)
        if (!std::isfinite(v)) throw InvalidInput("image contains a non-finite pixel");
    levels_ = log2_exact(size);
}

Image Image::zeros(std::size_t size) { return Image(size, std::vector<double>(size * size, 0.0)); }

std::size_t quantized_index(std::size_t x, std::size_t y, int levels) noexcept {
    std::size_t idx = 0;
    for (int bit = levels - 1; bit >= 0; --bit) idx = idx * 4 + 2 * ((x >> bit) & 1U) + ((y >> bit) & 1U);
    return idx;
}

std::pair<std::size_t, std::size_t> pixel_of(std::size_t index, int levels) noexcept {
    std::size_t x = 0, y = 0;
    for (int k = 0; k < levels; ++k) {
        const std::size_t p = (index >> (2 * (levels - 1 - k))) & 3U;
        x = (x << 1) | (p >> 1);
        y = (y << 1) | (p & 1U);
    }
    return {x, y};
}

QuantizedTensor quantize_image(const Image& img) {
    if (!is_power_of_two(img.size()))
        throw InvalidInput("image side " + std::to_string(img.size()) + " is not a power of two");
    QuantizedTensor t{img.levels(), std::vector<double>(img.pixel_count())};
    for (std::size_t x = 0; x < img.size(); ++x)
        for (std::size_t y = 0; y < img.size(); ++y) t.values[quantized_index(x, y, img.levels())] = img.at(x, y);
    return t;
}

Image dequantize(const QuantizedTensor& t) {
    if (t.levels < 0 || t.values.size() != pow4(t.levels))
        throw StructuralError("quantized tensor of order " + std::to_string(t.levels) + " needs " +
                              std::to_string(pow4(std::max(t.levels, 0))) + " entries");
    const std::size_t s = std::size_t{1} << t.levels;
    std::vector<double> pixels(s * s);
    for (std::size_t idx = 0; idx < t.values.size(); ++idx) {
        const auto [x, y] = pixel_of(idx, t.levels);
        pixels[x * s + y] = t.values[idx];
    }
    return Image(s, std::move(pixels));
}

QttCore::QttCore(std::size_t l, std::size_t r) : left(l), right(r), data(l * 4 * r, cplx{0.0, 0.0}) {}
MpsCore::MpsCore(std::size_t l, std::size_t r) : left(l), right(r), data(l * 4 * r, cplx{0.0, 0.0}) {}

std::size_t QttCores::max_rank() const noexcept {
    std::size_t r = 1;
    for (const auto& c : cores) r = std::max({r, c.left, c.right});
    return r;
}

std::vector<std::size_t> QttCores::bond_dims() const {
    std::vector<std::size_t> dims;
    if (cores.empty()) return dims;
    dims.push_back(cores.front().left);
    for (const auto& c : cores) dims.push_back(c.right);
    return dims;
}

void QttCores::validate() const {
    if (cores.empty()) throw StructuralError("QTT has no cores");
    if (cores.front().left != 1 || cores.back().right != 1)
        throw StructuralError("QTT boundary bond dimensions must be 1");
    for (std::size_t k = 0; k < cores.size(); ++k) {
        const auto& c = cores[k];
        if (c.data.size() != c.left * 4 * c.right)
            throw StructuralError("core " + std::to_string(k + 1) + " has inconsistent storage");
        if (k + 1 < cores.size() && c.right != cores[k + 1].left)
            throw StructuralError("bond mismatch between cores " + std::to_string(k + 1) + " and " +
                                  std::to_string(k + 2));
    }
    if (!(scale >= 0.0) || !std::isfinite(scale)) throw StructuralError("QTT scale must be finite and >= 0");
}

TtSvdResult tt_svd(const QuantizedTensor& t, std::size_t max_rank, double rel_tol) {
    if (max_rank == 0) throw InvalidInput("max_rank must be at least 1");
    if (rel_tol < 0.0) throw InvalidInput("rel_tol must be >= 0");
    if (t.levels < 1 || t.values.size() != pow4(t.levels))
        throw StructuralError("quantized tensor is malformed");

    TtSvdResult out;
    const int levels = t.levels;

    const bool all_zero = std::all_of(t.values.begin(), t.values.end(), [](double v) { return v == 0.0; });
    if (all_zero) {
        for (int k = 0; k < levels; ++k) {
            QttCore c(1, 1);
            c.at(0, 0, 0, 0) = 1.0;
            out.cores.cores.push_back(std::move(c));
        }
        out.cores.scale = 0.0;
        out.truncation_errors.assign(static_cast<std::size_t>(levels - 1), 0.0);
        return out;
    }

    std::vector<double> rest = t.values;
    std::size_t r_prev = 1;
    for (int k = 0; k + 1 < levels; ++k) {
        const std::size_t rows = r_prev * 4;
        const std::size_t cols = rest.size() / rows;
        const RMatrix unfolding = Eigen::Map<const RowMajorR>(rest.data(), static_cast<Eigen::Index>(rows),
                                                              static_cast<Eigen::Index>(cols));
        const RealSvd dec = svd(unfolding);
        const Eigen::Index available = dec.s.size();
        const double cutoff = rel_tol * dec.s(0);
        std::size_t keep = 0;
        while (keep < max_rank && static_cast<Eigen::Index>(keep) < available &&
               dec.s(static_cast<Eigen::Index>(keep)) > 0.0 && !(dec.s(static_cast<Eigen::Index>(keep)) < cutoff))
            ++keep;
        keep = std::max<std::size_t>(keep, 1);

        double discarded = 0.0;
        for (Eigen::Index i = static_cast<Eigen::Index>(keep); i < available; ++i) discarded += dec.s(i) * dec.s(i);
        out.truncation_errors.push_back(std::sqrt(discarded));

        QttCore core(r_prev, keep);
        for (std::size_t row = 0; row < rows; ++row)
            for (std::size_t b = 0; b < keep; ++b)
                core.data[row * keep + b] = dec.u(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(b));
        out.cores.cores.push_back(std::move(core));

        const auto kept = static_cast<Eigen::Index>(keep);
        const RowMajorR next = dec.s.head(kept).asDiagonal() * dec.v.leftCols(kept).transpose();
        rest.assign(next.data(), next.data() + next.size());
        r_prev = keep;
    }

    QttCore last(r_prev, 1);
    double norm = 0.0;
    for (double v : rest) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t i = 0; i < rest.size(); ++i) last.data[i] = rest[i] / norm;
    out.cores.cores.push_back(std::move(last));
    out.cores.scale = norm;
    return out;
}

std::vector<cplx> contract_values(const QttCores& cores) {
    cores.validate();
    const auto& first = cores.cores.front();
    RowMajorC env = Eigen::Map<const RowMajorC>(first.data.data(), 4, static_cast<Eigen::Index>(first.right));
    for (std::size_t k = 1; k < cores.cores.size(); ++k) {
        const auto& c = cores.cores[k];
        const Eigen::Map<const RowMajorC> mat(c.data.data(), static_cast<Eigen::Index>(c.left),
                                              static_cast<Eigen::Index>(4 * c.right));
        RowMajorC next = env * mat;
        // (prefix x 4*right) row-major is (prefix*4 x right) row-major.
        env = Eigen::Map<RowMajorC>(next.data(), next.rows() * 4, static_cast<Eigen::Index>(c.right));
    }
    std::vector<cplx> values(env.data(), env.data() + env.size());
    for (cplx& v : values) v *= cores.scale;
    return values;
}

Image contract(const QttCores& cores) {
    const auto values = contract_values(cores);
    QuantizedTensor t{cores.levels(), std::vector<double>(values.size())};
    std::transform(values.begin(), values.end(), t.values.begin(), [](const cplx& v) { return v.real(); });
    return dequantize(t);
}

MpsCore merge_physical(const QttCore& core) {
    // (a, i, j, b) row-major is (a, 2i + j, b) row-major.
    MpsCore out(core.left, core.right);
    out.data = core.data;
    return out;
}

QttCore split_physical(const MpsCore& core) {
    QttCore out(core.left, core.right);
    out.data = core.data;
    return out;
}

} // namespace tnqe
