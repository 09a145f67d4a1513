#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "tnqe/linalg.hpp"

namespace tnqe {

// Square grayscale image with a power-of-two side length. Pixel (x, y) lives
// at pixels()[x * size() + y]; x is the row.
class Image {
public:
    Image() = default;
    Image(std::size_t size, std::vector<double> pixels);

    static Image zeros(std::size_t size);

    std::size_t size() const noexcept { return size_; }
    int levels() const noexcept { return levels_; }
    std::size_t pixel_count() const noexcept { return pixels_.size(); }

    double at(std::size_t x, std::size_t y) const { return pixels_[x * size_ + y]; }
    double& at(std::size_t x, std::size_t y) { return pixels_[x * size_ + y]; }

    std::span<const double> pixels() const noexcept { return pixels_; }
    std::span<double> pixels() noexcept { return pixels_; }

    bool operator==(const Image&) const = default;

private:
    std::size_t size_ = 0;
    int levels_ = 0;
    std::vector<double> pixels_;
};

// Order-L tensor with every mode of dimension 4. Mode k (k = 1 first) holds
// p_k = 2 x_k + y_k, where x_k / y_k are the k-th most significant bits of
// the pixel coordinates. values is flattened with p_1 most significant.
struct QuantizedTensor {
    int levels = 0;
    std::vector<double> values;

    bool operator==(const QuantizedTensor&) const = default;
};

// Flat quantized index of pixel (x, y) and its inverse.
std::size_t quantized_index(std::size_t x, std::size_t y, int levels) noexcept;
std::pair<std::size_t, std::size_t> pixel_of(std::size_t index, int levels) noexcept;

QuantizedTensor quantize_image(const Image& img);
Image dequantize(const QuantizedTensor& t);

// QTT core of shape (left, 2, 2, right), row-major over (a, i, j, b).
struct QttCore {
    std::size_t left = 1;
    std::size_t right = 1;
    std::vector<cplx> data;

    QttCore() = default;
    QttCore(std::size_t left, std::size_t right);

    cplx& at(std::size_t a, int i, int j, std::size_t b) { return data[((a * 2 + i) * 2 + j) * right + b]; }
    const cplx& at(std::size_t a, int i, int j, std::size_t b) const {
        return data[((a * 2 + i) * 2 + j) * right + b];
    }
};

// MPS core of shape (left, 4, right), row-major over (a, p, b).
struct MpsCore {
    std::size_t left = 1;
    std::size_t right = 1;
    std::vector<cplx> data;

    MpsCore() = default;
    MpsCore(std::size_t left, std::size_t right);

    cplx& at(std::size_t a, int p, std::size_t b) { return data[(a * 4 + p) * right + b]; }
    const cplx& at(std::size_t a, int p, std::size_t b) const { return data[(a * 4 + p) * right + b]; }
};

struct QttCores {
    std::vector<QttCore> cores;
    double scale = 1.0;

    int levels() const noexcept { return static_cast<int>(cores.size()); }
    std::size_t max_rank() const noexcept;
    std::vector<std::size_t> bond_dims() const;
    // Throws StructuralError on mismatched neighbours or open boundaries.
    void validate() const;
};

struct TtSvdResult {
    QttCores cores;
    // l2 norm of the discarded singular values at each of the L-1 splits.
    std::vector<double> truncation_errors;
};

// Left-to-right sequential SVD. At each split at most max_rank singular
// values are kept, and values below rel_tol * (largest at that split) are
// dropped (at least one is always kept). The returned cores contract to a
// unit-norm tensor; the norm sits in QttCores::scale.
TtSvdResult tt_svd(const QuantizedTensor& t, std::size_t max_rank, double rel_tol = 0.0);

// Full contraction in quantized order, including the scale.
std::vector<cplx> contract_values(const QttCores& cores);

// Real part of contract_values, dequantized.
Image contract(const QttCores& cores);

MpsCore merge_physical(const QttCore& core);
QttCore split_physical(const MpsCore& core);

} // namespace tnqe
