#pragma once

#include <filesystem>

#include "tnqe/tensor.hpp"

namespace tnqe::cli {

struct RawImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> pixels; // row-major, normalised by maxval
};

// P2 or P5, maxval up to 65535. Throws IoError with the path.
RawImage read_pgm(const std::filesystem::path& path);

// Square power-of-two image. With pad, zero-pads (centred) to the next
// power-of-two square; otherwise non-conforming sizes are rejected.
Image to_image(const RawImage& raw, bool pad);
Image load_image(const std::filesystem::path& path, bool pad = false);

// 8-bit P5; values are clamped to [0, 1] and rounded.
void write_pgm(const std::filesystem::path& path, const Image& img);

} // namespace tnqe::cli
