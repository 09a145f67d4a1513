#pragma once

#include <cstdint>

#include "tnqe/tensor.hpp"

namespace tnqe::cli {

// Centred, rotated elliptical Gaussian with peak 1. The rotation keeps it
// from being separable in x and y.
Image gaussian_blob(std::size_t size);

// A few overlapping blobs and a ring; deterministic for a given size.
Image synthetic_scene(std::size_t size);

// Uniform [0, 1) pixels.
Image random_image(std::size_t size, std::uint64_t seed);

} // namespace tnqe::cli
