#pragma once

#include "tnqe/tensor.hpp"

namespace tnqe {

inline constexpr double kPsnrCap = 99.0;
inline constexpr double kBceClamp = 1e-7;
inline constexpr int kSsimWindow = 8;
inline constexpr double kSsimC1 = 0.01 * 0.01;
inline constexpr double kSsimC2 = 0.03 * 0.03;

struct QualityReport {
    double mse = 0.0;
    double bce = 0.0;
    double psnr = 0.0; // dB, peak 1.0; kPsnrCap when mse == 0
    double ssim = 0.0;
    bool clamped = false; // some input pixel was outside [0, 1]
};

double mse(const Image& ref, const Image& test);
// ref is the label y, test the prediction.
double bce(const Image& ref, const Image& test);
double psnr(const Image& ref, const Image& test);
// Uniform 8x8 window (the whole image when smaller), stride 1, population
// statistics, averaged over window positions.
double ssim(const Image& ref, const Image& test);

// Clamps both images to [0, 1] first. Throws InvalidInput on size mismatch.
QualityReport evaluate(const Image& ref, const Image& test);

} // namespace tnqe
