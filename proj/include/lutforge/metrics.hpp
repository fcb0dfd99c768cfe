#pragma once

#include "lutforge/image.hpp"

namespace lutforge {

struct MetricReport {
    double psnr = 0.0;     // dB; +inf for identical images
    double ssim = 0.0;     // [-1, 1]
    double delta_e = 0.0;  // mean CIE76 distance over pixels
};

// 10*log10(1/MSE) over all pixel-channel values in [0,1].
double psnr(const ImageBuffer& a, const ImageBuffer& b);

// Single-scale SSIM on Rec.601 luma: 11x11 Gaussian window (sigma 1.5),
// K1=0.01, K2=0.03, dynamic range 1, averaged over valid window positions.
double ssim(const ImageBuffer& a, const ImageBuffer& b);

// Mean CIE76 delta E: sRGB -> linear -> XYZ (D65) -> CIELAB.
double delta_e(const ImageBuffer& a, const ImageBuffer& b);

MetricReport evaluate(const ImageBuffer& a, const ImageBuffer& b);

// Colorimetry helpers (exposed for tests).
void srgb_to_lab(double r, double g, double b, double& L, double& A, double& B);

}  // namespace lutforge
