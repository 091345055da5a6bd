#pragma once

#include <vector>

#include "revadv/image.hpp"

namespace revadv {

/// 10 log10(255^2 / MSE) in dB; +infinity for identical images.
double psnr(const ImageU8& a, const ImageU8& b);

/// Windowed SSIM: 11x11 Gaussian window sigma 1.5, C1=(0.01*255)^2,
/// C2=(0.03*255)^2, mean over valid window positions, averaged over
/// channels. Images must be at least 11x11.
double ssim(const ImageU8& a, const ImageU8& b);

/// Fraction (percent) of images whose argmax differs from the label.
/// `predictions` holds the predicted class per image.
double attack_success_rate(const std::vector<int>& predictions, const std::vector<int>& labels);

/// Fraction (percent) of images whose argmax equals the label.
double recovery_success_rate(const std::vector<int>& predictions, const std::vector<int>& labels);

}  // namespace revadv
