#include "revadv/metrics.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "revadv/errors.hpp"

namespace revadv {

double psnr(const ImageU8& a, const ImageU8& b) {
    if (!a.same_shape(b)) throw ShapeError("psnr: image shapes differ");
    if (a.numel() == 0) throw ShapeError("psnr: empty image");
    double se = 0.0;
    for (std::size_t i = 0; i < a.data.size(); ++i) {
        const double d = static_cast<double>(a.data[i]) - static_cast<double>(b.data[i]);
        se += d * d;
    }
    if (se == 0.0) return std::numeric_limits<double>::infinity();
    const double mse = se / static_cast<double>(a.numel());
    return 10.0 * std::log10(255.0 * 255.0 / mse);
}

namespace {

constexpr int kWin = 11;

std::array<double, kWin * kWin> ssim_window() {
    std::array<double, kWin * kWin> w{};
    const double sigma = 1.5;
    double sum = 0.0;
    for (int i = 0; i < kWin; ++i) {
        for (int j = 0; j < kWin; ++j) {
            const double di = i - kWin / 2, dj = j - kWin / 2;
            w[static_cast<std::size_t>(i * kWin + j)] =
                std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
            sum += w[static_cast<std::size_t>(i * kWin + j)];
        }
    }
    for (auto& v : w) v /= sum;
    return w;
}

}  // namespace

double ssim(const ImageU8& a, const ImageU8& b) {
    if (!a.same_shape(b)) throw ShapeError("ssim: image shapes differ");
    if (a.h < kWin || a.w < kWin)
        throw ShapeError("ssim: image smaller than the 11x11 window");
    static const auto window = ssim_window();
    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);

    double channel_sum = 0.0;
    for (int ch = 0; ch < a.c; ++ch) {
        double acc = 0.0;
        long count = 0;
        for (int i = 0; i + kWin <= a.h; ++i) {
            for (int j = 0; j + kWin <= a.w; ++j) {
                double mu_a = 0.0, mu_b = 0.0;
                for (int u = 0; u < kWin; ++u) {
                    for (int v = 0; v < kWin; ++v) {
                        const double wq = window[static_cast<std::size_t>(u * kWin + v)];
                        mu_a += wq * a.at(i + u, j + v, ch);
                        mu_b += wq * b.at(i + u, j + v, ch);
                    }
                }
                double var_a = 0.0, var_b = 0.0, cov = 0.0;
                for (int u = 0; u < kWin; ++u) {
                    for (int v = 0; v < kWin; ++v) {
                        const double wq = window[static_cast<std::size_t>(u * kWin + v)];
                        const double da = a.at(i + u, j + v, ch) - mu_a;
                        const double db = b.at(i + u, j + v, ch) - mu_b;
                        var_a += wq * da * da;
                        var_b += wq * db * db;
                        cov += wq * da * db;
                    }
                }
                const double num = (2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2);
                const double den = (mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2);
                acc += num / den;
                ++count;
            }
        }
        channel_sum += acc / static_cast<double>(count);
    }
    return channel_sum / a.c;
}

double attack_success_rate(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.empty() || predictions.size() != labels.size())
        throw ShapeError("attack_success_rate: empty or mismatched prediction/label sets");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i] != labels[i]) ++hits;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(predictions.size());
}

double recovery_success_rate(const std::vector<int>& predictions, const std::vector<int>& labels) {
    if (predictions.empty() || predictions.size() != labels.size())
        throw ShapeError("recovery_success_rate: empty or mismatched prediction/label sets");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
        if (predictions[i] == labels[i]) ++hits;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(predictions.size());
}

}  // namespace revadv
