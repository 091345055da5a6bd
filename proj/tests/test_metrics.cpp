#include <doctest.h>

#include <cmath>

#include "revadv/errors.hpp"
#include "revadv/metrics.hpp"
#include "revadv/rng.hpp"

using namespace revadv;

namespace {

ImageU8 random_image(Rng& rng, int h, int w, int c) {
    ImageU8 img = ImageU8::make(h, w, c);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.uniform_int(0, 255));
    return img;
}

// Direct-formula SSIM oracle: independent scalar implementation.
double ssim_oracle(const ImageU8& a, const ImageU8& b) {
    const int win = 11;
    const double sigma = 1.5;
    std::vector<double> w(static_cast<std::size_t>(win * win));
    double wsum = 0.0;
    for (int i = 0; i < win; ++i)
        for (int j = 0; j < win; ++j) {
            const double di = i - 5, dj = j - 5;
            w[static_cast<std::size_t>(i * win + j)] = std::exp(-(di * di + dj * dj) / (2 * sigma * sigma));
            wsum += w[static_cast<std::size_t>(i * win + j)];
        }
    for (auto& v : w) v /= wsum;
    const double c1 = 6.5025, c2 = 58.5225;  // (0.01*255)^2, (0.03*255)^2
    double total = 0.0;
    for (int ch = 0; ch < a.c; ++ch) {
        double acc = 0.0;
        int cnt = 0;
        for (int i = 0; i + win <= a.h; ++i) {
            for (int j = 0; j + win <= a.w; ++j) {
                double ma = 0, mb = 0, va = 0, vb = 0, cov = 0;
                for (int u = 0; u < win; ++u)
                    for (int v = 0; v < win; ++v) {
                        const double wq = w[static_cast<std::size_t>(u * win + v)];
                        ma += wq * a.at(i + u, j + v, ch);
                        mb += wq * b.at(i + u, j + v, ch);
                    }
                for (int u = 0; u < win; ++u)
                    for (int v = 0; v < win; ++v) {
                        const double wq = w[static_cast<std::size_t>(u * win + v)];
                        va += wq * (a.at(i + u, j + v, ch) - ma) * (a.at(i + u, j + v, ch) - ma);
                        vb += wq * (b.at(i + u, j + v, ch) - mb) * (b.at(i + u, j + v, ch) - mb);
                        cov += wq * (a.at(i + u, j + v, ch) - ma) * (b.at(i + u, j + v, ch) - mb);
                    }
                acc += ((2 * ma * mb + c1) * (2 * cov + c2)) /
                       ((ma * ma + mb * mb + c1) * (va + vb + c2));
                ++cnt;
            }
        }
        total += acc / cnt;
    }
    return total / a.c;
}

}  // namespace

TEST_CASE("psnr sentinel and analytic values") {
    Rng rng(71);
    const ImageU8 a = random_image(rng, 16, 16, 3);
    CHECK(std::isinf(psnr(a, a)));

    ImageU8 off_by_one = a;
    for (auto& v : off_by_one.data) v = static_cast<std::uint8_t>(v < 255 ? v + 1 : v - 1);
    CHECK(psnr(a, off_by_one) == doctest::Approx(48.1308).epsilon(1e-4));

    ImageU8 black = ImageU8::make(16, 16, 3, 0), white = ImageU8::make(16, 16, 3, 255);
    CHECK(psnr(black, white) == doctest::Approx(0.0).epsilon(1e-9));

    CHECK_THROWS_AS(psnr(a, ImageU8::make(8, 8, 3)), ShapeError);
}

TEST_CASE("ssim basics") {
    Rng rng(73);
    const ImageU8 a = random_image(rng, 24, 20, 3);
    CHECK(ssim(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    ImageU8 negated = a;
    for (auto& v : negated.data) v = static_cast<std::uint8_t>(255 - v);
    CHECK(ssim(a, negated) < 1.0);

    CHECK_THROWS_AS(ssim(ImageU8::make(8, 8, 1), ImageU8::make(8, 8, 1)), ShapeError);
}

TEST_CASE("ssim matches the direct-formula oracle") {
    Rng rng(79);
    for (int trial = 0; trial < 20; ++trial) {
        const int h = rng.uniform_int(11, 20), w = rng.uniform_int(11, 20);
        const int c = rng.bernoulli(0.5) ? 1 : 3;
        const ImageU8 a = random_image(rng, h, w, c);
        ImageU8 b = a;
        for (auto& v : b.data)
            if (rng.bernoulli(0.3))
                v = static_cast<std::uint8_t>(std::clamp(v + rng.uniform_int(-20, 20), 0, 255));
        CHECK(ssim(a, b) == doctest::Approx(ssim_oracle(a, b)).epsilon(1e-6));
    }
}

TEST_CASE("asr and sr definitions") {
    CHECK(attack_success_rate({1, 2, 3, 0}, {1, 2, 0, 0}) == doctest::Approx(25.0));
    CHECK(recovery_success_rate({1, 2, 3, 0}, {1, 2, 0, 0}) == doctest::Approx(75.0));
    CHECK_THROWS_AS(attack_success_rate({}, {}), ShapeError);
    CHECK_THROWS_AS(recovery_success_rate({1}, {1, 2}), ShapeError);
}
