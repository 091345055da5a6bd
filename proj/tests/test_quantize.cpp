#include <doctest.h>

#include "revadv/errors.hpp"
#include "revadv/image.hpp"
#include "revadv/quantize.hpp"
#include "revadv/rng.hpp"

using namespace revadv;

TEST_CASE("channel aggregation is the per-pixel mean") {
    Tensor d = Tensor::zeros({1, 2, 3});
    d.at3(0, 0, 0) = 3.0f;  // (3,0,0) -> 1
    d.at3(0, 1, 0) = d.at3(0, 1, 1) = d.at3(0, 1, 2) = 7.0f;
    Tensor agg = channel_aggregate(d);
    CHECK(agg.data[0] == doctest::Approx(1.0f));
    CHECK(agg.data[1] == doctest::Approx(7.0f));

    Tensor single = Tensor({2, 2, 1}, {1, 2, 3, 4});
    CHECK(channel_aggregate(single).data == std::vector<float>{1, 2, 3, 4});
}

TEST_CASE("stage encoding truth table, epsilon 8 xi 4, all integers in [-8,8]") {
    // expected stage per integer magnitude: 0 -> 0, 1..4 -> 1, 5..8 -> 2
    for (int v = -8; v <= 8; ++v) {
        Tensor d = Tensor({1, 1}, {static_cast<float>(v)});
        const StageMatrix m = stage_encode(d, 8, 4);
        int expect = 0;
        const int a = v < 0 ? -v : v;
        if (a == 0)
            expect = 0;
        else if (a <= 4)
            expect = 1;
        else
            expect = 2;
        if (v < 0) expect = -expect;
        CHECK(m.at(0, 0) == expect);
        // decode lands on the lattice and reapplies the sign
        const Tensor back = stage_decode(m, 3);
        for (float f : back.data) CHECK(f == static_cast<float>(expect * 4));
    }
}

TEST_CASE("stage encoding rejects out-of-range values") {
    Tensor d = Tensor({1, 1}, {9.0f});
    CHECK_THROWS_AS(stage_encode(d, 8, 4), ShapeError);
    CHECK_THROWS_AS(stage_encode(Tensor({1, 1}, {1.0f}), 8, 3), ShapeError);
}

TEST_CASE("decode broadcasts one value to all channels and respects the alphabet") {
    StageMatrix m = StageMatrix::zeros(2, 2, 4);
    m.at(0, 0) = 2;
    Tensor d = stage_decode(m, 3);
    for (int ch = 0; ch < 3; ++ch) CHECK(d.at3(0, 0, ch) == 8.0f);
    CHECK(d.at3(1, 1, 0) == 0.0f);

    m.stages[1] = 3;
    CHECK_THROWS_AS(stage_decode(m, 1), ShapeError);
}

TEST_CASE("encode-decode-encode is idempotent on random matrices") {
    Rng rng(21);
    for (int trial = 0; trial < 1000; ++trial) {
        const int h = rng.uniform_int(1, 8), w = rng.uniform_int(1, 8);
        StageMatrix m = StageMatrix::zeros(h, w, 4);
        for (auto& s : m.stages) s = static_cast<std::int8_t>(rng.uniform_int(-2, 2));
        const Tensor dec = stage_decode(m, 3);
        // lattice closure: every value is stage*xi and within epsilon
        for (float v : dec.data) {
            CHECK(std::fabs(v) <= 8.0f);
            CHECK(static_cast<int>(v) % 4 == 0);
        }
        const StageMatrix re = stage_encode(channel_aggregate(dec), 8, 4);
        CHECK(re.stages == m.stages);
    }
}

TEST_CASE("range projection keeps image plus perturbation inside [0,255]") {
    ImageU8 img = ImageU8::make(2, 2, 3, 128);
    img.at(0, 0, 0) = 250;  // positive stages must clip: 255-250 < xi
    img.at(0, 1, 1) = 3;    // negative stages must clip
    StageMatrix m = StageMatrix::zeros(2, 2, 4);
    for (auto& s : m.stages) s = 2;
    m.at(0, 1) = -2;
    const StageMatrix p = project_stages(img, m);
    CHECK(p.at(0, 0) == 1);   // (255-250)/4 = 1
    CHECK(p.at(0, 1) == 0);   // -(3/4) = 0
    CHECK(p.at(1, 0) == 2);
    const ImageU8 adv = apply_stages(img, p);
    CHECK(adv.at(0, 0, 0) == 254);
    CHECK(adv.at(1, 1, 2) == 136);
    CHECK_THROWS_AS(apply_stages(img, m), ShapeError);
}
