#include <doctest.h>

#include "revadv/dataset.hpp"
#include "revadv/errors.hpp"
#include "revadv/metrics.hpp"
#include "revadv/rng.hpp"
#include "revadv/stego.hpp"

using namespace revadv;

namespace {

ImageU8 random_image(Rng& rng, int h, int w, int c, int lo = 0, int hi = 255) {
    ImageU8 img = ImageU8::make(h, w, c);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng.uniform_int(lo, hi));
    return img;
}

StageMatrix random_stages(Rng& rng, int h, int w) {
    StageMatrix m = StageMatrix::zeros(h, w, 4);
    for (auto& s : m.stages) s = static_cast<std::int8_t>(rng.uniform_int(-2, 2));
    return m;
}

}  // namespace

TEST_CASE("keystream is involutive, key-dependent, and needs a key") {
    std::vector<std::uint8_t> payload = {1, 2, 3, 200, 255, 0, 42};
    auto enc = payload;
    keystream_xor(enc, "secret");
    CHECK(enc != payload);
    keystream_xor(enc, "secret");
    CHECK(enc == payload);

    auto other = payload;
    keystream_xor(other, "other-key");
    auto again = payload;
    keystream_xor(again, "secret");
    CHECK(other != again);

    CHECK_THROWS_AS(keystream_xor(payload, ""), FormatError);
}

TEST_CASE("keystream skip matches a shifted full stream") {
    std::vector<std::uint8_t> a(32, 0), b(40, 0);
    keystream_xor(b, "k");
    keystream_xor(a, "k", 8);
    for (int i = 0; i < 32; ++i) CHECK(a[static_cast<std::size_t>(i)] == b[static_cast<std::size_t>(i + 8)]);
}

TEST_CASE("payload round-trips and authenticates") {
    Rng rng(31);
    StageMatrix m = random_stages(rng, 16, 16);
    const auto bytes = build_payload(m, "key-1", StegoMode::Lsb);

    StegoMode mode;
    const StageMatrix back = parse_payload(bytes, "key-1", &mode);
    CHECK(mode == StegoMode::Lsb);
    CHECK(back == m);

    SUBCASE("wrong key is an integrity error") {
        CHECK_THROWS_AS(parse_payload(bytes, "key-2"), IntegrityError);
    }
    SUBCASE("any tampered bit flips the verdict") {
        for (std::size_t i = 0; i < bytes.size(); i += 7) {
            auto tampered = bytes;
            tampered[i] ^= 0x10;
            CHECK_THROWS(parse_payload(tampered, "key-1"));
        }
    }
    SUBCASE("truncation is detected") {
        auto cut = bytes;
        cut.resize(cut.size() - 5);
        CHECK_THROWS(parse_payload(cut, "key-1"));
    }
}

TEST_CASE("lsb embed and extract") {
    Rng rng(33);
    const ImageU8 carrier = random_image(rng, 8, 8, 3);

    SUBCASE("single bit flips at most the first channel value's LSB") {
        const ImageU8 out = lsb_embed(carrier, {true});
        for (std::size_t i = 1; i < carrier.data.size(); ++i) CHECK(out.data[i] == carrier.data[i]);
        CHECK((out.data[0] | 1) == (carrier.data[0] | 1));
    }
    SUBCASE("per-pixel magnitude change is at most one") {
        std::vector<bool> bits(carrier.numel());
        for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = rng.bernoulli(0.5);
        const ImageU8 out = lsb_embed(carrier, bits);
        for (std::size_t i = 0; i < bits.size(); ++i) {
            const int diff = static_cast<int>(out.data[i]) - static_cast<int>(carrier.data[i]);
            CHECK(diff * diff <= 1);
        }
        CHECK(lsb_extract(out, bits.size()) == bits);
    }
    SUBCASE("capacity boundary") {
        std::vector<bool> exact(carrier.numel(), true);
        CHECK_NOTHROW(lsb_embed(carrier, exact));
        exact.push_back(true);
        CHECK_THROWS_WITH_AS(lsb_embed(carrier, exact), doctest::Contains("193 bits"),
                             CapacityError);
    }
}

TEST_CASE("histogram shifting is bit-exact on peaky images") {
    // smooth synthetic images have the histogram peaks hs relies on
    SyntheticConfig cfg;
    cfg.count = 100;
    cfg.seed = 99;
    const LabeledDataset data = make_synthetic(cfg);
    Rng rng(35);
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::vector<bool> bits(600 + static_cast<std::size_t>(rng.uniform_int(0, 600)) * 8 % 1200);
        for (auto&& b : bits) b = rng.bernoulli(0.5);
        const ImageU8 stego = hs_embed(data.images[i], bits);
        const HsExtracted ex = hs_extract(stego);
        REQUIRE(ex.bits == bits);
        REQUIRE(ex.carrier == data.images[i]);
    }
}

TEST_CASE("histogram shifting fails loudly on a flat histogram") {
    // every value appears equally often in every channel: no empty bin
    ImageU8 img = ImageU8::make(16, 16, 3);
    for (std::size_t i = 0; i < img.data.size(); ++i)
        img.data[i] = static_cast<std::uint8_t>(i % 256);
    CHECK_THROWS_AS(hs_embed(img, std::vector<bool>(64, true)), CapacityError);
}

TEST_CASE("histogram shifting with an empty payload") {
    SyntheticConfig cfg;
    cfg.count = 1;
    cfg.seed = 3;
    const ImageU8 img = make_synthetic(cfg).images[0];
    const ImageU8 stego = hs_embed(img, {});
    // Only the header LSBs plus the +-1 shifts stashing the header's
    // original bits may differ; extraction undoes all of it.
    for (std::size_t i = 768; i < img.data.size(); ++i) {
        const int diff = static_cast<int>(stego.data[i]) - static_cast<int>(img.data[i]);
        CHECK(diff * diff <= 1);
    }
    const HsExtracted ex = hs_extract(stego);
    CHECK(ex.bits.empty());
    CHECK(ex.carrier == img);
}

TEST_CASE("full container round-trip in both modes") {
    SyntheticConfig cfg;
    cfg.count = 4;
    cfg.seed = 41;
    const LabeledDataset data = make_synthetic(cfg);
    Rng rng(43);
    for (const auto mode : {StegoMode::Lsb, StegoMode::Hs}) {
        for (const auto& x : data.images) {
            StageMatrix stages = random_stages(rng, x.h, x.w);
            // sparse stages keep hs capacity comfortable
            for (auto& s : stages.stages)
                if (rng.bernoulli(0.6)) s = 0;
            stages = project_stages(x, stages);
            const ImageU8 adv = apply_stages(x, stages);
            const ImageU8 rae = embed_perturbation(adv, stages, "k3y", mode);
            const Recovered rec = recover_image(rae, "k3y");
            REQUIRE(rec.mode == mode);
            REQUIRE(rec.stages == stages);
            if (mode == StegoMode::Hs) {
                REQUIRE(rec.adv == adv);
                REQUIRE(rec.restored == x);
            } else {
                // only LSBs of payload-covered positions may differ
                for (std::size_t i = 0; i < x.data.size(); ++i) {
                    const int diff = static_cast<int>(rec.restored.data[i]) -
                                     static_cast<int>(x.data[i]);
                    REQUIRE(diff * diff <= 1);
                }
                REQUIRE(psnr(rec.restored, x) >= 48.13);
            }
        }
    }
}

TEST_CASE("recover on zero stages restores the carrier nearly or exactly") {
    SyntheticConfig cfg;
    cfg.count = 1;
    cfg.seed = 47;
    const ImageU8 x = make_synthetic(cfg).images[0];
    const StageMatrix zero = StageMatrix::zeros(x.h, x.w, 4);
    const Recovered lsb = recover_image(embed_perturbation(x, zero, "k", StegoMode::Lsb), "k");
    CHECK(psnr(lsb.restored, x) >= 48.13);
    const Recovered hs = recover_image(embed_perturbation(x, zero, "k", StegoMode::Hs), "k");
    CHECK(hs.restored == x);
}

TEST_CASE("recover refuses wrong keys and foreign images") {
    SyntheticConfig cfg;
    cfg.count = 1;
    cfg.seed = 53;
    const ImageU8 x = make_synthetic(cfg).images[0];
    StageMatrix stages = StageMatrix::zeros(x.h, x.w, 4);
    stages.at(1, 1) = 1;
    const StageMatrix proj = project_stages(x, stages);
    const ImageU8 rae = embed_perturbation(apply_stages(x, proj), proj, "right", StegoMode::Lsb);
    CHECK_THROWS_AS(recover_image(rae, "wrong"), IntegrityError);
    CHECK_THROWS_AS(recover_image(x, "right"), FormatError);  // no payload magic
    CHECK_THROWS_AS(recover_image(rae, "right", StegoMode::Hs), FormatError);
}

TEST_CASE("payload chain identity over random stage matrices and carriers") {
    Rng rng(61);
    for (int trial = 0; trial < 200; ++trial) {
        const int h = rng.uniform_int(8, 32), w = rng.uniform_int(8, 32);
        const StageMatrix m = random_stages(rng, h, w);
        const auto payload = build_payload(m, "chain", StegoMode::Lsb);
        ImageU8 carrier = random_image(rng, 64, 64, 3);
        const ImageU8 stego = lsb_embed(carrier, bits_from_bytes(payload));
        const auto back = bytes_from_bits(lsb_extract(stego, payload.size() * 8));
        REQUIRE(back == payload);
        REQUIRE(parse_payload(back, "chain") == m);
    }
}
