#include <doctest.h>

#include <array>
#include <cstdint>

#include "revadv/errors.hpp"
#include "revadv/huffman.hpp"
#include "revadv/rng.hpp"

using namespace revadv;

namespace {

// Brute-force oracle: minimum expected bit count over every Kraft-valid
// assignment of lengths in [1,3] to the five symbols.
std::uint64_t optimal_cost(const std::array<std::uint64_t, kStageSymbols>& freqs) {
    std::uint64_t best = UINT64_MAX;
    std::array<std::uint8_t, kStageSymbols> lengths{};
    auto recurse = [&](auto&& self, int idx) -> void {
        if (idx == kStageSymbols) {
            int kraft = 0;
            for (auto l : lengths) kraft += 1 << (kMaxCodeLength - l);
            if (kraft > (1 << kMaxCodeLength)) return;
            std::uint64_t cost = 0;
            for (int s = 0; s < kStageSymbols; ++s)
                cost += freqs[static_cast<std::size_t>(s)] * lengths[static_cast<std::size_t>(s)];
            best = std::min(best, cost);
            return;
        }
        for (std::uint8_t l = 1; l <= kMaxCodeLength; ++l) {
            lengths[static_cast<std::size_t>(idx)] = l;
            self(self, idx + 1);
        }
    };
    recurse(recurse, 0);
    return best;
}

std::uint64_t table_cost(const HuffmanTable& t,
                         const std::array<std::uint64_t, kStageSymbols>& freqs) {
    std::uint64_t cost = 0;
    for (int s = 0; s < kStageSymbols; ++s)
        cost += freqs[static_cast<std::size_t>(s)] * t.lengths[static_cast<std::size_t>(s)];
    return cost;
}

}  // namespace

TEST_CASE("uniform counts give canonical lengths 2,2,2,3,3") {
    const HuffmanTable t = huffman_build({10, 10, 10, 10, 10});
    CHECK(t.lengths == std::array<std::uint8_t, 5>{2, 2, 2, 3, 3});
    // computed by the brute-force oracle as well
    CHECK(table_cost(t, {10, 10, 10, 10, 10}) == optimal_cost({10, 10, 10, 10, 10}));
}

TEST_CASE("a single present symbol gets the one-bit code") {
    const HuffmanTable t = huffman_build({0, 0, 64, 0, 0});
    CHECK(t.lengths[2] == 1);
    for (int s : {0, 1, 3, 4}) CHECK(t.lengths[static_cast<std::size_t>(s)] == 3);
}

TEST_CASE("all-zero frequencies are rejected") {
    CHECK_THROWS_AS(huffman_build({0, 0, 0, 0, 0}), FormatError);
}

TEST_CASE("package-merge matches the brute-force optimum exhaustively") {
    // every count vector with entries <= 6
    std::array<std::uint64_t, kStageSymbols> f{};
    for (f[0] = 0; f[0] <= 6; ++f[0])
        for (f[1] = 0; f[1] <= 6; ++f[1])
            for (f[2] = 0; f[2] <= 6; ++f[2])
                for (f[3] = 0; f[3] <= 6; ++f[3])
                    for (f[4] = 0; f[4] <= 6; ++f[4]) {
                        if (f[0] + f[1] + f[2] + f[3] + f[4] == 0) continue;
                        const HuffmanTable t = huffman_build(f);
                        REQUIRE(table_cost(t, f) == optimal_cost(f));
                    }
}

TEST_CASE("codes are prefix-free and canonical") {
    Rng rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        std::array<std::uint64_t, kStageSymbols> f{};
        for (auto& v : f) v = static_cast<std::uint64_t>(rng.uniform_int(0, 1000));
        if (f[0] + f[1] + f[2] + f[3] + f[4] == 0) f[0] = 1;
        const HuffmanTable t = huffman_build(f);
        for (int a = 0; a < kStageSymbols; ++a) {
            for (int b = 0; b < kStageSymbols; ++b) {
                if (a == b) continue;
                const int la = t.lengths[static_cast<std::size_t>(a)];
                const int lb = t.lengths[static_cast<std::size_t>(b)];
                if (la > lb) continue;
                // a must not be a prefix of b
                const auto prefix = static_cast<std::uint16_t>(
                    t.codes[static_cast<std::size_t>(b)] >> (lb - la));
                CHECK((prefix != t.codes[static_cast<std::size_t>(a)] || la == lb));
                if (la == lb)
                    CHECK(t.codes[static_cast<std::size_t>(a)] !=
                          t.codes[static_cast<std::size_t>(b)]);
            }
        }
    }
}

TEST_CASE("expected length stays within one bit of entropy when depth allows") {
    // skewed but shallow distribution: unconstrained Huffman depth <= 3
    const std::array<std::uint64_t, kStageSymbols> f{40, 30, 15, 10, 5};
    const HuffmanTable t = huffman_build(f);
    double entropy = 0.0;
    const double total = 100.0;
    for (auto v : f) {
        if (v == 0) continue;
        const double p = static_cast<double>(v) / total;
        entropy -= p * std::log2(p);
    }
    const double expected = static_cast<double>(table_cost(t, f)) / total;
    CHECK(expected <= entropy + 1.0);
}

TEST_CASE("encode and decode round-trip") {
    SUBCASE("empty-ish and uniform matrices") {
        StageMatrix zeros = StageMatrix::zeros(8, 8, 4);
        const HuffmanTable t = huffman_build(stage_histogram(zeros));
        const auto bits = huffman_encode(zeros, t);
        CHECK(bits.size() == 64 * t.lengths[2]);
        CHECK(huffman_decode(bits, t, 8, 8, 4).stages == zeros.stages);
    }
    SUBCASE("1000 random matrices") {
        Rng rng(17);
        for (int trial = 0; trial < 1000; ++trial) {
            const int h = rng.uniform_int(1, 12), w = rng.uniform_int(1, 12);
            StageMatrix m = StageMatrix::zeros(h, w, 4);
            for (auto& s : m.stages) s = static_cast<std::int8_t>(rng.uniform_int(-2, 2));
            const HuffmanTable t = huffman_build(stage_histogram(m));
            const auto bits = huffman_encode(m, t);
            const StageMatrix back = huffman_decode(bits, t, h, w, 4);
            REQUIRE(back.stages == m.stages);
        }
    }
    SUBCASE("exhausted and dangling bitstreams fail loudly") {
        StageMatrix m = StageMatrix::zeros(2, 2, 4);
        const HuffmanTable t = huffman_build(stage_histogram(m));
        auto bits = huffman_encode(m, t);
        bits.pop_back();
        CHECK_THROWS_AS(huffman_decode(bits, t, 2, 2, 4), FormatError);
        bits.push_back(false);
        bits.push_back(false);
        CHECK_THROWS_AS(huffman_decode(bits, t, 2, 2, 4), FormatError);
    }
}
