#include "revadv/huffman.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "revadv/errors.hpp"

namespace revadv {

HuffmanTable HuffmanTable::from_lengths(const std::array<std::uint8_t, kStageSymbols>& lengths) {
    for (auto l : lengths) {
        if (l < 1 || l > kMaxCodeLength)
            throw FormatError("huffman: code length " + std::to_string(l) + " outside [1," +
                              std::to_string(kMaxCodeLength) + "]");
    }
    int kraft = 0;  // in units of 2^-kMaxCodeLength
    for (auto l : lengths) kraft += 1 << (kMaxCodeLength - l);
    if (kraft > (1 << kMaxCodeLength))
        throw FormatError("huffman: lengths violate the Kraft inequality");

    HuffmanTable t;
    t.lengths = lengths;
    // canonical assignment: (length, symbol) ascending
    std::array<int, kStageSymbols> order{};
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return lengths[static_cast<std::size_t>(a)] < lengths[static_cast<std::size_t>(b)]; });
    std::uint16_t code = 0;
    int prev_len = 0;
    for (int sym : order) {
        const int len = lengths[static_cast<std::size_t>(sym)];
        code = static_cast<std::uint16_t>(code << (len - prev_len));
        t.codes[static_cast<std::size_t>(sym)] = code;
        ++code;
        prev_len = len;
    }
    return t;
}

HuffmanTable huffman_build(const std::array<std::uint64_t, kStageSymbols>& freqs) {
    const std::uint64_t total = std::accumulate(freqs.begin(), freqs.end(), std::uint64_t{0});
    if (total == 0) throw FormatError("huffman: all-zero frequency table");

    // Package-merge. Items track per-symbol multiplicity in 6-bit fields of
    // `mask`; a symbol's code length is its total multiplicity over the
    // 2n-2 lightest items of the final list.
    struct Item {
        std::uint64_t weight;
        std::uint32_t mask;
    };
    std::vector<Item> level;
    std::array<int, kStageSymbols> depth{};
    for (int l = 0; l < kMaxCodeLength; ++l) {
        std::vector<Item> merged;
        for (int s = 0; s < kStageSymbols; ++s)
            merged.push_back({freqs[static_cast<std::size_t>(s)], 1u << (6 * s)});
        for (std::size_t i = 0; i + 1 < level.size(); i += 2)
            merged.push_back({level[i].weight + level[i + 1].weight, level[i].mask + level[i + 1].mask});
        std::stable_sort(merged.begin(), merged.end(),
                         [](const Item& a, const Item& b) { return a.weight < b.weight; });
        level = std::move(merged);
    }
    const std::size_t take = 2 * kStageSymbols - 2;
    if (level.size() < take) throw FormatError("huffman: package-merge underflow");
    for (std::size_t i = 0; i < take; ++i) {
        for (int s = 0; s < kStageSymbols; ++s)
            depth[static_cast<std::size_t>(s)] += static_cast<int>((level[i].mask >> (6 * s)) & 0x3Fu);
    }

    std::array<std::uint8_t, kStageSymbols> length_pool{};
    for (int s = 0; s < kStageSymbols; ++s)
        length_pool[static_cast<std::size_t>(s)] = static_cast<std::uint8_t>(depth[static_cast<std::size_t>(s)]);

    // Optimal cost depends only on the multiset of lengths paired with sorted
    // frequencies; reassign so higher counts get shorter codes, ties by
    // symbol order.
    std::array<std::uint8_t, kStageSymbols> sorted_lengths = length_pool;
    std::sort(sorted_lengths.begin(), sorted_lengths.end());
    std::array<int, kStageSymbols> by_freq{};
    std::iota(by_freq.begin(), by_freq.end(), 0);
    std::stable_sort(by_freq.begin(), by_freq.end(), [&](int a, int b) {
        return freqs[static_cast<std::size_t>(a)] > freqs[static_cast<std::size_t>(b)];
    });
    std::array<std::uint8_t, kStageSymbols> lengths{};
    for (int i = 0; i < kStageSymbols; ++i)
        lengths[static_cast<std::size_t>(by_freq[static_cast<std::size_t>(i)])] = sorted_lengths[static_cast<std::size_t>(i)];

    return HuffmanTable::from_lengths(lengths);
}

std::array<std::uint64_t, kStageSymbols> stage_histogram(const StageMatrix& m) {
    std::array<std::uint64_t, kStageSymbols> h{};
    for (auto s : m.stages) {
        if (s < -2 || s > 2) throw FormatError("huffman: stage symbol outside alphabet");
        ++h[static_cast<std::size_t>(s + 2)];
    }
    return h;
}

std::vector<bool> huffman_encode(const StageMatrix& stages, const HuffmanTable& table) {
    std::vector<bool> bits;
    bits.reserve(stages.stages.size() * 2);
    for (auto s : stages.stages) {
        if (s < -2 || s > 2) throw FormatError("huffman: stage symbol outside alphabet");
        const auto idx = static_cast<std::size_t>(s + 2);
        const int len = table.lengths[idx];
        const std::uint16_t code = table.codes[idx];
        for (int b = len - 1; b >= 0; --b) bits.push_back(((code >> b) & 1u) != 0);
    }
    return bits;
}

StageMatrix huffman_decode(const std::vector<bool>& bits, const HuffmanTable& table, int h, int w,
                           int xi) {
    StageMatrix m = StageMatrix::zeros(h, w, xi);
    std::size_t pos = 0;
    for (std::size_t i = 0; i < m.stages.size(); ++i) {
        std::uint16_t acc = 0;
        int len = 0;
        bool matched = false;
        while (len < kMaxCodeLength) {
            if (pos >= bits.size())
                throw FormatError("huffman: bitstream exhausted after " + std::to_string(i) +
                                  " of " + std::to_string(m.stages.size()) + " symbols");
            acc = static_cast<std::uint16_t>((acc << 1) | (bits[pos++] ? 1 : 0));
            ++len;
            for (int s = 0; s < kStageSymbols; ++s) {
                if (table.lengths[static_cast<std::size_t>(s)] == len &&
                    table.codes[static_cast<std::size_t>(s)] == acc) {
                    m.stages[i] = static_cast<std::int8_t>(s - 2);
                    matched = true;
                    break;
                }
            }
            if (matched) break;
        }
        if (!matched) throw FormatError("huffman: invalid codeword in bitstream");
    }
    if (pos != bits.size())
        throw FormatError("huffman: " + std::to_string(bits.size() - pos) +
                          " dangling bits after the last symbol");
    return m;
}

}  // namespace revadv
