#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "revadv/quantize.hpp"

namespace revadv {

inline constexpr int kStageSymbols = 5;   // alphabet {-2,-1,0,1,2}
inline constexpr int kMaxCodeLength = 3;  // keeps worst-case payload within 1 bpp for RGB

/// Canonical length-limited prefix code over the stage alphabet. Codewords
/// are fully determined by the lengths: symbols sorted by (length, symbol)
/// receive consecutive codewords.
struct HuffmanTable {
    std::array<std::uint8_t, kStageSymbols> lengths{};   // indexed by symbol + 2
    std::array<std::uint16_t, kStageSymbols> codes{};    // MSB-first, `lengths` bits

    static HuffmanTable from_lengths(const std::array<std::uint8_t, kStageSymbols>& lengths);
    bool operator==(const HuffmanTable& o) const { return lengths == o.lengths; }
};

/// Optimal length-limited code for the given symbol counts (package-merge),
/// lengths assigned to symbols by decreasing count with ties broken by
/// symbol order. Rejects an all-zero count table.
HuffmanTable huffman_build(const std::array<std::uint64_t, kStageSymbols>& freqs);

std::array<std::uint64_t, kStageSymbols> stage_histogram(const StageMatrix& m);

/// MSB-first bit packing of the stage sequence in row-major order.
std::vector<bool> huffman_encode(const StageMatrix& stages, const HuffmanTable& table);

/// Decodes exactly `count` symbols into an h x w matrix (count = h*w).
StageMatrix huffman_decode(const std::vector<bool>& bits, const HuffmanTable& table, int h, int w,
                           int xi);

}  // namespace revadv
