#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "revadv/image.hpp"
#include "revadv/quantize.hpp"

namespace revadv {

/// 8-bit gray or RGB PNG. Writing is deterministic for identical pixels.
void write_png(const std::string& path, const ImageU8& img);
ImageU8 read_png(const std::string& path);
std::vector<std::uint8_t> encode_png(const ImageU8& img);
ImageU8 decode_png(const std::vector<std::uint8_t>& bytes);

/// IDX (ubyte) readers: images magic 0x00000803, labels magic 0x00000801.
std::vector<ImageU8> read_idx_images(const std::string& path);
std::vector<int> read_idx_labels(const std::string& path);

/// Stage matrix sidecar: "RVSM" | version u8 | xi u8 | H u16 | W u16 |
/// int8 stages row-major | CRC-32. Big-endian integers.
void write_stages(const std::string& path, const StageMatrix& stages);
StageMatrix read_stages(const std::string& path);

std::vector<std::uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes);

}  // namespace revadv
