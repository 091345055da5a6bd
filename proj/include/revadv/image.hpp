#pragma once

#include <cstdint>
#include <vector>

#include "revadv/quantize.hpp"
#include "revadv/tensor.hpp"

namespace revadv {

/// 8-bit image, row-major, channel-minor. c is 1 (gray) or 3 (rgb).
struct ImageU8 {
    int h = 0;
    int w = 0;
    int c = 0;
    std::vector<std::uint8_t> data;

    static ImageU8 make(int h, int w, int c, std::uint8_t fill = 0);
    std::uint8_t& at(int i, int j, int ch) {
        return data[static_cast<std::size_t>((i * w + j) * c + ch)];
    }
    std::uint8_t at(int i, int j, int ch) const {
        return data[static_cast<std::size_t>((i * w + j) * c + ch)];
    }
    std::size_t numel() const { return data.size(); }
    bool same_shape(const ImageU8& o) const { return h == o.h && w == o.w && c == o.c; }
    bool operator==(const ImageU8& o) const { return same_shape(o) && data == o.data; }
};

/// u8 -> float in [0,1] (divide by 255).
Tensor to_unit(const ImageU8& img);
/// float in [0,1] -> u8 (round half away from zero, saturate).
ImageU8 to_u8(const Tensor& unit);

/// Per-pixel stage bounds such that image + stage*xi stays in [0,255] for
/// every channel. Returns the stage matrix projected into those bounds.
StageMatrix project_stages(const ImageU8& image, const StageMatrix& stages);

/// image + decode(stages), which project_stages guarantees never saturates.
ImageU8 apply_stages(const ImageU8& image, const StageMatrix& stages);

}  // namespace revadv
