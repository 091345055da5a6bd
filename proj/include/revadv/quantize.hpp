#pragma once

#include <cstdint>
#include <vector>

#include "revadv/tensor.hpp"

namespace revadv {

/// H x W signed stage matrix over {-2,-1,0,1,2} with its quantization unit
/// xi (pixel units). decode() reproduces the perturbation as stage * xi,
/// broadcast identically to every channel.
struct StageMatrix {
    int h = 0;
    int w = 0;
    int xi = 4;
    std::vector<std::int8_t> stages;  // row-major, length h*w

    static StageMatrix zeros(int h, int w, int xi);
    std::int8_t& at(int i, int j) { return stages[static_cast<std::size_t>(i * w + j)]; }
    std::int8_t at(int i, int j) const { return stages[static_cast<std::size_t>(i * w + j)]; }
    bool valid_alphabet() const;
    bool operator==(const StageMatrix& o) const {
        return h == o.h && w == o.w && xi == o.xi && stages == o.stages;
    }
};

/// Per-pixel mean over channels: [H,W,C] -> [H,W]. Identity for C == 1.
Tensor channel_aggregate(const Tensor& delta);

/// Threshold quantizer. |v| = 0 -> 0; 0 < |v| <= xi -> sign; xi < |v| <= 2 xi
/// -> 2 sign. The |v| = xi boundary belongs to the lower stage. Entries with
/// |v| > epsilon are rejected; callers clip first.
StageMatrix stage_encode(const Tensor& delta2d, int epsilon, int xi);

/// stage * xi at every channel: -> [H,W,C] pixel-unit perturbation.
Tensor stage_decode(const StageMatrix& stages, int channels);

}  // namespace revadv
