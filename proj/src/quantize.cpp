#include "revadv/quantize.hpp"

#include <cmath>
#include <string>

#include "revadv/errors.hpp"

namespace revadv {

StageMatrix StageMatrix::zeros(int h, int w, int xi) {
    StageMatrix m;
    m.h = h;
    m.w = w;
    m.xi = xi;
    m.stages.assign(static_cast<std::size_t>(h) * static_cast<std::size_t>(w), 0);
    return m;
}

bool StageMatrix::valid_alphabet() const {
    for (auto s : stages) {
        if (s < -2 || s > 2) return false;
    }
    return true;
}

Tensor channel_aggregate(const Tensor& delta) {
    if (delta.rank() != 3)
        throw ShapeError("channel_aggregate: expected [H,W,C], got " + shape_str(delta.shape));
    const int h = delta.dim(0), w = delta.dim(1), c = delta.dim(2);
    Tensor out = Tensor::zeros({h, w});
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            double acc = 0.0;
            for (int ch = 0; ch < c; ++ch) acc += delta.at3(i, j, ch);
            out.data[static_cast<std::size_t>(i * w + j)] = static_cast<float>(acc / c);
        }
    }
    return out;
}

StageMatrix stage_encode(const Tensor& delta2d, int epsilon, int xi) {
    if (delta2d.rank() != 2)
        throw ShapeError("stage_encode: expected [H,W], got " + shape_str(delta2d.shape));
    if (xi <= 0 || epsilon != 2 * xi)
        throw ShapeError("stage_encode: requires epsilon = 2*xi > 0, got epsilon=" +
                         std::to_string(epsilon) + " xi=" + std::to_string(xi));
    const int h = delta2d.dim(0), w = delta2d.dim(1);
    StageMatrix m = StageMatrix::zeros(h, w, xi);
    const float eps = static_cast<float>(epsilon);
    const float x = static_cast<float>(xi);
    for (std::size_t i = 0; i < delta2d.data.size(); ++i) {
        const float v = delta2d.data[i];
        const float a = std::fabs(v);
        if (a > eps)
            throw ShapeError("stage_encode: |value| " + std::to_string(a) + " exceeds epsilon " +
                             std::to_string(epsilon) + "; clip before encoding");
        std::int8_t stage = 0;
        if (a == 0.0f)
            stage = 0;
        else if (a <= x)
            stage = 1;
        else
            stage = 2;
        if (v < 0.0f) stage = static_cast<std::int8_t>(-stage);
        m.stages[i] = stage;
    }
    return m;
}

Tensor stage_decode(const StageMatrix& stages, int channels) {
    if (channels < 1) throw ShapeError("stage_decode: channels must be >= 1");
    if (!stages.valid_alphabet()) throw ShapeError("stage_decode: symbol outside {-2..2}");
    Tensor out = Tensor::zeros({stages.h, stages.w, channels});
    for (int i = 0; i < stages.h; ++i) {
        for (int j = 0; j < stages.w; ++j) {
            const float v = static_cast<float>(stages.at(i, j)) * static_cast<float>(stages.xi);
            for (int c = 0; c < channels; ++c) out.at3(i, j, c) = v;
        }
    }
    return out;
}

}  // namespace revadv
