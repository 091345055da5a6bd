#include "revadv/image.hpp"

#include <algorithm>
#include <cmath>

#include "revadv/errors.hpp"

namespace revadv {

ImageU8 ImageU8::make(int h, int w, int c, std::uint8_t fill) {
    ImageU8 img;
    img.h = h;
    img.w = w;
    img.c = c;
    img.data.assign(static_cast<std::size_t>(h) * w * c, fill);
    return img;
}

Tensor to_unit(const ImageU8& img) {
    Tensor t = Tensor::zeros({img.h, img.w, img.c});
    for (std::size_t i = 0; i < img.data.size(); ++i)
        t.data[i] = static_cast<float>(img.data[i]) / 255.0f;
    return t;
}

ImageU8 to_u8(const Tensor& unit) {
    if (unit.rank() != 3) throw ShapeError("to_u8: expected [H,W,C], got " + shape_str(unit.shape));
    ImageU8 img = ImageU8::make(unit.dim(0), unit.dim(1), unit.dim(2));
    for (std::size_t i = 0; i < unit.data.size(); ++i) {
        const float v = std::round(unit.data[i] * 255.0f);
        img.data[i] = static_cast<std::uint8_t>(std::clamp(v, 0.0f, 255.0f));
    }
    return img;
}

StageMatrix project_stages(const ImageU8& image, const StageMatrix& stages) {
    if (image.h != stages.h || image.w != stages.w)
        throw ShapeError("project_stages: image and stage dimensions differ");
    StageMatrix out = stages;
    const int xi = stages.xi;
    for (int i = 0; i < image.h; ++i) {
        for (int j = 0; j < image.w; ++j) {
            int lo = 0, hi = 255;
            for (int ch = 0; ch < image.c; ++ch) {
                lo = std::max(lo, static_cast<int>(image.at(i, j, ch)));
                hi = std::min(hi, static_cast<int>(image.at(i, j, ch)));
            }
            // lo = max pixel value, hi = min pixel value across channels
            const int smax = std::min(2, (255 - lo) / xi);
            const int smin = std::max(-2, -(hi / xi));
            out.at(i, j) = static_cast<std::int8_t>(
                std::clamp(static_cast<int>(out.at(i, j)), smin, smax));
        }
    }
    return out;
}

ImageU8 apply_stages(const ImageU8& image, const StageMatrix& stages) {
    if (image.h != stages.h || image.w != stages.w)
        throw ShapeError("apply_stages: image and stage dimensions differ");
    ImageU8 out = image;
    for (int i = 0; i < image.h; ++i) {
        for (int j = 0; j < image.w; ++j) {
            const int d = static_cast<int>(stages.at(i, j)) * stages.xi;
            for (int ch = 0; ch < image.c; ++ch) {
                const int v = static_cast<int>(image.at(i, j, ch)) + d;
                if (v < 0 || v > 255)
                    throw ShapeError("apply_stages: perturbation leaves [0,255]; project first");
                out.at(i, j, ch) = static_cast<std::uint8_t>(v);
            }
        }
    }
    return out;
}

}  // namespace revadv
