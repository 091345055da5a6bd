#include "revadv/whitebox.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "revadv/autodiff.hpp"
#include "revadv/errors.hpp"

namespace revadv {

void WhiteboxConfig::validate() const {
    if (xi <= 0 || epsilon != 2 * xi)
        throw ShapeError("whitebox config: requires epsilon = 2*xi > 0");
    if (alpha <= 0) throw ShapeError("whitebox config: alpha must be positive");
    if (iterations < 1) throw ShapeError("whitebox config: iterations must be >= 1");
    if (di_probability < 0.0f || di_probability > 1.0f)
        throw ShapeError("whitebox config: di_probability outside [0,1]");
    if (ti_kernel_size % 2 == 0)
        throw ShapeError("whitebox config: ti kernel size must be odd");
}

Tensor diverse_input(const Tensor& image, Rng& rng, float p) {
    if (image.rank() != 3)
        throw ShapeError("diverse_input: expected [H,W,C], got " + shape_str(image.shape));
    const bool apply = rng.bernoulli(p);
    if (!apply) return image;
    const int h = image.dim(0), w = image.dim(1), c = image.dim(2);
    const int sh = rng.uniform_int(h, h + h / 10);
    const int sw = rng.uniform_int(w, w + w / 10);
    // nearest-neighbour resize to (sh, sw)
    Tensor resized = Tensor::zeros({sh, sw, c});
    for (int i = 0; i < sh; ++i) {
        const int si = std::min(h - 1, i * h / sh);
        for (int j = 0; j < sw; ++j) {
            const int sj = std::min(w - 1, j * w / sw);
            for (int ch = 0; ch < c; ++ch) resized.at3(i, j, ch) = image.at3(si, sj, ch);
        }
    }
    const int oy = rng.uniform_int(0, sh - h);
    const int ox = rng.uniform_int(0, sw - w);
    Tensor out = Tensor::zeros({h, w, c});  // zero canvas; the window fills it fully
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < w; ++j)
            for (int ch = 0; ch < c; ++ch) out.at3(i, j, ch) = resized.at3(i + oy, j + ox, ch);
    return out;
}

Tensor gaussian_kernel(int size, float sigma) {
    if (size % 2 == 0) throw ShapeError("gaussian_kernel: size must be odd");
    if (sigma <= 0.0f) throw ShapeError("gaussian_kernel: sigma must be positive");
    Tensor k = Tensor::zeros({size, size});
    const int half = size / 2;
    double sum = 0.0;
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            const double di = i - half, dj = j - half;
            const double v = std::exp(-(di * di + dj * dj) / (2.0 * sigma * sigma));
            k.data[static_cast<std::size_t>(i * size + j)] = static_cast<float>(v);
            sum += v;
        }
    }
    for (auto& v : k.data) v = static_cast<float>(v / sum);
    return k;
}

Tensor smooth_gradient(const Tensor& grad, const Tensor& kernel) {
    if (grad.rank() != 3)
        throw ShapeError("smooth_gradient: expected [H,W,C], got " + shape_str(grad.shape));
    if (kernel.rank() != 2 || kernel.dim(0) != kernel.dim(1))
        throw ShapeError("smooth_gradient: kernel must be square, got " + shape_str(kernel.shape));
    if (kernel.dim(0) % 2 == 0)
        throw ShapeError("smooth_gradient: kernel size must be odd, got " +
                         std::to_string(kernel.dim(0)));
    const int h = grad.dim(0), w = grad.dim(1), c = grad.dim(2);
    const int ks = kernel.dim(0), half = ks / 2;
    auto reflect = [](int i, int n) {
        // symmetric reflection without edge repetition: -1 -> 0? no: -1 -> 1
        while (i < 0 || i >= n) {
            if (i < 0) i = -i;
            if (i >= n) i = 2 * n - 2 - i;
        }
        return i;
    };
    Tensor out = Tensor::zeros(grad.shape);
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            for (int ch = 0; ch < c; ++ch) {
                double acc = 0.0;
                for (int u = 0; u < ks; ++u) {
                    const int si = reflect(i + u - half, h);
                    for (int v = 0; v < ks; ++v) {
                        const int sj = reflect(j + v - half, w);
                        acc += static_cast<double>(kernel.data[static_cast<std::size_t>(u * ks + v)]) *
                               grad.at3(si, sj, ch);
                    }
                }
                out.at3(i, j, ch) = static_cast<float>(acc);
            }
        }
    }
    return out;
}

Tensor sensitivity_mask(const Tensor& grad, int iteration, int iterations) {
    if (iteration < 0 || iteration >= iterations)
        throw ShapeError("sensitivity_mask: iteration outside [0, iterations)");
    const std::size_t n = grad.numel();
    const auto amplified = static_cast<std::size_t>(std::ceil(
        static_cast<double>(iterations - iteration) / (2.0 * iterations) * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(grad.data[a]) > std::fabs(grad.data[b]);
    });
    Tensor mask = Tensor::full(grad.shape, 1.0f);
    for (std::size_t i = 0; i < amplified && i < n; ++i) mask.data[order[i]] = 2.0f;
    return mask;
}

WhiteboxResult whitebox_attack(const ImageU8& image, int label,
                               const std::vector<EnsembleMember>& models,
                               const WhiteboxConfig& cfg, Rng& rng) {
    cfg.validate();
    if (models.empty()) throw ShapeError("whitebox_attack: empty ensemble");
    for (const auto& m : models) {
        if (m.spec.height != image.h || m.spec.width != image.w || m.spec.channels != image.c)
            throw ShapeError("whitebox_attack: model input shape does not match the image");
        if (m.weight < 0.0f) throw ShapeError("whitebox_attack: negative ensemble weight");
    }
    float wsum = 0.0f;
    for (const auto& m : models) wsum += m.weight;
    if (wsum <= 0.0f) throw ShapeError("whitebox_attack: ensemble weights sum to zero");

    const int h = image.h, w = image.w, c = image.c;
    const Tensor kernel = gaussian_kernel(cfg.ti_kernel_size, cfg.ti_sigma);
    const bool ti_enabled = cfg.ti_kernel_size > 1;

    StageMatrix stages = StageMatrix::zeros(h, w, cfg.xi);
    Tensor accum = Tensor::zeros({h, w, c});   // momentum accumulator
    Tensor delta = Tensor::zeros({h, w, c});   // pixel-unit perturbation

    WhiteboxResult result;
    for (int iter = 0; iter < cfg.iterations; ++iter) {
        // perturbed image in [0,1]; lattice projection keeps it in range
        const ImageU8 adv = apply_stages(image, stages);
        const Tensor adv_unit = to_unit(adv);
        const Tensor transformed = diverse_input(adv_unit, rng, cfg.di_probability);

        // gradient of the loss-weighted ensemble cross-entropy
        Graph graph;
        const auto input = graph.input(transformed);
        Graph::NodeId total = -1;
        for (const auto& m : models) {
            const auto logits = model_forward(graph, m.spec, *m.weights, input);
            const auto loss = graph.scale(graph.softmax_cross_entropy(logits, label),
                                          m.weight / wsum);
            total = total < 0 ? loss : graph.add(total, loss);
        }
        Tensor grad = graph.backward(total).at(input);

        if (ti_enabled) grad = smooth_gradient(grad, kernel);

        double l1 = 0.0;
        for (float g : grad.data) l1 += std::fabs(g);
        for (std::size_t i = 0; i < accum.data.size(); ++i) {
            const float normed = l1 > 0.0 ? static_cast<float>(grad.data[i] / l1) : 0.0f;
            accum.data[i] = cfg.momentum_decay * accum.data[i] + normed;
        }

        const Tensor mask = cfg.adaptive_mask ? sensitivity_mask(accum, iter, cfg.iterations)
                                              : Tensor::full({h, w, c}, 1.0f);

        const float eps = static_cast<float>(cfg.epsilon);
        for (std::size_t i = 0; i < delta.data.size(); ++i) {
            const float s = accum.data[i] > 0.0f ? 1.0f : (accum.data[i] < 0.0f ? -1.0f : 0.0f);
            delta.data[i] = std::clamp(delta.data[i] + static_cast<float>(cfg.alpha) * s * mask.data[i],
                                       -eps, eps);
        }

        // project onto the shared-channel stage lattice and the pixel range
        stages = project_stages(image, stage_encode(channel_aggregate(delta), cfg.epsilon, cfg.xi));
        delta = stage_decode(stages, c);
        result.iterations_run = iter + 1;
    }
    result.stages = std::move(stages);
    return result;
}

}  // namespace revadv
