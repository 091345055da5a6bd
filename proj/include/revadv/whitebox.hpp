#pragma once

#include <cstdint>
#include <vector>

#include "revadv/image.hpp"
#include "revadv/quantize.hpp"
#include "revadv/rng.hpp"
#include "revadv/tensor.hpp"
#include "revadv/zoo.hpp"

namespace revadv {

struct EnsembleMember {
    ModelSpec spec;
    const Weights* weights = nullptr;
    float weight = 1.0f;  // loss weighting factor
};

struct WhiteboxConfig {
    int epsilon = 8;           // max perturbation, 0-255 pixel units
    int xi = 4;                // stage threshold; epsilon must equal 2*xi
    int alpha = 4;             // step size, pixel units (defaults to xi)
    int iterations = 10;
    float momentum_decay = 1.0f;
    float di_probability = 0.5f;
    int ti_kernel_size = 7;
    float ti_sigma = 3.0f;
    bool adaptive_mask = true;  // amplified step in gradient-sensitive regions

    void validate() const;
};

struct WhiteboxResult {
    StageMatrix stages;
    int iterations_run = 0;
};

/// Random resize into [H, floor(1.1 H)] (nearest neighbour) followed by a
/// random H x W window on a zero canvas, applied with probability p.
/// Consumes one rng draw for the coin, four more when applied.
Tensor diverse_input(const Tensor& image, Rng& rng, float p);

/// Odd-sized normalized Gaussian kernel for gradient smoothing.
Tensor gaussian_kernel(int size, float sigma);

/// Per-channel 2D convolution of the gradient with reflective padding.
Tensor smooth_gradient(const Tensor& grad, const Tensor& kernel);

/// Mask in {1,2}: the ceil((n-i)/(2n) * numel) largest |grad| entries get 2,
/// ties resolved in scan order (row, col, channel).
Tensor sensitivity_mask(const Tensor& grad, int iteration, int iterations);

/// Iterative momentum sign attack over a loss-weighted model ensemble, with
/// input diversification, gradient smoothing, the shrinking sensitivity
/// mask, and per-iteration projection onto the shared-channel stage lattice
/// (and the image's [0,255] range). Untargeted: maximizes the ensemble
/// cross-entropy at the true label.
WhiteboxResult whitebox_attack(const ImageU8& image, int label,
                               const std::vector<EnsembleMember>& models,
                               const WhiteboxConfig& cfg, Rng& rng);

}  // namespace revadv
