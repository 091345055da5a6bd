#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "revadv/rng.hpp"

namespace revadv {

/// Dense row-major 32-bit float tensor. Value type; no views.
struct Tensor {
    std::vector<int> shape;
    std::vector<float> data;

    Tensor() = default;
    Tensor(std::vector<int> s, std::vector<float> d);

    static Tensor zeros(std::vector<int> shape);
    static Tensor full(std::vector<int> shape, float value);
    static Tensor uniform(std::vector<int> shape, Rng& rng, float lo, float hi);
    static Tensor normal(std::vector<int> shape, Rng& rng, float mean, float stddev);

    std::size_t numel() const { return data.size(); }
    int dim(int i) const { return shape[static_cast<std::size_t>(i)]; }
    int rank() const { return static_cast<int>(shape.size()); }

    float& at3(int i, int j, int k);          // rank-3 accessor, row-major, channel-minor
    float at3(int i, int j, int k) const;

    bool all_finite() const;
    bool same_shape(const Tensor& other) const { return shape == other.shape; }
};

std::size_t shape_numel(const std::vector<int>& shape);
std::string shape_str(const std::vector<int>& shape);

}  // namespace revadv
