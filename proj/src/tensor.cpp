#include "revadv/tensor.hpp"

#include <cmath>
#include <sstream>

#include "revadv/errors.hpp"

namespace revadv {

std::size_t shape_numel(const std::vector<int>& shape) {
    std::size_t n = 1;
    for (int d : shape) n *= static_cast<std::size_t>(d);
    return n;
}

std::string shape_str(const std::vector<int>& shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
    os << "]";
    return os.str();
}

Tensor::Tensor(std::vector<int> s, std::vector<float> d) : shape(std::move(s)), data(std::move(d)) {
    for (int dm : shape) {
        if (dm <= 0) throw ShapeError("tensor: nonpositive dimension in " + shape_str(shape));
    }
    if (data.size() != shape_numel(shape)) {
        throw ShapeError("tensor: data length " + std::to_string(data.size()) +
                         " does not match shape " + shape_str(shape));
    }
}

Tensor Tensor::zeros(std::vector<int> shape) {
    std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<float>(n, 0.0f));
}

Tensor Tensor::full(std::vector<int> shape, float value) {
    std::size_t n = shape_numel(shape);
    return Tensor(std::move(shape), std::vector<float>(n, value));
}

Tensor Tensor::uniform(std::vector<int> shape, Rng& rng, float lo, float hi) {
    Tensor t = zeros(std::move(shape));
    for (auto& v : t.data) v = static_cast<float>(rng.uniform(lo, hi));
    return t;
}

Tensor Tensor::normal(std::vector<int> shape, Rng& rng, float mean, float stddev) {
    Tensor t = zeros(std::move(shape));
    for (auto& v : t.data) v = static_cast<float>(rng.normal(mean, stddev));
    return t;
}

float& Tensor::at3(int i, int j, int k) {
    return data[static_cast<std::size_t>((i * shape[1] + j) * shape[2] + k)];
}

float Tensor::at3(int i, int j, int k) const {
    return data[static_cast<std::size_t>((i * shape[1] + j) * shape[2] + k)];
}

bool Tensor::all_finite() const {
    for (float v : data) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

}  // namespace revadv
