#include "revadv/oracle.hpp"

#include <algorithm>

#include "revadv/errors.hpp"
#include "revadv/image.hpp"

namespace revadv {

float prob_of_label(const Classification& cls, int label) {
    for (const auto& lp : cls)
        if (lp.label == label) return lp.prob;
    return 0.0f;
}

Classification rank_probabilities(const std::vector<float>& probs, int top_k) {
    Classification cls(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i)
        cls[i] = {static_cast<int>(i), probs[i]};
    std::stable_sort(cls.begin(), cls.end(), [](const LabelProb& a, const LabelProb& b) {
        if (a.prob != b.prob) return a.prob > b.prob;
        return a.label < b.label;
    });
    if (top_k > 0 && static_cast<std::size_t>(top_k) < cls.size())
        cls.resize(static_cast<std::size_t>(top_k));
    return cls;
}

LocalOracle::LocalOracle(ModelSpec spec, Weights weights, int top_k)
    : spec_(spec), weights_(std::move(weights)), top_k_(top_k) {
    spec_.validate();
}

Classification LocalOracle::classify(const Tensor& image) {
    // quantize to the 8-bit grid the wire protocol transports
    const Tensor quantized = to_unit(to_u8(image));
    return rank_probabilities(predict(spec_, weights_, quantized), top_k_);
}

}  // namespace revadv
