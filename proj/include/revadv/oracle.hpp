#pragma once

#include <memory>
#include <vector>

#include "revadv/tensor.hpp"
#include "revadv/zoo.hpp"

namespace revadv {

struct LabelProb {
    int label = -1;
    float prob = 0.0f;
};

/// Descending by probability, ties by ascending label; possibly truncated.
using Classification = std::vector<LabelProb>;

/// Query-only classifier view: label probabilities for an image in [0,1].
/// Implementations quantize the input to 8 bits first, so the in-process
/// path and the PNG wire path see byte-identical pixels.
class QueryOracle {
  public:
    virtual ~QueryOracle() = default;
    virtual Classification classify(const Tensor& image) = 0;
};

/// P(y) if y appears in the (possibly truncated) list, else 0.
float prob_of_label(const Classification& cls, int label);

/// Wraps a zoo model. top_k == 0 returns the full distribution.
class LocalOracle : public QueryOracle {
  public:
    LocalOracle(ModelSpec spec, Weights weights, int top_k = 0);
    Classification classify(const Tensor& image) override;
    const ModelSpec& spec() const { return spec_; }

  private:
    ModelSpec spec_;
    Weights weights_;
    int top_k_;
};

/// Shared ranking used by every oracle implementation.
Classification rank_probabilities(const std::vector<float>& probs, int top_k);

}  // namespace revadv
