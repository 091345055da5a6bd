#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "revadv/autodiff.hpp"
#include "revadv/dataset.hpp"
#include "revadv/tensor.hpp"

namespace revadv {

enum class Arch : std::uint8_t { Mlp = 0, CnnA = 1, CnnRes = 2 };

Arch arch_from_string(const std::string& name);
std::string arch_to_string(Arch arch);

struct ModelSpec {
    Arch arch = Arch::Mlp;
    int height = 32;
    int width = 32;
    int channels = 3;
    int classes = 10;

    void validate() const;
    bool operator==(const ModelSpec& o) const = default;
};

struct Weights {
    std::vector<std::pair<std::string, Tensor>> tensors;

    const Tensor& get(const std::string& name) const;
    bool operator==(const Weights& o) const;
};

Weights init_weights(const ModelSpec& spec, std::uint64_t seed);

/// Builds the model forward pass on the graph. Returns the logits node;
/// `weight_nodes` (when non-null) receives the leaf id of every weight
/// tensor so a training step can fetch their gradients.
Graph::NodeId model_forward(Graph& graph, const ModelSpec& spec, const Weights& weights,
                            Graph::NodeId input,
                            std::vector<std::pair<std::string, Graph::NodeId>>* weight_nodes = nullptr);

/// Softmax class probabilities for one image in [0,1], shape [H,W,C].
std::vector<float> predict(const ModelSpec& spec, const Weights& weights, const Tensor& image);

int argmax(const std::vector<float>& probs);

struct TrainConfig {
    int epochs = 10;
    float lr = 0.05f;
    float momentum = 0.9f;
    int batch = 32;
    std::uint64_t seed = 1;
    double stop_accuracy = 0.0;  // stop once training accuracy reaches this (0 = never)
    int threads = 1;
};

struct TrainResult {
    Weights weights;
    double train_accuracy = 0.0;
    int epochs_run = 0;
    std::vector<double> epoch_losses;  // mean per-item loss per epoch
};

TrainResult train(const ModelSpec& spec, const LabeledDataset& data, const TrainConfig& cfg);

/// Weight file: "RVWT" | version u8 | arch u8 | H u16 | W u16 | C u16 |
/// K u16 | tensor count u32 | per tensor (name len u16, name, rank u8,
/// dims u32..., float32 little-endian data) | CRC-32. Integers big-endian.
void save_weights(const std::string& path, const ModelSpec& spec, const Weights& weights);
std::pair<ModelSpec, Weights> load_weights(const std::string& path);

}  // namespace revadv
