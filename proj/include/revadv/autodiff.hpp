#pragma once

#include <functional>
#include <unordered_map>
#include <vector>

#include "revadv/tensor.hpp"

namespace revadv {

/// Tape of recorded primitive operations in topological order. One forward
/// pass builds the tape; backward() replays it once in reverse. Immutable
/// after the forward pass; a single graph is not thread safe.
class Graph {
  public:
    using NodeId = int;

    NodeId input(Tensor value);  // leaf

    /// y = W x + b with x flattened row-major. W: [out, in], b: [out].
    NodeId dense(NodeId x, NodeId w, NodeId b);
    /// Same-padding stride-1 conv. x: [H,W,Cin], k: [kh,kw,Cin,Cout], b: [Cout].
    NodeId conv2d(NodeId x, NodeId k, NodeId b);
    NodeId relu(NodeId x);
    NodeId maxpool2x2(NodeId x);             // H, W must be even
    NodeId add(NodeId a, NodeId b);          // elementwise, same shape
    NodeId scale(NodeId x, float c);
    /// Scalar loss: -log softmax(logits)[label]. logits: [K].
    NodeId softmax_cross_entropy(NodeId logits, int label);

    const Tensor& value(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].out; }
    bool is_leaf(NodeId id) const { return nodes_[static_cast<std::size_t>(id)].kind == Kind::Input; }
    int size() const { return static_cast<int>(nodes_.size()); }

    /// Gradient of a scalar loss node with respect to every leaf input.
    std::unordered_map<NodeId, Tensor> backward(NodeId loss) const;

  private:
    enum class Kind { Input, Dense, Conv2d, Relu, MaxPool2x2, Add, Scale, SoftmaxCE };

    struct Node {
        Kind kind;
        std::vector<NodeId> inputs;
        Tensor out;
        // Saved forward context for the backward rule.
        std::vector<int> arg_index;  // maxpool winners
        float scalar = 0.0f;         // scale factor
        int label = -1;              // cross-entropy target
        std::vector<float> softmax;  // cached probabilities
    };

    NodeId push(Node n);
    const Tensor& in(const Node& n, int i) const {
        return nodes_[static_cast<std::size_t>(n.inputs[static_cast<std::size_t>(i)])].out;
    }

    std::vector<Node> nodes_;
};

/// Central finite-difference gradient: (f(x+h e_i) - f(x-h e_i)) / 2h.
/// Test oracle; independent of Graph::backward.
Tensor finite_diff_grad(const std::function<float(const Tensor&)>& f, const Tensor& x, float h);

/// Numerically stable softmax of a logit vector.
std::vector<float> softmax(const std::vector<float>& logits);

}  // namespace revadv
