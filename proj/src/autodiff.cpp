#include "revadv/autodiff.hpp"

#include <algorithm>
#include <cmath>

#include "revadv/errors.hpp"

namespace revadv {

std::vector<float> softmax(const std::vector<float>& logits) {
    float mx = *std::max_element(logits.begin(), logits.end());
    std::vector<float> p(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - mx);
        sum += p[i];
    }
    for (auto& v : p) v = static_cast<float>(v / sum);
    return p;
}

Graph::NodeId Graph::push(Node n) {
    nodes_.push_back(std::move(n));
    return static_cast<NodeId>(nodes_.size() - 1);
}

Graph::NodeId Graph::input(Tensor value) {
    Node n;
    n.kind = Kind::Input;
    n.out = std::move(value);
    return push(std::move(n));
}

Graph::NodeId Graph::dense(NodeId x, NodeId w, NodeId b) {
    const Tensor& xv = value(x);
    const Tensor& wv = value(w);
    const Tensor& bv = value(b);
    if (wv.rank() != 2)
        throw ShapeError("dense: weight must be rank 2, got " + shape_str(wv.shape));
    const int out = wv.dim(0), in = wv.dim(1);
    if (static_cast<int>(xv.numel()) != in)
        throw ShapeError("dense: input numel " + std::to_string(xv.numel()) +
                         " != weight columns " + std::to_string(in));
    if (static_cast<int>(bv.numel()) != out)
        throw ShapeError("dense: bias numel " + std::to_string(bv.numel()) + " != weight rows " +
                         std::to_string(out));
    Node n;
    n.kind = Kind::Dense;
    n.inputs = {x, w, b};
    Tensor y = Tensor::zeros({out});
    for (int o = 0; o < out; ++o) {
        double acc = bv.data[static_cast<std::size_t>(o)];
        const float* wrow = &wv.data[static_cast<std::size_t>(o) * static_cast<std::size_t>(in)];
        for (int i = 0; i < in; ++i) acc += static_cast<double>(wrow[i]) * xv.data[static_cast<std::size_t>(i)];
        y.data[static_cast<std::size_t>(o)] = static_cast<float>(acc);
    }
    n.out = std::move(y);
    return push(std::move(n));
}

Graph::NodeId Graph::conv2d(NodeId x, NodeId k, NodeId b) {
    const Tensor& xv = value(x);
    const Tensor& kv = value(k);
    const Tensor& bv = value(b);
    if (xv.rank() != 3)
        throw ShapeError("conv2d: input must be rank 3 [H,W,C], got " + shape_str(xv.shape));
    if (kv.rank() != 4)
        throw ShapeError("conv2d: kernel must be rank 4 [kh,kw,Cin,Cout], got " + shape_str(kv.shape));
    const int h = xv.dim(0), w = xv.dim(1), cin = xv.dim(2);
    const int kh = kv.dim(0), kw = kv.dim(1), kcin = kv.dim(2), cout = kv.dim(3);
    if (kcin != cin)
        throw ShapeError("conv2d: kernel Cin " + std::to_string(kcin) + " != input C " +
                         std::to_string(cin));
    if (kh % 2 == 0 || kw % 2 == 0)
        throw ShapeError("conv2d: kernel size must be odd for same padding, got " +
                         shape_str(kv.shape));
    if (static_cast<int>(bv.numel()) != cout)
        throw ShapeError("conv2d: bias numel " + std::to_string(bv.numel()) + " != Cout " +
                         std::to_string(cout));
    const int ph = kh / 2, pw = kw / 2;
    Node n;
    n.kind = Kind::Conv2d;
    n.inputs = {x, k, b};
    Tensor y = Tensor::zeros({h, w, cout});
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            for (int oc = 0; oc < cout; ++oc) {
                double acc = bv.data[static_cast<std::size_t>(oc)];
                for (int di = 0; di < kh; ++di) {
                    const int si = i + di - ph;
                    if (si < 0 || si >= h) continue;
                    for (int dj = 0; dj < kw; ++dj) {
                        const int sj = j + dj - pw;
                        if (sj < 0 || sj >= w) continue;
                        const float* xp = &xv.data[static_cast<std::size_t>((si * w + sj) * cin)];
                        const float* kp = &kv.data[static_cast<std::size_t>(((di * kw + dj) * cin) * cout + oc)];
                        for (int c = 0; c < cin; ++c) acc += static_cast<double>(xp[c]) * kp[static_cast<std::size_t>(c) * static_cast<std::size_t>(cout)];
                    }
                }
                y.at3(i, j, oc) = static_cast<float>(acc);
            }
        }
    }
    n.out = std::move(y);
    return push(std::move(n));
}

Graph::NodeId Graph::relu(NodeId x) {
    Node n;
    n.kind = Kind::Relu;
    n.inputs = {x};
    n.out = value(x);
    for (auto& v : n.out.data) v = v > 0.0f ? v : 0.0f;
    return push(std::move(n));
}

Graph::NodeId Graph::maxpool2x2(NodeId x) {
    const Tensor& xv = value(x);
    if (xv.rank() != 3)
        throw ShapeError("maxpool2x2: input must be rank 3, got " + shape_str(xv.shape));
    const int h = xv.dim(0), w = xv.dim(1), c = xv.dim(2);
    if (h % 2 != 0 || w % 2 != 0)
        throw ShapeError("maxpool2x2: H and W must be even, got " + shape_str(xv.shape));
    Node n;
    n.kind = Kind::MaxPool2x2;
    n.inputs = {x};
    Tensor y = Tensor::zeros({h / 2, w / 2, c});
    n.arg_index.resize(y.numel());
    for (int i = 0; i < h / 2; ++i) {
        for (int j = 0; j < w / 2; ++j) {
            for (int ch = 0; ch < c; ++ch) {
                int best = ((2 * i) * w + 2 * j) * c + ch;
                float bv = xv.data[static_cast<std::size_t>(best)];
                // ties keep the first candidate in scan order
                for (int di = 0; di < 2; ++di) {
                    for (int dj = 0; dj < 2; ++dj) {
                        const int idx = ((2 * i + di) * w + 2 * j + dj) * c + ch;
                        if (xv.data[static_cast<std::size_t>(idx)] > bv) {
                            bv = xv.data[static_cast<std::size_t>(idx)];
                            best = idx;
                        }
                    }
                }
                const std::size_t oidx = static_cast<std::size_t>((i * (w / 2) + j) * c + ch);
                y.data[oidx] = bv;
                n.arg_index[oidx] = best;
            }
        }
    }
    n.out = std::move(y);
    return push(std::move(n));
}

Graph::NodeId Graph::add(NodeId a, NodeId b) {
    const Tensor& av = value(a);
    const Tensor& bv = value(b);
    if (!av.same_shape(bv))
        throw ShapeError("add: shape mismatch " + shape_str(av.shape) + " vs " + shape_str(bv.shape));
    Node n;
    n.kind = Kind::Add;
    n.inputs = {a, b};
    n.out = av;
    for (std::size_t i = 0; i < n.out.data.size(); ++i) n.out.data[i] += bv.data[i];
    return push(std::move(n));
}

Graph::NodeId Graph::scale(NodeId x, float c) {
    Node n;
    n.kind = Kind::Scale;
    n.inputs = {x};
    n.scalar = c;
    n.out = value(x);
    for (auto& v : n.out.data) v *= c;
    return push(std::move(n));
}

Graph::NodeId Graph::softmax_cross_entropy(NodeId logits, int label) {
    const Tensor& lv = value(logits);
    if (lv.rank() != 1)
        throw ShapeError("softmax_cross_entropy: logits must be rank 1, got " + shape_str(lv.shape));
    const int k = lv.dim(0);
    if (label < 0 || label >= k)
        throw ShapeError("softmax_cross_entropy: label " + std::to_string(label) +
                         " out of range for K=" + std::to_string(k));
    Node n;
    n.kind = Kind::SoftmaxCE;
    n.inputs = {logits};
    n.label = label;
    n.softmax = softmax(lv.data);
    const float mx = *std::max_element(lv.data.begin(), lv.data.end());
    double lse = 0.0;
    for (float v : lv.data) lse += std::exp(static_cast<double>(v - mx));
    const double loss = std::log(lse) + mx - lv.data[static_cast<std::size_t>(label)];
    n.out = Tensor({1}, {static_cast<float>(loss)});
    return push(std::move(n));
}

std::unordered_map<Graph::NodeId, Tensor> Graph::backward(NodeId loss) const {
    const Node& ln = nodes_[static_cast<std::size_t>(loss)];
    if (ln.out.numel() != 1) throw ShapeError("backward: loss must be scalar");

    std::vector<Tensor> grads(nodes_.size());
    std::vector<bool> has_grad(nodes_.size(), false);
    auto accum = [&](NodeId id, std::size_t at, float g) {
        auto idx = static_cast<std::size_t>(id);
        if (!has_grad[idx]) {
            grads[idx] = Tensor::zeros(nodes_[idx].out.shape);
            has_grad[idx] = true;
        }
        grads[idx].data[at] += g;
    };

    grads[static_cast<std::size_t>(loss)] = Tensor({1}, {1.0f});
    has_grad[static_cast<std::size_t>(loss)] = true;

    for (NodeId id = loss; id >= 0; --id) {
        const auto idx = static_cast<std::size_t>(id);
        if (!has_grad[idx]) continue;
        const Node& n = nodes_[idx];
        const Tensor& g = grads[idx];
        switch (n.kind) {
            case Kind::Input:
                break;
            case Kind::Dense: {
                const Tensor& xv = in(n, 0);
                const Tensor& wv = in(n, 1);
                const int out = wv.dim(0), cnt = wv.dim(1);
                for (int o = 0; o < out; ++o) {
                    const float go = g.data[static_cast<std::size_t>(o)];
                    if (go == 0.0f) continue;
                    const std::size_t row = static_cast<std::size_t>(o) * static_cast<std::size_t>(cnt);
                    for (int i = 0; i < cnt; ++i) {
                        accum(n.inputs[0], static_cast<std::size_t>(i), go * wv.data[row + static_cast<std::size_t>(i)]);
                        accum(n.inputs[1], row + static_cast<std::size_t>(i), go * xv.data[static_cast<std::size_t>(i)]);
                    }
                    accum(n.inputs[2], static_cast<std::size_t>(o), go);
                }
                break;
            }
            case Kind::Conv2d: {
                const Tensor& xv = in(n, 0);
                const Tensor& kv = in(n, 1);
                const int h = xv.dim(0), w = xv.dim(1), cin = xv.dim(2);
                const int kh = kv.dim(0), kw = kv.dim(1), cout = kv.dim(3);
                const int ph = kh / 2, pw = kw / 2;
                for (int i = 0; i < h; ++i) {
                    for (int j = 0; j < w; ++j) {
                        for (int oc = 0; oc < cout; ++oc) {
                            const float go = g.data[static_cast<std::size_t>((i * w + j) * cout + oc)];
                            if (go == 0.0f) continue;
                            accum(n.inputs[2], static_cast<std::size_t>(oc), go);
                            for (int di = 0; di < kh; ++di) {
                                const int si = i + di - ph;
                                if (si < 0 || si >= h) continue;
                                for (int dj = 0; dj < kw; ++dj) {
                                    const int sj = j + dj - pw;
                                    if (sj < 0 || sj >= w) continue;
                                    for (int c = 0; c < cin; ++c) {
                                        const std::size_t xi = static_cast<std::size_t>((si * w + sj) * cin + c);
                                        const std::size_t ki = static_cast<std::size_t>(((di * kw + dj) * cin + c) * cout + oc);
                                        accum(n.inputs[0], xi, go * kv.data[ki]);
                                        accum(n.inputs[1], ki, go * xv.data[xi]);
                                    }
                                }
                            }
                        }
                    }
                }
                break;
            }
            case Kind::Relu: {
                const Tensor& xv = in(n, 0);
                for (std::size_t i = 0; i < xv.data.size(); ++i) {
                    if (xv.data[i] > 0.0f && g.data[i] != 0.0f) accum(n.inputs[0], i, g.data[i]);
                }
                break;
            }
            case Kind::MaxPool2x2: {
                for (std::size_t i = 0; i < g.data.size(); ++i) {
                    if (g.data[i] != 0.0f) accum(n.inputs[0], static_cast<std::size_t>(n.arg_index[i]), g.data[i]);
                }
                break;
            }
            case Kind::Add: {
                for (std::size_t i = 0; i < g.data.size(); ++i) {
                    if (g.data[i] == 0.0f) continue;
                    accum(n.inputs[0], i, g.data[i]);
                    accum(n.inputs[1], i, g.data[i]);
                }
                break;
            }
            case Kind::Scale: {
                for (std::size_t i = 0; i < g.data.size(); ++i) {
                    if (g.data[i] != 0.0f) accum(n.inputs[0], i, g.data[i] * n.scalar);
                }
                break;
            }
            case Kind::SoftmaxCE: {
                const float go = g.data[0];
                for (std::size_t i = 0; i < n.softmax.size(); ++i) {
                    const float onehot = (static_cast<int>(i) == n.label) ? 1.0f : 0.0f;
                    accum(n.inputs[0], i, go * (n.softmax[i] - onehot));
                }
                break;
            }
        }
    }

    std::unordered_map<NodeId, Tensor> result;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].kind != Kind::Input) continue;
        if (has_grad[i])
            result.emplace(static_cast<NodeId>(i), std::move(grads[i]));
        else
            result.emplace(static_cast<NodeId>(i), Tensor::zeros(nodes_[i].out.shape));
    }
    return result;
}

Tensor finite_diff_grad(const std::function<float(const Tensor&)>& f, const Tensor& x, float h) {
    if (!(h > 0.0f)) throw ShapeError("finite_diff_grad: h must be positive");
    Tensor g = Tensor::zeros(x.shape);
    Tensor probe = x;
    for (std::size_t i = 0; i < x.data.size(); ++i) {
        const float orig = probe.data[i];
        probe.data[i] = orig + h;
        const float fp = f(probe);
        probe.data[i] = orig - h;
        const float fm = f(probe);
        probe.data[i] = orig;
        g.data[i] = (fp - fm) / (2.0f * h);
    }
    return g;
}

}  // namespace revadv
