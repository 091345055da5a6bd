#include "revadv/zoo.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <future>
#include <numeric>
#include <thread>

#include "revadv/crc32.hpp"
#include "revadv/errors.hpp"
#include "revadv/imageio.hpp"
#include "revadv/rng.hpp"

namespace revadv {

Arch arch_from_string(const std::string& name) {
    if (name == "mlp") return Arch::Mlp;
    if (name == "cnn-a") return Arch::CnnA;
    if (name == "cnn-res") return Arch::CnnRes;
    throw FormatError("unknown architecture '" + name + "' (mlp | cnn-a | cnn-res)");
}

std::string arch_to_string(Arch arch) {
    switch (arch) {
        case Arch::Mlp: return "mlp";
        case Arch::CnnA: return "cnn-a";
        case Arch::CnnRes: return "cnn-res";
    }
    return "?";
}

void ModelSpec::validate() const {
    if (classes < 2) throw ShapeError("model spec: class count must be >= 2");
    if (height < 4 || width < 4 || channels < 1)
        throw ShapeError("model spec: input shape too small");
    if ((arch == Arch::CnnA && (height % 4 != 0 || width % 4 != 0)) ||
        (arch == Arch::CnnRes && (height % 2 != 0 || width % 2 != 0)))
        throw ShapeError("model spec: input size must be divisible by the pooling factor");
}

const Tensor& Weights::get(const std::string& name) const {
    for (const auto& [n, t] : tensors)
        if (n == name) return t;
    throw FormatError("weights: missing tensor '" + name + "'");
}

bool Weights::operator==(const Weights& o) const {
    if (tensors.size() != o.tensors.size()) return false;
    for (std::size_t i = 0; i < tensors.size(); ++i) {
        if (tensors[i].first != o.tensors[i].first) return false;
        if (tensors[i].second.shape != o.tensors[i].second.shape) return false;
        if (tensors[i].second.data != o.tensors[i].second.data) return false;
    }
    return true;
}

namespace {

constexpr int kConvA1 = 8, kConvA2 = 12, kConvRes = 8, kMlpHidden = 64;

Tensor he_normal(std::vector<int> shape, Rng& rng, int fan_in) {
    return Tensor::normal(std::move(shape), rng,
                          0.0f, std::sqrt(2.0f / static_cast<float>(fan_in)));
}

}  // namespace

Weights init_weights(const ModelSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    const int in = spec.height * spec.width * spec.channels;
    Weights w;
    switch (spec.arch) {
        case Arch::Mlp: {
            w.tensors.emplace_back("fc1.w", he_normal({kMlpHidden, in}, rng, in));
            w.tensors.emplace_back("fc1.b", Tensor::zeros({kMlpHidden}));
            w.tensors.emplace_back("fc2.w", he_normal({spec.classes, kMlpHidden}, rng, kMlpHidden));
            w.tensors.emplace_back("fc2.b", Tensor::zeros({spec.classes}));
            break;
        }
        case Arch::CnnA: {
            w.tensors.emplace_back("conv1.k",
                                   he_normal({3, 3, spec.channels, kConvA1}, rng, 9 * spec.channels));
            w.tensors.emplace_back("conv1.b", Tensor::zeros({kConvA1}));
            w.tensors.emplace_back("conv2.k", he_normal({3, 3, kConvA1, kConvA2}, rng, 9 * kConvA1));
            w.tensors.emplace_back("conv2.b", Tensor::zeros({kConvA2}));
            const int fc_in = (spec.height / 4) * (spec.width / 4) * kConvA2;
            w.tensors.emplace_back("fc.w", he_normal({spec.classes, fc_in}, rng, fc_in));
            w.tensors.emplace_back("fc.b", Tensor::zeros({spec.classes}));
            break;
        }
        case Arch::CnnRes: {
            w.tensors.emplace_back("conv1.k",
                                   he_normal({3, 3, spec.channels, kConvRes}, rng, 9 * spec.channels));
            w.tensors.emplace_back("conv1.b", Tensor::zeros({kConvRes}));
            w.tensors.emplace_back("res1.k", he_normal({3, 3, kConvRes, kConvRes}, rng, 9 * kConvRes));
            w.tensors.emplace_back("res1.b", Tensor::zeros({kConvRes}));
            w.tensors.emplace_back("res2.k", he_normal({3, 3, kConvRes, kConvRes}, rng, 9 * kConvRes));
            w.tensors.emplace_back("res2.b", Tensor::zeros({kConvRes}));
            const int fc_in = (spec.height / 2) * (spec.width / 2) * kConvRes;
            w.tensors.emplace_back("fc.w", he_normal({spec.classes, fc_in}, rng, fc_in));
            w.tensors.emplace_back("fc.b", Tensor::zeros({spec.classes}));
            break;
        }
    }
    return w;
}

Graph::NodeId model_forward(Graph& graph, const ModelSpec& spec, const Weights& weights,
                            Graph::NodeId input,
                            std::vector<std::pair<std::string, Graph::NodeId>>* weight_nodes) {
    const Tensor& in = graph.value(input);
    if (in.shape != std::vector<int>{spec.height, spec.width, spec.channels})
        throw ShapeError("model_forward: input " + shape_str(in.shape) + " does not match spec [" +
                         std::to_string(spec.height) + "x" + std::to_string(spec.width) + "x" +
                         std::to_string(spec.channels) + "]");
    auto leaf = [&](const std::string& name) {
        const Graph::NodeId id = graph.input(weights.get(name));
        if (weight_nodes) weight_nodes->emplace_back(name, id);
        return id;
    };
    // fixed input standardization: (x - 0.5) * 4, so preactivations start
    // near unit scale regardless of the [0,1] pixel mean
    const auto offset = graph.input(Tensor::full({spec.height, spec.width, spec.channels}, -0.5f));
    input = graph.scale(graph.add(input, offset), 4.0f);
    // leaves hoisted into locals: argument evaluation order is unspecified
    switch (spec.arch) {
        case Arch::Mlp: {
            const auto w1 = leaf("fc1.w"), b1 = leaf("fc1.b");
            const auto h = graph.relu(graph.dense(input, w1, b1));
            const auto w2 = leaf("fc2.w"), b2 = leaf("fc2.b");
            return graph.dense(h, w2, b2);
        }
        case Arch::CnnA: {
            const auto k1 = leaf("conv1.k"), cb1 = leaf("conv1.b");
            auto h = graph.maxpool2x2(graph.relu(graph.conv2d(input, k1, cb1)));
            const auto k2 = leaf("conv2.k"), cb2 = leaf("conv2.b");
            h = graph.maxpool2x2(graph.relu(graph.conv2d(h, k2, cb2)));
            const auto fw = leaf("fc.w"), fb = leaf("fc.b");
            return graph.dense(h, fw, fb);
        }
        case Arch::CnnRes: {
            const auto k1 = leaf("conv1.k"), cb1 = leaf("conv1.b");
            const auto h = graph.relu(graph.conv2d(input, k1, cb1));
            const auto r1 = leaf("res1.k"), rb1 = leaf("res1.b");
            auto r = graph.relu(graph.conv2d(h, r1, rb1));
            const auto r2 = leaf("res2.k"), rb2 = leaf("res2.b");
            r = graph.conv2d(r, r2, rb2);
            const auto merged = graph.relu(graph.add(h, r));  // additive skip
            const auto pooled = graph.maxpool2x2(merged);
            const auto fw = leaf("fc.w"), fb = leaf("fc.b");
            return graph.dense(pooled, fw, fb);
        }
    }
    throw ShapeError("model_forward: unreachable architecture");
}

std::vector<float> predict(const ModelSpec& spec, const Weights& weights, const Tensor& image) {
    Graph graph;
    const auto logits = model_forward(graph, spec, weights, graph.input(image));
    return softmax(graph.value(logits).data);
}

int argmax(const std::vector<float>& probs) {
    return static_cast<int>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

namespace {

struct GradAccum {
    std::vector<Tensor> grads;  // aligned with weights.tensors
    double loss = 0.0;
};

GradAccum item_gradients(const ModelSpec& spec, const Weights& weights, const Tensor& image,
                         int label) {
    Graph graph;
    const auto input = graph.input(image);
    std::vector<std::pair<std::string, Graph::NodeId>> wnodes;
    const auto logits = model_forward(graph, spec, weights, input, &wnodes);
    const auto loss = graph.softmax_cross_entropy(logits, label);
    auto grad_map = graph.backward(loss);
    GradAccum out;
    out.loss = graph.value(loss).data[0];
    out.grads.reserve(weights.tensors.size());
    // match gradients to weights by name, not leaf registration order
    for (const auto& [name, tensor] : weights.tensors) {
        for (const auto& [wname, id] : wnodes) {
            if (wname == name) {
                out.grads.push_back(std::move(grad_map.at(id)));
                break;
            }
        }
    }
    if (out.grads.size() != weights.tensors.size())
        throw TrainError("train: gradient bookkeeping lost a weight tensor");
    return out;
}

}  // namespace

TrainResult train(const ModelSpec& spec, const LabeledDataset& data, const TrainConfig& cfg) {
    spec.validate();
    data.validate();
    if (data.size() == 0) throw TrainError("train: empty dataset");
    if (cfg.epochs < 1) throw TrainError("train: epochs must be >= 1");
    if (data.classes > spec.classes)
        throw ShapeError("train: dataset has more classes than the model");

    Weights weights = init_weights(spec, cfg.seed);
    std::vector<Tensor> velocity;
    for (const auto& [name, t] : weights.tensors) velocity.push_back(Tensor::zeros(t.shape));

    Rng rng(cfg.seed ^ 0xD1CEull);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), 0);

    const int threads = std::max(1, cfg.threads);
    TrainResult result;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        // Fisher-Yates with our deterministic rng
        for (std::size_t i = order.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1));
            std::swap(order[i - 1], order[j]);
        }
        double epoch_loss = 0.0;
        for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(cfg.batch)) {
            const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(cfg.batch));
            std::vector<GradAccum> parts(end - start);
            if (threads == 1) {
                for (std::size_t i = start; i < end; ++i)
                    parts[i - start] = item_gradients(spec, weights, to_unit(data.images[order[i]]),
                                                      data.labels[order[i]]);
            } else {
                std::vector<std::future<GradAccum>> futs;
                for (std::size_t i = start; i < end; ++i) {
                    futs.push_back(std::async(std::launch::async, [&, i] {
                        return item_gradients(spec, weights, to_unit(data.images[order[i]]),
                                              data.labels[order[i]]);
                    }));
                }
                for (std::size_t i = 0; i < futs.size(); ++i) parts[i] = futs[i].get();
            }
            const float inv = 1.0f / static_cast<float>(end - start);
            for (std::size_t w = 0; w < weights.tensors.size(); ++w) {
                auto& vel = velocity[w];
                auto& wt = weights.tensors[w].second;
                for (std::size_t k = 0; k < wt.data.size(); ++k) {
                    float g = 0.0f;
                    for (const auto& p : parts) g += p.grads[w].data[k];
                    vel.data[k] = cfg.momentum * vel.data[k] - cfg.lr * g * inv;
                    wt.data[k] += vel.data[k];
                }
            }
            for (const auto& p : parts) epoch_loss += p.loss;
            if (!std::isfinite(epoch_loss))
                throw TrainError("train: loss diverged at epoch " + std::to_string(epoch));
        }
        result.epochs_run = epoch + 1;
        result.epoch_losses.push_back(epoch_loss / static_cast<double>(data.size()));

        if (cfg.stop_accuracy > 0.0 || epoch + 1 == cfg.epochs) {
            std::size_t hits = 0;
            for (std::size_t i = 0; i < data.size(); ++i) {
                const auto probs = predict(spec, weights, to_unit(data.images[i]));
                if (argmax(probs) == data.labels[i]) ++hits;
            }
            result.train_accuracy = static_cast<double>(hits) / static_cast<double>(data.size());
            if (result.train_accuracy >= cfg.stop_accuracy && cfg.stop_accuracy > 0.0) break;
        }
    }
    result.weights = std::move(weights);
    return result;
}

// ---------------------------------------------------------------------------
// Weight file format
// ---------------------------------------------------------------------------

namespace {

void put_u16be(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
}

struct Reader {
    const std::vector<std::uint8_t>& bytes;
    std::size_t pos = 0;
    const std::string& path;

    void need(std::size_t n) const {
        if (pos + n > bytes.size())
            throw FormatError("weights: truncated file " + path + " at byte offset " +
                              std::to_string(pos) + " (need " + std::to_string(n) + " more)");
    }
    std::uint8_t u8() {
        need(1);
        return bytes[pos++];
    }
    std::uint16_t u16() {
        need(2);
        const auto v = static_cast<std::uint16_t>((bytes[pos] << 8) | bytes[pos + 1]);
        pos += 2;
        return v;
    }
    std::uint32_t u32() {
        need(4);
        const auto v = (static_cast<std::uint32_t>(bytes[pos]) << 24) |
                       (static_cast<std::uint32_t>(bytes[pos + 1]) << 16) |
                       (static_cast<std::uint32_t>(bytes[pos + 2]) << 8) |
                       static_cast<std::uint32_t>(bytes[pos + 3]);
        pos += 4;
        return v;
    }
};

}  // namespace

void save_weights(const std::string& path, const ModelSpec& spec, const Weights& weights) {
    std::vector<std::uint8_t> out = {'R', 'V', 'W', 'T', 1, static_cast<std::uint8_t>(spec.arch)};
    put_u16be(out, static_cast<std::uint16_t>(spec.height));
    put_u16be(out, static_cast<std::uint16_t>(spec.width));
    put_u16be(out, static_cast<std::uint16_t>(spec.channels));
    put_u16be(out, static_cast<std::uint16_t>(spec.classes));
    put_u32be(out, static_cast<std::uint32_t>(weights.tensors.size()));
    for (const auto& [name, t] : weights.tensors) {
        put_u16be(out, static_cast<std::uint16_t>(name.size()));
        out.insert(out.end(), name.begin(), name.end());
        out.push_back(static_cast<std::uint8_t>(t.rank()));
        for (int d : t.shape) put_u32be(out, static_cast<std::uint32_t>(d));
        for (float f : t.data) {
            std::uint32_t bits;
            std::memcpy(&bits, &f, 4);
            out.push_back(static_cast<std::uint8_t>(bits & 0xFF));
            out.push_back(static_cast<std::uint8_t>((bits >> 8) & 0xFF));
            out.push_back(static_cast<std::uint8_t>((bits >> 16) & 0xFF));
            out.push_back(static_cast<std::uint8_t>((bits >> 24) & 0xFF));
        }
    }
    put_u32be(out, crc32(out.data(), out.size()));
    write_file(path, out);
}

std::pair<ModelSpec, Weights> load_weights(const std::string& path) {
    const auto bytes = read_file(path);
    Reader r{bytes, 0, path};
    r.need(5);
    if (std::memcmp(bytes.data(), "RVWT", 4) != 0)
        throw FormatError("weights: bad magic in " + path);
    r.pos = 4;
    if (r.u8() != 1) throw FormatError("weights: unsupported version in " + path);
    ModelSpec spec;
    const auto arch = r.u8();
    if (arch > 2) throw FormatError("weights: unknown architecture id in " + path);
    spec.arch = static_cast<Arch>(arch);
    spec.height = r.u16();
    spec.width = r.u16();
    spec.channels = r.u16();
    spec.classes = r.u16();
    const std::uint32_t count = r.u32();
    Weights w;
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint16_t name_len = r.u16();
        r.need(name_len);
        std::string name(bytes.begin() + static_cast<std::ptrdiff_t>(r.pos),
                         bytes.begin() + static_cast<std::ptrdiff_t>(r.pos + name_len));
        r.pos += name_len;
        const int rank = r.u8();
        std::vector<int> shape;
        for (int d = 0; d < rank; ++d) shape.push_back(static_cast<int>(r.u32()));
        const std::size_t numel = shape_numel(shape);
        r.need(numel * 4);
        std::vector<float> data(numel);
        for (std::size_t k = 0; k < numel; ++k) {
            const std::uint32_t bits = static_cast<std::uint32_t>(bytes[r.pos]) |
                                       (static_cast<std::uint32_t>(bytes[r.pos + 1]) << 8) |
                                       (static_cast<std::uint32_t>(bytes[r.pos + 2]) << 16) |
                                       (static_cast<std::uint32_t>(bytes[r.pos + 3]) << 24);
            float f;
            std::memcpy(&f, &bits, 4);
            data[k] = f;
            r.pos += 4;
        }
        w.tensors.emplace_back(std::move(name), Tensor(std::move(shape), std::move(data)));
    }
    const std::uint32_t stored = r.u32();
    if (r.pos != bytes.size())
        throw FormatError("weights: " + std::to_string(bytes.size() - r.pos) +
                          " trailing bytes in " + path);
    if (crc32(bytes.data(), bytes.size() - 4) != stored)
        throw IntegrityError("weights: CRC mismatch in " + path);

    // Shape sanity against the declared spec: rebuild reference shapes.
    const Weights ref = init_weights(spec, 0);
    if (ref.tensors.size() != w.tensors.size())
        throw FormatError("weights: tensor count does not match architecture in " + path);
    for (std::size_t i = 0; i < ref.tensors.size(); ++i) {
        if (ref.tensors[i].first != w.tensors[i].first ||
            ref.tensors[i].second.shape != w.tensors[i].second.shape)
            throw FormatError("weights: tensor '" + w.tensors[i].first +
                              "' does not match the declared architecture in " + path);
        if (!w.tensors[i].second.all_finite())
            throw FormatError("weights: non-finite values in tensor '" + w.tensors[i].first +
                              "' in " + path);
    }
    return {spec, std::move(w)};
}

}  // namespace revadv
