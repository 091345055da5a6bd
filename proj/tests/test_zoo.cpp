#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "revadv/errors.hpp"
#include "revadv/imageio.hpp"
#include "revadv/rng.hpp"
#include "revadv/zoo.hpp"

using namespace revadv;
namespace fs = std::filesystem;

namespace {

// Two linearly separable classes: bright vs dark mean with mild noise.
LabeledDataset separable_blobs(int n, std::uint64_t seed) {
    Rng rng(seed);
    LabeledDataset data;
    data.classes = 2;
    for (int i = 0; i < n; ++i) {
        const int label = i % 2;
        const int base = label == 0 ? 80 : 176;
        ImageU8 img = ImageU8::make(8, 8, 1);
        for (auto& v : img.data)
            v = static_cast<std::uint8_t>(std::clamp(base + rng.uniform_int(-24, 24), 0, 255));
        data.images.push_back(std::move(img));
        data.labels.push_back(label);
    }
    return data;
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("revadv_test_" + name);
}

}  // namespace

TEST_CASE("training separable blobs reaches high accuracy and is reproducible") {
    const LabeledDataset data = separable_blobs(64, 5);
    ModelSpec spec{Arch::Mlp, 8, 8, 1, 2};
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.lr = 0.05f;
    cfg.batch = 8;
    cfg.seed = 7;
    const TrainResult a = train(spec, data, cfg);
    CHECK(a.train_accuracy >= 0.99);

    const TrainResult b = train(spec, data, cfg);
    CHECK(a.weights == b.weights);

    TrainConfig zero = cfg;
    zero.epochs = 0;
    CHECK_THROWS_AS(train(spec, data, zero), TrainError);
}

TEST_CASE("threaded gradient accumulation matches single-threaded training") {
    const LabeledDataset data = separable_blobs(32, 9);
    ModelSpec spec{Arch::CnnA, 8, 8, 1, 2};
    TrainConfig cfg;
    cfg.epochs = 2;
    cfg.seed = 3;
    cfg.batch = 8;
    cfg.threads = 1;
    const TrainResult a = train(spec, data, cfg);
    cfg.threads = 4;
    const TrainResult b = train(spec, data, cfg);
    CHECK(a.weights == b.weights);
}

TEST_CASE("predict returns a softmax distribution and flags bad shapes") {
    ModelSpec spec{Arch::CnnRes, 8, 8, 1, 4};
    const Weights w = init_weights(spec, 11);
    Rng rng(13);
    const Tensor img = Tensor::uniform({8, 8, 1}, rng, 0.0f, 1.0f);
    const auto probs = predict(spec, w, img);
    REQUIRE(probs.size() == 4);
    float sum = 0.0f;
    for (float p : probs) sum += p;
    CHECK(sum == doctest::Approx(1.0f).epsilon(1e-5));
    CHECK_THROWS_AS(predict(spec, w, Tensor::zeros({4, 4, 1})), ShapeError);
}

TEST_CASE("zero weights give the uniform distribution") {
    ModelSpec spec{Arch::Mlp, 8, 8, 1, 5};
    Weights w = init_weights(spec, 1);
    for (auto& [name, t] : w.tensors)
        for (auto& v : t.data) v = 0.0f;
    const auto probs = predict(spec, w, Tensor::zeros({8, 8, 1}));
    for (float p : probs) CHECK(p == doctest::Approx(0.2f).epsilon(1e-6));
}

TEST_CASE("weight files round-trip bit-exactly and reject corruption") {
    ModelSpec spec{Arch::CnnA, 8, 8, 1, 3};
    const Weights w = init_weights(spec, 21);
    const auto path = temp_file("weights.bin");
    save_weights(path.string(), spec, w);

    const auto [spec2, w2] = load_weights(path.string());
    CHECK(spec2 == spec);
    CHECK(w2 == w);

    SUBCASE("wrong magic") {
        auto bytes = read_file(path.string());
        bytes[0] = 'X';
        const auto bad = temp_file("weights_badmagic.bin");
        write_file(bad.string(), bytes);
        CHECK_THROWS_WITH_AS(load_weights(bad.string()), doctest::Contains("bad magic"),
                             FormatError);
        fs::remove(bad);
    }
    SUBCASE("truncation reports the byte offset") {
        auto bytes = read_file(path.string());
        bytes.resize(bytes.size() / 2);
        const auto bad = temp_file("weights_trunc.bin");
        write_file(bad.string(), bytes);
        CHECK_THROWS_WITH_AS(load_weights(bad.string()), doctest::Contains("byte offset"),
                             FormatError);
        fs::remove(bad);
    }
    SUBCASE("flipped payload byte fails the checksum") {
        auto bytes = read_file(path.string());
        bytes[bytes.size() / 2] ^= 0xFF;
        const auto bad = temp_file("weights_crc.bin");
        write_file(bad.string(), bytes);
        CHECK_THROWS(load_weights(bad.string()));
        fs::remove(bad);
    }
    fs::remove(path);
}

TEST_CASE("the three architectures disagree somewhere on noise") {
    ModelSpec base{Arch::Mlp, 8, 8, 1, 3};
    ModelSpec cnn_a = base, cnn_res = base;
    cnn_a.arch = Arch::CnnA;
    cnn_res.arch = Arch::CnnRes;
    const Weights wm = init_weights(base, 31);
    const Weights wa = init_weights(cnn_a, 31);
    const Weights wr = init_weights(cnn_res, 31);
    Rng rng(37);
    int disagree_ma = 0, disagree_mr = 0, disagree_ar = 0;
    for (int i = 0; i < 32; ++i) {
        const Tensor img = Tensor::uniform({8, 8, 1}, rng, 0.0f, 1.0f);
        const int pm = argmax(predict(base, wm, img));
        const int pa = argmax(predict(cnn_a, wa, img));
        const int pr = argmax(predict(cnn_res, wr, img));
        disagree_ma += pm != pa;
        disagree_mr += pm != pr;
        disagree_ar += pa != pr;
    }
    CHECK(disagree_ma > 0);
    CHECK(disagree_mr > 0);
    CHECK(disagree_ar > 0);
}

TEST_CASE("synthetic dataset is deterministic and in range") {
    SyntheticConfig cfg;
    cfg.count = 16;
    cfg.seed = 41;
    const LabeledDataset a = make_synthetic(cfg);
    const LabeledDataset b = make_synthetic(cfg);
    REQUIRE(a.size() == 16);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.images[i] == b.images[i]);
        CHECK(a.labels[i] == b.labels[i]);
        for (auto v : a.images[i].data) {
            CHECK(v >= 16);
            CHECK(v <= 239);
        }
    }
}

TEST_CASE("png directory ingestion round-trips the dataset") {
    SyntheticConfig cfg;
    cfg.count = 6;
    cfg.seed = 43;
    const LabeledDataset data = make_synthetic(cfg);
    const auto dir = temp_file("png_dir");
    save_png_dir(data, dir.string());
    const LabeledDataset back = load_png_dir(dir.string(), (dir / "labels.csv").string());
    REQUIRE(back.size() == data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        CHECK(back.images[i] == data.images[i]);
        CHECK(back.labels[i] == data.labels[i]);
    }
    fs::remove_all(dir);
}

TEST_CASE("idx ingestion parses the MNIST layout and rejects corruption") {
    // tiny hand-built idx pair: 2 images of 2x3
    std::vector<std::uint8_t> imgs = {0, 0, 8, 3, 0, 0, 0, 2, 0, 0, 0, 2, 0, 0, 0, 3};
    for (int i = 0; i < 12; ++i) imgs.push_back(static_cast<std::uint8_t>(i * 20));
    std::vector<std::uint8_t> labels = {0, 0, 8, 1, 0, 0, 0, 2, 7, 9};
    const auto ipath = temp_file("images.idx");
    const auto lpath = temp_file("labels.idx");
    write_file(ipath.string(), imgs);
    write_file(lpath.string(), labels);

    const LabeledDataset data = load_idx(ipath.string(), lpath.string());
    REQUIRE(data.size() == 2);
    CHECK(data.images[0].h == 2);
    CHECK(data.images[0].w == 3);
    CHECK(data.images[1].at(1, 2, 0) == 220);
    CHECK(data.labels == std::vector<int>{7, 9});

    imgs[3] = 1;  // wrong magic
    write_file(ipath.string(), imgs);
    CHECK_THROWS_AS(read_idx_images(ipath.string()), FormatError);
    fs::remove(ipath);
    fs::remove(lpath);
}
