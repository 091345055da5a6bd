#include "revadv/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "revadv/errors.hpp"
#include "revadv/imageio.hpp"
#include "revadv/rng.hpp"

namespace fs = std::filesystem;

namespace revadv {

void LabeledDataset::validate() const {
    if (images.size() != labels.size())
        throw FormatError("dataset: " + std::to_string(images.size()) + " images vs " +
                          std::to_string(labels.size()) + " labels");
    for (int l : labels) {
        if (l < 0 || l >= classes)
            throw FormatError("dataset: label " + std::to_string(l) + " outside [0," +
                              std::to_string(classes) + ")");
    }
    for (std::size_t i = 1; i < images.size(); ++i) {
        if (!images[i].same_shape(images[0]))
            throw FormatError("dataset: image " + std::to_string(i) + " has a different shape");
    }
}

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Bump {
    double cy, cx, sigma, sign;
    double channel_scale[3];
};

double eval_bumps(const std::vector<Bump>& bumps, double y, double x, int channel) {
    double v = 0.0;
    for (const auto& b : bumps) {
        const double dy = y - b.cy, dx = x - b.cx;
        v += b.sign * b.channel_scale[channel % 3] *
             std::exp(-(dy * dy + dx * dx) / (2.0 * b.sigma * b.sigma));
    }
    return v;
}

// low-frequency cosine noise field
struct Wave {
    double fy, fx, phase;
};

double eval_waves(const std::vector<Wave>& waves, double y, double x, int h, int w) {
    double v = 0.0;
    for (const auto& wv : waves)
        v += std::cos(2.0 * kPi * (wv.fx * x / w + wv.fy * y / h) + wv.phase);
    return v;
}

}  // namespace

LabeledDataset make_synthetic(const SyntheticConfig& cfg) {
    if (cfg.count <= 0 || cfg.classes < 2 || cfg.channels < 1)
        throw FormatError("synthetic: invalid configuration");

    // fixed per-class bump constellations: classes differ by where their
    // bumps sit and how they weight the channels
    std::vector<std::vector<Bump>> patterns(static_cast<std::size_t>(cfg.classes));
    Rng trng(cfg.pattern_seed ^ 0xA5A5A5A5ull);
    const double cy0 = cfg.height / 2.0, cx0 = cfg.width / 2.0;
    for (auto& constellation : patterns) {
        const int bumps = 4;
        for (int b = 0; b < bumps; ++b) {
            Bump bump{};
            const double r = trng.uniform(0.0, cfg.pattern_radius * 0.65);
            const double theta = trng.uniform(0.0, 2.0 * kPi);
            bump.cy = cy0 + r * std::sin(theta);
            bump.cx = cx0 + r * std::cos(theta);
            bump.sigma = trng.uniform(1.8, 3.0);
            bump.sign = trng.bernoulli(0.5) ? 1.0 : -1.0;
            for (auto& s : bump.channel_scale) s = trng.uniform(0.4, 1.0);
            constellation.push_back(bump);
        }
    }

    LabeledDataset data;
    data.classes = cfg.classes;
    Rng rng(cfg.seed);
    for (int n = 0; n < cfg.count; ++n) {
        const int label = rng.uniform_int(0, cfg.classes - 1);
        const int bg = rng.uniform_int(118, 138);
        const double amp = cfg.amplitude * rng.uniform(0.9, 1.1);
        const double cy = cy0 + rng.uniform_int(-2, 2);
        const double cx = cx0 + rng.uniform_int(-2, 2);
        const double jy = rng.uniform(-1.0, 1.0);
        const double jx = rng.uniform(-1.0, 1.0);
        std::vector<Wave> noise_waves(3);
        for (auto& wv : noise_waves)
            wv = {static_cast<double>(rng.uniform_int(1, 3)),
                  static_cast<double>(rng.uniform_int(1, 3)), rng.uniform(0.0, 2.0 * kPi)};

        ImageU8 img = ImageU8::make(cfg.height, cfg.width, cfg.channels,
                                    static_cast<std::uint8_t>(bg));
        for (int i = 0; i < cfg.height; ++i) {
            for (int j = 0; j < cfg.width; ++j) {
                const double r = std::hypot(i - cy, j - cx);
                if (r >= cfg.pattern_radius) continue;
                const double taper = 0.5 * (1.0 + std::cos(kPi * r / cfg.pattern_radius));
                for (int ch = 0; ch < cfg.channels; ++ch) {
                    const double pat = eval_bumps(patterns[static_cast<std::size_t>(label)],
                                                  i - jy - (cy - cy0), j - jx - (cx - cx0), ch);
                    const double noi =
                        eval_waves(noise_waves, static_cast<double>(i), static_cast<double>(j),
                                   cfg.height, cfg.width) / 3.0;
                    const double v = bg + taper * (amp * pat + cfg.noise * noi);
                    img.at(i, j, ch) =
                        static_cast<std::uint8_t>(std::clamp(std::lround(v), 16l, 239l));
                }
            }
        }
        data.images.push_back(std::move(img));
        data.labels.push_back(label);
    }
    data.validate();
    return data;
}

LabeledDataset load_png_dir(const std::string& dir, const std::string& labels_csv) {
    std::ifstream in(labels_csv);
    if (!in) throw IoError("cannot open labels file " + labels_csv);
    LabeledDataset data;
    std::string line;
    int max_label = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw FormatError("labels csv: missing comma in line '" + line + "'");
        const std::string name = line.substr(0, comma);
        const std::string label_str = line.substr(comma + 1);
        if (name == "filename") continue;  // header
        int label = 0;
        try {
            label = std::stoi(label_str);
        } catch (const std::exception&) {
            throw FormatError("labels csv: bad label '" + label_str + "' for " + name);
        }
        data.images.push_back(read_png((fs::path(dir) / name).string()));
        data.labels.push_back(label);
        max_label = std::max(max_label, label);
    }
    if (data.images.empty()) throw FormatError("labels csv: no entries in " + labels_csv);
    data.classes = max_label + 1;
    data.validate();
    return data;
}

void save_png_dir(const LabeledDataset& data, const std::string& dir, const std::string& prefix) {
    fs::create_directories(dir);
    std::ofstream csv(fs::path(dir) / "labels.csv");
    if (!csv) throw IoError("cannot write labels.csv in " + dir);
    csv << "filename,label\n";
    for (std::size_t i = 0; i < data.images.size(); ++i) {
        std::ostringstream name;
        name << prefix << std::setfill('0') << std::setw(5) << i << ".png";
        write_png((fs::path(dir) / name.str()).string(), data.images[i]);
        csv << name.str() << "," << data.labels[i] << "\n";
    }
}

LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path) {
    LabeledDataset data;
    data.images = read_idx_images(images_path);
    data.labels = read_idx_labels(labels_path);
    int max_label = 0;
    for (int l : data.labels) max_label = std::max(max_label, l);
    data.classes = std::max(2, max_label + 1);
    data.validate();
    return data;
}

}  // namespace revadv
