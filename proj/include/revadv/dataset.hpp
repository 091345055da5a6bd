#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "revadv/image.hpp"

namespace revadv {

struct LabeledDataset {
    std::vector<ImageU8> images;
    std::vector<int> labels;
    int classes = 0;

    std::size_t size() const { return images.size(); }
    void validate() const;  // counts match, labels in range, pixels are u8 by type
};

struct SyntheticConfig {
    int count = 1000;
    int classes = 10;
    int height = 32;
    int width = 32;
    int channels = 3;
    std::uint64_t seed = 7;          // sample draws (which class, jitter, noise)
    std::uint64_t pattern_seed = 42; // class definitions; keep fixed so that
                                     // differently-seeded datasets share classes
    double amplitude = 28.0;   // class pattern strength (pixel units)
    double noise = 5.0;        // smooth within-disk noise strength
    int pattern_radius = 10;   // pixels outside the pattern disk keep the
                               // per-image constant background
};

/// Deterministic synthetic corpus: per-image constant background with one
/// smooth class-specific pattern inside a tapered disk. The flat background
/// keeps strong histogram peaks, which the reversible hs embedding relies
/// on; pattern amplitude controls how hard the classes are.
LabeledDataset make_synthetic(const SyntheticConfig& cfg);

/// Directory of PNGs plus a `filename,label` CSV (header line optional).
LabeledDataset load_png_dir(const std::string& dir, const std::string& labels_csv);
/// Writes images as <prefix><index>.png plus labels.csv into `dir`.
void save_png_dir(const LabeledDataset& data, const std::string& dir,
                  const std::string& prefix = "img");

/// MNIST-style IDX pair (ubyte images + labels).
LabeledDataset load_idx(const std::string& images_path, const std::string& labels_path);

}  // namespace revadv
