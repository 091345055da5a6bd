#pragma once

#include <cstdint>
#include <vector>

#include "revadv/image.hpp"
#include "revadv/oracle.hpp"
#include "revadv/quantize.hpp"
#include "revadv/rng.hpp"

namespace revadv {

struct BlackboxConfig {
    int iterations = 1000;
    int xi = 4;
    int epsilon = 8;       // must equal 2*xi
    int enhance_every = 5; // every s-th iteration spends the move on the best block
    int expand_size = 4;   // side growth per expansion
    int block_size = 4;    // base tile side
    long query_budget = 1000;

    void validate() const;
};

/// Square tiles on a fixed grid covering H x W exactly once at base size.
/// Expanded tiles stay centered on their base tile and clip at the borders.
class BlockGrid {
  public:
    BlockGrid(int h, int w, int base_size);
    int count() const { return static_cast<int>(sides_.size()); }
    int side(int block) const { return sides_[static_cast<std::size_t>(block)]; }
    void expand(int block, int by) { sides_[static_cast<std::size_t>(block)] += by; }
    /// Row-major pixel rectangle of the block at its current side length.
    struct Rect {
        int i0, j0, i1, j1;  // half-open
    };
    Rect rect(int block) const;

  private:
    int h_, w_, base_, nx_;
    std::vector<int> sides_;
};

struct BlackboxResult {
    StageMatrix stages;
    long queries = 0;
    bool success = false;
    int iterations_run = 0;
    std::vector<float> accepted_probs;  // P(y) after each accepted state, first entry = initial
};

/// Query-only refinement of a stage-lattice perturbation: each round nudges
/// one random block by one stage step in a random sign, keeps the move only
/// if P(y) drops (trying the opposite sign first when it does not), and
/// remembers each block's best P_pre/P_next ratio. Every `enhance_every`-th
/// round the historically best block is expanded and perturbed instead of a
/// random one, and its score resets. Exits as soon as the oracle's top label
/// differs from `label`.
BlackboxResult blackbox_attack(const ImageU8& image, const StageMatrix& init, int label,
                               QueryOracle& oracle, const BlackboxConfig& cfg, Rng& rng);

}  // namespace revadv
