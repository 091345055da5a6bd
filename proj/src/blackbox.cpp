#include "revadv/blackbox.hpp"

#include <algorithm>

#include "revadv/errors.hpp"

namespace revadv {

void BlackboxConfig::validate() const {
    if (xi <= 0 || epsilon != 2 * xi)
        throw ShapeError("blackbox config: requires epsilon = 2*xi > 0");
    if (iterations < 0) throw ShapeError("blackbox config: iterations must be >= 0");
    if (enhance_every < 1) throw ShapeError("blackbox config: enhance step must be >= 1");
    if (expand_size < 0) throw ShapeError("blackbox config: expand size must be >= 0");
    if (block_size < 1) throw ShapeError("blackbox config: block size must be >= 1");
    if (query_budget < 1) throw ShapeError("blackbox config: query budget must be >= 1");
}

BlockGrid::BlockGrid(int h, int w, int base_size) : h_(h), w_(w), base_(base_size) {
    if (base_size < 1) throw ShapeError("block grid: base size must be >= 1");
    nx_ = (w + base_size - 1) / base_size;
    const int ny = (h + base_size - 1) / base_size;
    sides_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny), base_size);
}

BlockGrid::Rect BlockGrid::rect(int block) const {
    const int by = block / nx_, bx = block % nx_;
    const int side = sides_[static_cast<std::size_t>(block)];
    // center of the base tile (clipped tiles keep their nominal center)
    const double cy = by * base_ + base_ / 2.0;
    const double cx = bx * base_ + base_ / 2.0;
    int i0 = static_cast<int>(cy - side / 2.0);
    int j0 = static_cast<int>(cx - side / 2.0);
    int i1 = i0 + side, j1 = j0 + side;
    i0 = std::max(0, i0);
    j0 = std::max(0, j0);
    i1 = std::min(h_, i1);
    j1 = std::min(w_, j1);
    return {i0, j0, i1, j1};
}

namespace {

StageMatrix nudge_block(const ImageU8& image, const StageMatrix& cur, const BlockGrid::Rect& r,
                        int sign) {
    StageMatrix next = cur;
    for (int i = r.i0; i < r.i1; ++i) {
        for (int j = r.j0; j < r.j1; ++j) {
            next.at(i, j) = static_cast<std::int8_t>(
                std::clamp(static_cast<int>(next.at(i, j)) + sign, -2, 2));
        }
    }
    return project_stages(image, next);
}

}  // namespace

BlackboxResult blackbox_attack(const ImageU8& image, const StageMatrix& init, int label,
                               QueryOracle& oracle, const BlackboxConfig& cfg, Rng& rng) {
    cfg.validate();
    if (init.h != image.h || init.w != image.w)
        throw ShapeError("blackbox_attack: stage matrix does not match the image");
    if (!init.valid_alphabet()) throw ShapeError("blackbox_attack: invalid initial stages");
    if (init.xi != cfg.xi) throw ShapeError("blackbox_attack: stage xi differs from config xi");

    BlackboxResult res;
    res.stages = project_stages(image, init);

    long queries = 0;
    bool budget_hit = false;
    auto query = [&](const StageMatrix& stages) -> Classification {
        if (queries >= cfg.query_budget) {
            budget_hit = true;
            return {};
        }
        ++queries;
        return oracle.classify(to_unit(apply_stages(image, stages)));
    };

    Classification cls = query(res.stages);
    if (budget_hit) {
        res.queries = queries;
        return res;
    }
    float p_cur = prob_of_label(cls, label);
    res.accepted_probs.push_back(p_cur);
    res.success = !cls.empty() && cls.front().label != label;

    BlockGrid grid(image.h, image.w, cfg.block_size);
    std::vector<double> scores(static_cast<std::size_t>(grid.count()), 0.0);

    for (int iter = 0; iter < cfg.iterations && !res.success && !budget_hit; ++iter) {
        res.iterations_run = iter + 1;
        int block = rng.uniform_int(0, grid.count() - 1);
        const int sign = rng.bernoulli(0.5) ? 1 : -1;

        if ((iter + 1) % cfg.enhance_every == 0) {
            // spend this round on the historically best block, grown by Ep
            const auto best = static_cast<int>(
                std::max_element(scores.begin(), scores.end()) - scores.begin());
            if (scores[static_cast<std::size_t>(best)] > 0.0) {
                block = best;
                grid.expand(block, cfg.expand_size);
                scores[static_cast<std::size_t>(block)] = 0.0;
            }
        }

        const auto r = grid.rect(block);
        const float p_pre = p_cur;
        float p_best_attempt = p_pre;
        bool accepted = false;
        bool attempted = false;
        for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
            const int q = attempt == 0 ? sign : -sign;
            StageMatrix cand = nudge_block(image, res.stages, r, q);
            if (cand.stages == res.stages.stages) continue;  // saturated block, no query spent
            const Classification c = query(cand);
            if (budget_hit) break;
            attempted = true;
            const float p = prob_of_label(c, label);
            p_best_attempt = std::min(p_best_attempt, p);
            if (p < p_pre) {
                res.stages = std::move(cand);
                cls = c;
                p_cur = p;
                res.accepted_probs.push_back(p_cur);
                res.success = !cls.empty() && cls.front().label != label;
                accepted = true;
            }
        }
        if (attempted) {
            // best of the attempted directions scores this block's promise
            const double denom = std::max(static_cast<double>(p_best_attempt), 1e-12);
            scores[static_cast<std::size_t>(block)] =
                std::max(scores[static_cast<std::size_t>(block)],
                         static_cast<double>(p_pre) / denom);
        }
    }

    res.queries = queries;
    return res;
}

}  // namespace revadv
