#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace revadv {

/// One (image, target model) evaluation row.
struct EvalRecord {
    std::string file;
    int label = -1;
    std::string model;
    int adv_pred = -1;
    bool adv_success = false;          // argmax != label on the adversarial image
    std::optional<int> rec_pred;       // present when a recovered image exists
    std::optional<bool> rec_correct;   // argmax == label on the recovered image
    std::optional<double> psnr_adv;    // infinity encoded as the infinity value
    std::optional<double> ssim_adv;
    std::optional<double> psnr_rec;
    std::optional<double> ssim_rec;
    std::optional<long> queries;
};

struct EvalAggregates {
    std::map<std::string, double> asr_by_model;   // percent
    std::map<std::string, double> sr_by_model;    // percent, recovered images only
    std::optional<double> mean_psnr_adv;
    std::optional<double> mean_ssim_adv;
    std::optional<double> mean_psnr_rec;
    std::optional<double> mean_ssim_rec;
    std::optional<double> median_queries;
};

struct EvalReport {
    std::vector<EvalRecord> records;

    /// Aggregates are always recomputed from the records.
    EvalAggregates aggregates() const;
    std::string to_csv() const;   // one row per record; infinite PSNR -> "inf"
    std::string to_json() const;  // infinite PSNR -> null plus *_inf flag
};

}  // namespace revadv
