#include "revadv/report.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <sstream>

using nlohmann::json;

namespace revadv {

EvalAggregates EvalReport::aggregates() const {
    EvalAggregates agg;
    std::map<std::string, std::pair<long, long>> adv_counts;  // successes, total
    std::map<std::string, std::pair<long, long>> rec_counts;  // correct, total
    double psnr_adv_sum = 0.0, ssim_adv_sum = 0.0, psnr_rec_sum = 0.0, ssim_rec_sum = 0.0;
    long psnr_adv_n = 0, ssim_adv_n = 0, psnr_rec_n = 0, ssim_rec_n = 0;
    std::vector<long> queries;

    for (const auto& r : records) {
        auto& a = adv_counts[r.model];
        a.first += r.adv_success ? 1 : 0;
        ++a.second;
        if (r.rec_correct) {
            auto& s = rec_counts[r.model];
            s.first += *r.rec_correct ? 1 : 0;
            ++s.second;
        }
        if (r.psnr_adv) {
            psnr_adv_sum += *r.psnr_adv;
            ++psnr_adv_n;
        }
        if (r.ssim_adv) {
            ssim_adv_sum += *r.ssim_adv;
            ++ssim_adv_n;
        }
        if (r.psnr_rec) {
            psnr_rec_sum += *r.psnr_rec;
            ++psnr_rec_n;
        }
        if (r.ssim_rec) {
            ssim_rec_sum += *r.ssim_rec;
            ++ssim_rec_n;
        }
        if (r.queries) queries.push_back(*r.queries);
    }
    for (const auto& [model, c] : adv_counts)
        agg.asr_by_model[model] = 100.0 * static_cast<double>(c.first) / static_cast<double>(c.second);
    for (const auto& [model, c] : rec_counts)
        agg.sr_by_model[model] = 100.0 * static_cast<double>(c.first) / static_cast<double>(c.second);
    if (psnr_adv_n) agg.mean_psnr_adv = psnr_adv_sum / psnr_adv_n;
    if (ssim_adv_n) agg.mean_ssim_adv = ssim_adv_sum / ssim_adv_n;
    if (psnr_rec_n) agg.mean_psnr_rec = psnr_rec_sum / psnr_rec_n;
    if (ssim_rec_n) agg.mean_ssim_rec = ssim_rec_sum / ssim_rec_n;
    if (!queries.empty()) {
        std::sort(queries.begin(), queries.end());
        const std::size_t n = queries.size();
        agg.median_queries = n % 2 ? static_cast<double>(queries[n / 2])
                                   : (static_cast<double>(queries[n / 2 - 1]) +
                                      static_cast<double>(queries[n / 2])) / 2.0;
    }
    return agg;
}

namespace {

std::string num_or_inf(double v) {
    if (std::isinf(v)) return "inf";
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << v;
    return os.str();
}

void put_metric(json& obj, const std::string& key, const std::optional<double>& v) {
    if (!v) {
        obj[key] = nullptr;
        return;
    }
    if (std::isinf(*v)) {
        obj[key] = nullptr;
        obj[key + "_inf"] = true;
    } else {
        obj[key] = *v;
    }
}

}  // namespace

std::string EvalReport::to_csv() const {
    std::ostringstream os;
    os << "file,label,model,adv_pred,adv_success,rec_pred,rec_correct,"
          "psnr_adv,ssim_adv,psnr_rec,ssim_rec,queries\n";
    for (const auto& r : records) {
        os << r.file << ',' << r.label << ',' << r.model << ',' << r.adv_pred << ','
           << (r.adv_success ? 1 : 0) << ',';
        os << (r.rec_pred ? std::to_string(*r.rec_pred) : "") << ',';
        os << (r.rec_correct ? std::to_string(*r.rec_correct ? 1 : 0) : "") << ',';
        os << (r.psnr_adv ? num_or_inf(*r.psnr_adv) : "") << ','
           << (r.ssim_adv ? num_or_inf(*r.ssim_adv) : "") << ','
           << (r.psnr_rec ? num_or_inf(*r.psnr_rec) : "") << ','
           << (r.ssim_rec ? num_or_inf(*r.ssim_rec) : "") << ',';
        os << (r.queries ? std::to_string(*r.queries) : "") << '\n';
    }
    return os.str();
}

std::string EvalReport::to_json() const {
    json out;
    out["records"] = json::array();
    for (const auto& r : records) {
        json row;
        row["file"] = r.file;
        row["label"] = r.label;
        row["model"] = r.model;
        row["adv_pred"] = r.adv_pred;
        row["adv_success"] = r.adv_success;
        if (r.rec_pred) row["rec_pred"] = *r.rec_pred;
        if (r.rec_correct) row["rec_correct"] = *r.rec_correct;
        put_metric(row, "psnr_adv", r.psnr_adv);
        put_metric(row, "ssim_adv", r.ssim_adv);
        put_metric(row, "psnr_rec", r.psnr_rec);
        put_metric(row, "ssim_rec", r.ssim_rec);
        if (r.queries) row["queries"] = *r.queries;
        out["records"].push_back(std::move(row));
    }
    const EvalAggregates agg = aggregates();
    json ja;
    ja["asr_by_model"] = agg.asr_by_model;
    ja["sr_by_model"] = agg.sr_by_model;
    put_metric(ja, "mean_psnr_adv", agg.mean_psnr_adv);
    put_metric(ja, "mean_ssim_adv", agg.mean_ssim_adv);
    put_metric(ja, "mean_psnr_rec", agg.mean_psnr_rec);
    put_metric(ja, "mean_ssim_rec", agg.mean_ssim_rec);
    if (agg.median_queries) ja["median_queries"] = *agg.median_queries;
    out["aggregates"] = std::move(ja);
    return out.dump(2);
}

}  // namespace revadv
