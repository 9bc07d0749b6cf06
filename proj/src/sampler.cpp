#include "comemnet/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "comemnet/batching.hpp"
#include "comemnet/errors.hpp"
#include "comemnet/rng.hpp"

namespace comemnet {

Matrix normalize_features(const Matrix& f) {
    if (!all_finite(f)) throw ConfigError("normalize_features: non-finite input");
    if (f.count() == 0) return f;
    double lo = f.data[0], hi = f.data[0];
    for (double v : f.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    Matrix out(f.rows, f.cols);
    if (hi == lo) return out; // constant input: all zeros, scores degrade to 0
    const double span = hi - lo;
    for (std::size_t i = 0; i < f.data.size(); ++i) out.data[i] = (f.data[i] - lo) / span;
    return out;
}

std::vector<double> histogram_bins(const double* values, int count, int n_bins) {
    if (n_bins < 1) throw ConfigError("histogram: need at least one bin");
    if (count < 1) throw ConfigError("histogram: empty value set");
    std::vector<double> bins(static_cast<std::size_t>(n_bins), 0.0);
    for (int i = 0; i < count; ++i) {
        const double v = values[i];
        if (v < 0.0 || v > 1.0) throw ConfigError("histogram: value outside [0,1]");
        int b = static_cast<int>(v * n_bins);
        if (b == n_bins) b = n_bins - 1; // v == 1.0 falls into the closed last bin
        bins[static_cast<std::size_t>(b)] += 1.0;
    }
    for (double& b : bins) b /= count;
    return bins;
}

DriftMode drift_mode_from_string(const std::string& s) {
    if (s == "paper") return DriftMode::paper;
    if (s == "cdf_w1") return DriftMode::cdf_w1;
    throw ConfigError("unknown sampler_mode '" + s + "' (expected paper|cdf_w1)");
}

std::string to_string(DriftMode mode) {
    return mode == DriftMode::paper ? "paper" : "cdf_w1";
}

double drift_score(const std::vector<double>& h_prev, const std::vector<double>& h_cur,
                   const std::vector<double>& c, DriftMode mode) {
    if (h_prev.size() != h_cur.size()) throw ConfigError("drift_score: histogram sizes differ");
    const std::size_t n = h_prev.size();
    if (mode == DriftMode::paper) {
        if (!c.empty() && c.size() != n) throw ConfigError("drift_score: weight count mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = c.empty() ? 1.0 : c[i];
            s += w * std::fabs(h_prev[i] - h_cur[i]);
        }
        return s;
    }
    double cdf_prev = 0.0, cdf_cur = 0.0, s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cdf_prev += h_prev[i];
        cdf_cur += h_cur[i];
        s += std::fabs(cdf_prev - cdf_cur);
    }
    return s / static_cast<double>(n);
}

SamplerReport select_nodes(const std::vector<std::string>& prev_ids,
                           const std::vector<double>& scores,
                           const std::vector<std::string>& cur_ids, double rho) {
    if (rho < 0.0 || rho > 1.0) throw ConfigError("select_nodes: rho must lie in [0,1]");
    if (prev_ids.size() != scores.size())
        throw ConfigError("select_nodes: scores must cover exactly the previous node set");

    SamplerReport rep;
    rep.rho = rho;
    rep.scored_ids = prev_ids;
    rep.scores = scores;
    rep.m = static_cast<int>(std::floor(rho * static_cast<double>(cur_ids.size())));

    std::vector<std::string> prev_sorted(prev_ids.begin(), prev_ids.end());
    std::sort(prev_sorted.begin(), prev_sorted.end());
    for (const auto& id : cur_ids)
        if (!std::binary_search(prev_sorted.begin(), prev_sorted.end(), id))
            rep.new_nodes.push_back(id);

    std::vector<int> order(prev_ids.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        const double sa = scores[static_cast<std::size_t>(a)];
        const double sb = scores[static_cast<std::size_t>(b)];
        if (sa != sb) return sa > sb;
        return prev_ids[static_cast<std::size_t>(a)] < prev_ids[static_cast<std::size_t>(b)];
    });
    const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(rep.m), order.size());
    for (std::size_t i = 0; i < take; ++i)
        rep.top_m.push_back(prev_ids[static_cast<std::size_t>(order[i])]);

    rep.selected = rep.top_m;
    rep.selected.insert(rep.selected.end(), rep.new_nodes.begin(), rep.new_nodes.end());
    std::sort(rep.selected.begin(), rep.selected.end());
    return rep;
}

nlohmann::json SamplerReport::to_json() const {
    nlohmann::json j;
    j["period"] = period;
    j["rho"] = rho;
    j["m"] = m;
    j["new_nodes"] = new_nodes;
    j["top_m"] = top_m;
    j["selected"] = selected;
    nlohmann::json sc = nlohmann::json::object();
    for (std::size_t i = 0; i < scored_ids.size(); ++i) sc[scored_ids[i]] = scores[i];
    j["scores"] = std::move(sc);
    auto hist_json = [](const std::vector<NodeHistogram>& hs) {
        nlohmann::json out = nlohmann::json::object();
        for (const auto& h : hs) out[h.node_id] = h.bins;
        return out;
    };
    j["hist_prev"] = hist_json(hist_prev);
    j["hist_cur"] = hist_json(hist_cur);
    return j;
}

Matrix compute_period_features(BackboneNet& backbone, const PeriodDataset& ds,
                               const std::vector<std::string>& sensor_ids, const Matrix& h_prior,
                               int sample_batches, int batch_windows, std::uint64_t seed) {
    if (sample_batches < 1 || batch_windows < 1)
        throw ConfigError("compute_period_features: need at least one batch and window");
    auto starts = window_starts(ds.train, backbone.cfg.t_h, backbone.cfg.t_f);
    if (starts.empty()) throw ConfigError("compute_period_features: train split has no windows");

    Rng rng(seed);
    rng.shuffle(starts);

    std::vector<int> cols(sensor_ids.size());
    for (std::size_t i = 0; i < cols.size(); ++i) cols[i] = static_cast<int>(i);
    // callers pass ids in period order, so column i is position i; slots
    // resolve through the backbone table
    std::vector<int> slots;
    slots.reserve(sensor_ids.size());
    for (const auto& id : sensor_ids) slots.push_back(backbone.slot(id));

    Matrix acc(static_cast<int>(sensor_ids.size()), backbone.cfg.h_dim);
    int done = 0;
    std::size_t at = 0;
    while (done < sample_batches && at < starts.size()) {
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(batch_windows),
                                                       starts.size() - at);
        std::vector<int> batch_starts(starts.begin() + static_cast<std::ptrdiff_t>(at),
                                      starts.begin() + static_cast<std::ptrdiff_t>(at + take));
        at += take;
        auto batch = build_batch_inputs(ds, cols, slots, batch_starts, backbone.cfg.t_h);
        Tape t;
        Val prior = t.repeat_row(t.constant(h_prior), batch.rows());
        Val f = backbone.encode_features(t, batch, prior);
        add_inplace(acc, t.value(f));
        done += 1;
    }
    if (done == 0) throw ConfigError("compute_period_features: no batches produced");
    scale_inplace(acc, 1.0 / done);
    return acc;
}

} // namespace comemnet
