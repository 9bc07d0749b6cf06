#include "comemnet/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "comemnet/batching.hpp"
#include "comemnet/csv.hpp"
#include "comemnet/errors.hpp"
#include "comemnet/memory_buffer.hpp"

namespace comemnet {

void VariantSpec::validate() const {
    if (paradigm != "comemnet" && paradigm != "static" && paradigm != "retrained" &&
        paradigm != "expansible")
        throw ConfigError("unknown paradigm '" + paradigm + "'");
    if (paradigm != "comemnet" && (no_increase || no_replay || no_tmrb || random_select ||
                                   no_update))
        throw ConfigError("ablation flags apply to the comemnet paradigm only");
}

std::string VariantSpec::name() const {
    if (paradigm != "comemnet") return paradigm;
    std::string n = "comemnet";
    if (no_increase) n += "_no_increase";
    if (no_replay) n += "_no_replay";
    if (no_tmrb) n += "_no_tmrb";
    if (random_select) n += "_random_select";
    if (no_update) n += "_no_update";
    return n;
}

VariantSpec VariantSpec::from_name(const std::string& s) {
    VariantSpec v;
    if (s == "static" || s == "retrained" || s == "expansible") {
        v.paradigm = s;
        return v;
    }
    if (s.rfind("comemnet", 0) != 0) throw ConfigError("unknown variant '" + s + "'");
    std::string rest = s.substr(8);
    v.paradigm = "comemnet";
    while (!rest.empty()) {
        if (rest.rfind("_no_increase", 0) == 0) {
            v.no_increase = true;
            rest = rest.substr(12);
        } else if (rest.rfind("_no_replay", 0) == 0) {
            v.no_replay = true;
            rest = rest.substr(10);
        } else if (rest.rfind("_no_tmrb", 0) == 0) {
            v.no_tmrb = true;
            rest = rest.substr(8);
        } else if (rest.rfind("_random_select", 0) == 0) {
            v.random_select = true;
            rest = rest.substr(14);
        } else if (rest.rfind("_no_update", 0) == 0) {
            v.no_update = true;
            rest = rest.substr(10);
        } else {
            throw ConfigError("unknown variant '" + s + "'");
        }
    }
    return v;
}

namespace {

struct Accum {
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    long long n = 0;
    double ape_sum = 0.0;
    long long n_ape = 0;

    void add(double pred, double truth, double mape_threshold) {
        const double d = pred - truth;
        abs_sum += std::fabs(d);
        sq_sum += d * d;
        n += 1;
        if (std::fabs(truth) >= mape_threshold) {
            ape_sum += std::fabs(d) / std::fabs(truth);
            n_ape += 1;
        }
    }

    HorizonStat finish(const std::string& tag) const {
        if (n == 0) throw ConfigError("metrics over an empty element set");
        HorizonStat s;
        s.horizon = tag;
        s.mae = abs_sum / static_cast<double>(n);
        s.rmse = std::sqrt(sq_sum / static_cast<double>(n));
        if (n_ape > 0) {
            s.mape = 100.0 * ape_sum / static_cast<double>(n_ape);
            s.mape_present = true;
        }
        return s;
    }
};

} // namespace

std::vector<HorizonStat> horizon_stats(const std::vector<Matrix>& preds,
                                       const std::vector<Matrix>& truths,
                                       double mape_threshold) {
    if (preds.size() != truths.size()) throw ConfigError("horizon_stats: batch count mismatch");
    if (preds.empty()) throw ConfigError("horizon_stats: no batches");
    const int t_f = preds.front().cols;

    std::vector<int> steps;
    for (int s : {3, 6, 12})
        if (s <= t_f) steps.push_back(s);
    std::vector<Accum> point(steps.size());
    Accum avg;

    for (std::size_t b = 0; b < preds.size(); ++b) {
        const Matrix& p = preds[b];
        const Matrix& y = truths[b];
        if (!p.same_shape(y) || p.cols != t_f)
            throw ConfigError("horizon_stats: shape mismatch");
        for (int r = 0; r < p.rows; ++r)
            for (int j = 0; j < t_f; ++j) {
                avg.add(p(r, j), y(r, j), mape_threshold);
                for (std::size_t si = 0; si < steps.size(); ++si)
                    if (j == steps[si] - 1) point[si].add(p(r, j), y(r, j), mape_threshold);
            }
    }

    std::vector<HorizonStat> out;
    for (std::size_t si = 0; si < steps.size(); ++si)
        out.push_back(point[si].finish("step-" + std::to_string(steps[si])));
    out.push_back(avg.finish("avg-" + std::to_string(t_f)));
    return out;
}

namespace {

std::vector<HorizonStat> evaluate_impl(BackboneNet& backbone, const PeriodDataset& ds,
                                       const PeriodGraph& graph,
                                       const std::vector<std::string>& ids,
                                       const MemoryContext& ctx, const SplitRange& split,
                                       const EvalOptions& opt) {
    if (ids.empty()) throw ConfigError("evaluate_nodes: empty node set");
    auto starts = window_starts(split, backbone.cfg.t_h, backbone.cfg.t_f);
    if (starts.empty()) throw ConfigError("evaluate_nodes: split has no windows");

    if (opt.max_eval_windows > 0 &&
        static_cast<int>(starts.size()) > opt.max_eval_windows) {
        std::vector<int> picked;
        picked.reserve(static_cast<std::size_t>(opt.max_eval_windows));
        const long long total = static_cast<long long>(starts.size());
        for (int i = 0; i < opt.max_eval_windows; ++i)
            picked.push_back(starts[static_cast<std::size_t>(
                i * total / opt.max_eval_windows)]);
        starts = std::move(picked);
    }

    auto cols = columns_for(graph, ids);
    std::vector<int> slots;
    slots.reserve(ids.size());
    for (const auto& id : ids) slots.push_back(backbone.slot(id));

    std::vector<Matrix> preds, truths;
    const int bw = std::max(1, opt.batch_windows);
    for (std::size_t at = 0; at < starts.size(); at += static_cast<std::size_t>(bw)) {
        const std::size_t hi = std::min(starts.size(), at + static_cast<std::size_t>(bw));
        std::vector<int> chunk(starts.begin() + static_cast<std::ptrdiff_t>(at),
                               starts.begin() + static_cast<std::ptrdiff_t>(hi));
        auto batch = build_batch_inputs(ds, cols, slots, chunk, backbone.cfg.t_h);
        Tape t;
        Val prior;
        if (ctx.weights == nullptr) {
            prior = t.repeat_row(t.constant(ctx.h_prev), batch.rows());
        } else {
            Val te = t.gather_rows(t.constant(backbone.tod_embed().value), batch.tod);
            Val we = t.gather_rows(t.constant(backbone.dow_embed().value), batch.dow);
            Val t_mean = t.mean_all_rows(t.concat_cols({te, we}));
            Val t_cur = t.repeat_row(t_mean, batch.n_nodes);
            auto keys = topk_nodes(memory_delta(t.value(t_cur), ctx.h_prev),
                                   std::min(ctx.k, batch.n_nodes));
            Val h_a = weighted_average(t, t.gather_rows(t_cur, keys),
                                       t.constant(ctx.weights->w.value));
            Val h_new = ctx.gate ? gated_update(t, t.constant(ctx.h_prev), h_a,
                                                ctx.weights->w_r, ctx.weights->w_z,
                                                ctx.weights->w_t)
                                 : h_a;
            prior = t.repeat_row(h_new, batch.rows());
        }
        Val pred = backbone.forward(t, batch, prior);
        Matrix p = t.value(pred);
        for (double& v : p.data) v = denormalize_value(ds, v);
        preds.push_back(std::move(p));
        truths.push_back(build_batch_targets(ds, cols, chunk, backbone.cfg.t_h,
                                             backbone.cfg.t_f, false));
    }
    return horizon_stats(preds, truths, opt.mape_threshold);
}

} // namespace

std::vector<HorizonStat> evaluate_nodes(BackboneNet& backbone, const PeriodDataset& ds,
                                        const PeriodGraph& graph,
                                        const std::vector<std::string>& ids,
                                        const Matrix& h_prior, const SplitRange& split,
                                        const EvalOptions& opt) {
    MemoryContext ctx;
    ctx.h_prev = h_prior;
    return evaluate_impl(backbone, ds, graph, ids, ctx, split, opt);
}

std::vector<HorizonStat> evaluate_nodes(BackboneNet& backbone, const PeriodDataset& ds,
                                        const PeriodGraph& graph,
                                        const std::vector<std::string>& ids,
                                        const MemoryContext& ctx, const SplitRange& split,
                                        const EvalOptions& opt) {
    return evaluate_impl(backbone, ds, graph, ids, ctx, split, opt);
}

std::vector<int> two_hop_nodes(const Matrix& adjacency, const std::vector<int>& seeds) {
    const int n = adjacency.rows;
    if (adjacency.cols != n) throw ConfigError("two_hop_nodes: adjacency must be square");
    std::vector<int> depth(static_cast<std::size_t>(n), -1);
    std::vector<int> frontier;
    for (int s : seeds) {
        if (s < 0 || s >= n) throw ConfigError("two_hop_nodes: seed out of range");
        if (depth[static_cast<std::size_t>(s)] == -1) {
            depth[static_cast<std::size_t>(s)] = 0;
            frontier.push_back(s);
        }
    }
    for (int hop = 1; hop <= 2; ++hop) {
        std::vector<int> next;
        for (int u : frontier)
            for (int v = 0; v < n; ++v)
                if (adjacency(u, v) > 0.0 && depth[static_cast<std::size_t>(v)] == -1) {
                    depth[static_cast<std::size_t>(v)] = hop;
                    next.push_back(v);
                }
        frontier = std::move(next);
    }
    std::vector<int> out;
    for (int v = 0; v < n; ++v)
        if (depth[static_cast<std::size_t>(v)] >= 0) out.push_back(v);
    return out;
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
    std::ostringstream os;
    os << "run_id,variant,period,horizon,metric,value,nodes_total,nodes_trained\n";
    for (const auto& r : rows)
        os << r.run_id << ',' << r.variant << ',' << r.period << ',' << r.horizon << ','
           << r.metric << ',' << format_double(r.value) << ',' << r.nodes_total << ','
           << r.nodes_trained << '\n';
    return os.str();
}

std::string forgetting_csv(const std::vector<ForgettingCell>& cells) {
    std::ostringstream os;
    os << "train_period,eval_period,train_label,eval_label,mae,backward_transfer\n";
    for (const auto& c : cells)
        os << c.train_period << ',' << c.eval_period << ',' << c.train_label << ','
           << c.eval_label << ',' << format_double(c.mae) << ','
           << format_double(c.backward_transfer) << '\n';
    return os.str();
}

} // namespace comemnet
