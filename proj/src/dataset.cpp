#include "comemnet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "comemnet/csv.hpp"
#include "comemnet/errors.hpp"

namespace comemnet {

namespace {

double parse_cell(const std::string& s) {
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError("bad numeric cell '" + s + "'");
    return v;
}

} // namespace

DatasetManifest DatasetManifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open manifest " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("manifest parse error: ") + e.what());
    }
    if (!j.contains("periods") || !j["periods"].is_array() || j["periods"].empty())
        throw ConfigError("manifest needs a non-empty 'periods' array");

    const auto base = std::filesystem::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return (fp.is_absolute() ? fp : base / fp).string();
    };

    DatasetManifest m;
    for (const auto& pj : j["periods"]) {
        ManifestEntry e;
        for (const char* key : {"name", "flow_file", "sensors_file", "metadata_file"})
            if (!pj.contains(key)) throw ConfigError(std::string("manifest period missing '") + key + "'");
        e.name = pj["name"].get<std::string>();
        e.flow_file = resolve(pj["flow_file"].get<std::string>());
        e.sensors_file = resolve(pj["sensors_file"].get<std::string>());
        e.metadata_file = resolve(pj["metadata_file"].get<std::string>());
        e.interval_minutes = pj.value("interval_minutes", 5);
        e.start_dow = pj.value("start_dow", 0);
        e.start_slot = pj.value("start_slot", 0);
        if (e.interval_minutes <= 0 || e.interval_minutes % 5 != 0)
            throw ConfigError("interval_minutes must be a positive multiple of 5");
        if (e.start_dow < 0 || e.start_dow >= k_dow_slots) throw ConfigError("start_dow out of range");
        if (e.start_slot < 0 || e.start_slot >= k_tod_slots) throw ConfigError("start_slot out of range");
        for (const std::string& f : {e.flow_file, e.sensors_file, e.metadata_file})
            if (!std::filesystem::exists(f)) throw ConfigError("manifest file missing: " + f);
        m.entries.push_back(std::move(e));
    }
    return m;
}

CleanResult filter_and_interpolate(const Matrix& raw, const std::vector<std::string>& ids,
                                   double max_missing_rate) {
    if (static_cast<int>(ids.size()) != raw.cols)
        throw ConfigError("filter_and_interpolate: id count != columns");
    const int t_len = raw.rows;
    CleanResult out;
    std::vector<int> kept_cols;
    for (int c = 0; c < raw.cols; ++c) {
        int missing = 0;
        for (int t = 0; t < t_len; ++t)
            if (std::isnan(raw(t, c))) missing++;
        const double rate = t_len > 0 ? static_cast<double>(missing) / t_len : 1.0;
        if (missing == t_len) {
            std::cerr << "warning: sensor " << ids[static_cast<std::size_t>(c)]
                      << " has no observations, dropped\n";
            out.dropped_ids.push_back(ids[static_cast<std::size_t>(c)]);
        } else if (rate >= max_missing_rate) {
            std::cerr << "warning: sensor " << ids[static_cast<std::size_t>(c)] << " missing rate "
                      << rate << " >= " << max_missing_rate << ", dropped\n";
            out.dropped_ids.push_back(ids[static_cast<std::size_t>(c)]);
        } else {
            kept_cols.push_back(c);
            out.kept_ids.push_back(ids[static_cast<std::size_t>(c)]);
        }
    }

    out.flow = Matrix(t_len, static_cast<int>(kept_cols.size()));
    for (std::size_t k = 0; k < kept_cols.size(); ++k) {
        const int c = kept_cols[k];
        // gather observed anchor points, then fill: linear between anchors,
        // nearest value before the first / after the last
        int prev_obs = -1;
        int first_obs = -1;
        for (int t = 0; t < t_len; ++t) {
            double v = raw(t, c);
            if (std::isnan(v)) continue;
            if (first_obs < 0) first_obs = t;
            if (prev_obs >= 0 && prev_obs + 1 < t) {
                const double a = raw(prev_obs, c);
                const double span = static_cast<double>(t - prev_obs);
                for (int u = prev_obs + 1; u < t; ++u)
                    out.flow(u, static_cast<int>(k)) = a + (v - a) * (u - prev_obs) / span;
            }
            out.flow(t, static_cast<int>(k)) = v;
            prev_obs = t;
        }
        for (int t = 0; t < first_obs; ++t) out.flow(t, static_cast<int>(k)) = raw(first_obs, c);
        for (int t = prev_obs + 1; t < t_len; ++t) out.flow(t, static_cast<int>(k)) = raw(prev_obs, c);
    }
    return out;
}

std::vector<std::vector<std::string>> enforce_continuity(
    const std::vector<std::vector<std::string>>& sets_per_period) {
    const std::size_t p = sets_per_period.size();
    if (p <= 1) return sets_per_period;
    // survivors of period τ = V_τ ∩ V_{τ+1} ∩ … ∩ V_{P−1}
    std::vector<std::vector<std::string>> out(p);
    out[p - 1] = sets_per_period[p - 1];
    std::unordered_set<std::string> suffix(sets_per_period[p - 1].begin(),
                                           sets_per_period[p - 1].end());
    for (std::size_t tau = p - 1; tau-- > 0;) {
        std::unordered_set<std::string> next_suffix;
        for (const std::string& id : sets_per_period[tau])
            if (suffix.count(id)) {
                out[tau].push_back(id);
                next_suffix.insert(id);
            }
        suffix = std::move(next_suffix);
    }
    for (std::size_t tau = 0; tau < p; ++tau)
        if (out[tau].empty())
            throw ConfigError("continuity filter left period " + std::to_string(tau) + " empty");
    return out;
}

Matrix build_adjacency(const std::vector<double>& post_miles, double delta, double epsilon) {
    const int n = static_cast<int>(post_miles.size());
    Matrix a(n, n);
    for (int m = 0; m < n; ++m)
        for (int k = m + 1; k < n; ++k) {
            const double d = std::fabs(post_miles[static_cast<std::size_t>(m)] -
                                       post_miles[static_cast<std::size_t>(k)]);
            if (d < epsilon) {
                const double w = std::exp(-(d * d) / (delta * delta));
                a(m, k) = w;
                a(k, m) = w;
            }
        }
    return a;
}

SplitRange train_split(int total) {
    return {0, static_cast<int>(std::floor(0.6 * total))};
}

SplitRange val_split(int total) {
    const int tr = static_cast<int>(std::floor(0.6 * total));
    return {tr, tr + static_cast<int>(std::floor(0.2 * total))};
}

SplitRange test_split(int total) {
    const int tr = static_cast<int>(std::floor(0.6 * total));
    const int va = static_cast<int>(std::floor(0.2 * total));
    return {tr + va, total};
}

std::vector<int> window_starts(const SplitRange& split, int t_h, int t_f) {
    std::vector<int> starts;
    const int last = split.end - t_h - t_f; // inclusive last valid start
    if (last < split.begin) {
        std::cerr << "warning: split of length " << split.length() << " too short for windows ("
                  << t_h << "+" << t_f << ")\n";
        return starts;
    }
    starts.reserve(static_cast<std::size_t>(last - split.begin + 1));
    for (int t = split.begin; t <= last; ++t) starts.push_back(t);
    return starts;
}

namespace {

struct RawPeriod {
    std::vector<std::string> ids;
    Matrix flow;
    std::unordered_map<std::string, double> post_mile;
};

RawPeriod load_raw(const ManifestEntry& entry) {
    RawPeriod rp;
    auto rows = read_csv(entry.flow_file);
    if (rows.size() < 2) throw ConfigError("flow file too short: " + entry.flow_file);
    rp.ids = rows[0];
    const int n = static_cast<int>(rp.ids.size());
    const int t_len = static_cast<int>(rows.size()) - 1;
    rp.flow = Matrix(t_len, n);
    for (int t = 0; t < t_len; ++t) {
        const auto& row = rows[static_cast<std::size_t>(t) + 1];
        if (static_cast<int>(row.size()) != n)
            throw ConfigError("flow row width mismatch in " + entry.flow_file);
        for (int c = 0; c < n; ++c) rp.flow(t, c) = parse_cell(row[static_cast<std::size_t>(c)]);
    }

    auto sensor_rows = read_csv(entry.sensors_file);
    if (sensor_rows.empty() || sensor_rows[0].empty() || sensor_rows[0][0] != "sensor_id")
        throw ConfigError("sensors file needs 'sensor_id' header: " + entry.sensors_file);
    if (sensor_rows.size() - 1 != rp.ids.size())
        throw ConfigError("sensor count differs between flow header and sensors file for period " +
                          entry.name);

    auto meta_rows = read_csv(entry.metadata_file);
    if (meta_rows.empty() || meta_rows[0].size() < 2 || meta_rows[0][0] != "sensor_id" ||
        meta_rows[0][1] != "post_mile")
        throw ConfigError("metadata file needs 'sensor_id,post_mile' header: " + entry.metadata_file);
    for (std::size_t i = 1; i < meta_rows.size(); ++i)
        rp.post_mile[meta_rows[i][0]] = parse_cell(meta_rows[i][1]);
    return rp;
}

} // namespace

IngestResult ingest_network(const DatasetManifest& manifest, const IngestOptions& options) {
    std::vector<RawPeriod> raw;
    raw.reserve(manifest.entries.size());
    for (const auto& entry : manifest.entries) raw.push_back(load_raw(entry));

    // per-period sensor curation: optional post-mile cut, then missing-rate
    std::vector<CleanResult> cleaned(raw.size());
    for (std::size_t p = 0; p < raw.size(); ++p) {
        std::vector<int> cols;
        std::vector<std::string> ids;
        for (int c = 0; c < raw[p].flow.cols; ++c) {
            const std::string& id = raw[p].ids[static_cast<std::size_t>(c)];
            auto it = raw[p].post_mile.find(id);
            if (it == raw[p].post_mile.end())
                throw ConfigError("sensor " + id + " missing from metadata of period " +
                                  manifest.entries[p].name);
            if (options.post_mile_max && !(it->second < *options.post_mile_max)) continue;
            cols.push_back(c);
            ids.push_back(id);
        }
        Matrix sub(raw[p].flow.rows, static_cast<int>(cols.size()));
        for (int t = 0; t < sub.rows; ++t)
            for (std::size_t k = 0; k < cols.size(); ++k)
                sub(t, static_cast<int>(k)) = raw[p].flow(t, cols[k]);
        cleaned[p] = filter_and_interpolate(sub, ids, options.max_missing_rate);
    }

    std::vector<std::vector<std::string>> sets;
    sets.reserve(cleaned.size());
    for (const auto& c : cleaned) sets.push_back(c.kept_ids);
    const auto retained = enforce_continuity(sets);

    // final per-period order: previous period's order, then new ids in file order
    IngestResult result;
    std::vector<std::string> prev_order;
    for (std::size_t p = 0; p < cleaned.size(); ++p) {
        std::unordered_set<std::string> allowed(retained[p].begin(), retained[p].end());
        std::vector<std::string> order = prev_order;
        std::unordered_set<std::string> seen(prev_order.begin(), prev_order.end());
        for (const std::string& id : cleaned[p].kept_ids)
            if (allowed.count(id) && !seen.count(id)) {
                order.push_back(id);
                seen.insert(id);
            }

        std::unordered_map<std::string, int> col_of;
        for (std::size_t k = 0; k < cleaned[p].kept_ids.size(); ++k)
            col_of[cleaned[p].kept_ids[k]] = static_cast<int>(k);

        PeriodDataset ds;
        ds.name = manifest.entries[p].name;
        ds.flow = Matrix(cleaned[p].flow.rows, static_cast<int>(order.size()));
        std::vector<double> miles(order.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            auto it = col_of.find(order[k]);
            if (it == col_of.end())
                throw ConfigError("internal: sensor " + order[k] + " lost in period " + ds.name);
            for (int t = 0; t < ds.flow.rows; ++t)
                ds.flow(t, static_cast<int>(k)) = cleaned[p].flow(t, it->second);
            miles[k] = raw[p].post_mile.at(order[k]);
        }

        const int t_len = ds.flow.rows;
        const auto& entry = manifest.entries[p];
        const int step_slots = entry.interval_minutes / 5;
        ds.tod_index.resize(static_cast<std::size_t>(t_len));
        ds.dow_index.resize(static_cast<std::size_t>(t_len));
        for (int t = 0; t < t_len; ++t) {
            const long abs_slot = entry.start_slot + static_cast<long>(t) * step_slots;
            ds.tod_index[static_cast<std::size_t>(t)] = static_cast<int>(abs_slot % k_tod_slots);
            ds.dow_index[static_cast<std::size_t>(t)] =
                static_cast<int>((entry.start_dow + abs_slot / k_tod_slots) % k_dow_slots);
        }
        ds.train = train_split(t_len);
        ds.val = val_split(t_len);
        ds.test = test_split(t_len);

        double sum = 0.0;
        long cnt = 0;
        for (int t = ds.train.begin; t < ds.train.end; ++t)
            for (int c = 0; c < ds.flow.cols; ++c) {
                sum += ds.flow(t, c);
                cnt++;
            }
        ds.norm_mean = cnt > 0 ? sum / cnt : 0.0;
        double sq = 0.0;
        for (int t = ds.train.begin; t < ds.train.end; ++t)
            for (int c = 0; c < ds.flow.cols; ++c) {
                const double d = ds.flow(t, c) - ds.norm_mean;
                sq += d * d;
            }
        ds.norm_std = cnt > 0 ? std::sqrt(sq / cnt) : 1.0;
        if (ds.norm_std < 1e-12) ds.norm_std = 1.0;

        PeriodGraph g;
        g.name = ds.name;
        g.sensor_ids = order;
        g.adjacency = build_adjacency(miles, options.adjacency_delta, options.adjacency_epsilon);
        for (int i = 0; i < g.adjacency.rows; ++i)
            for (int j = i + 1; j < g.adjacency.cols; ++j)
                if (g.adjacency(i, j) > 0.0) g.edges.emplace_back(i, j);

        result.network.periods.push_back(std::move(g));
        result.datasets.push_back(std::move(ds));
        prev_order = std::move(order);
    }
    return result;
}

} // namespace comemnet
