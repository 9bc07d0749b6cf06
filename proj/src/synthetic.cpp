#include "comemnet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "comemnet/csv.hpp"
#include "comemnet/dataset.hpp"
#include "comemnet/errors.hpp"
#include "comemnet/rng.hpp"

namespace comemnet {

namespace {

constexpr double k_two_pi = 6.283185307179586;

// Each node mixes a broad daily swell with two commuter bumps whose place,
// width and height are node-specific. The bumps are what makes node identity
// matter: an hour-ahead forecast cannot see an approaching peak in its input
// window, it has to know where this node's peaks sit.
struct NodeGen {
    double base;
    double amp;
    double phase;
    double weekend_factor; // bumps shrink on weekends
    double noise_sigma;
    double am_center, am_width, am_height;
    double pm_center, pm_width, pm_height;
};

void draw_bumps(Rng& rng, NodeGen& g) {
    g.am_center = rng.uniform(72.0, 120.0); // 06:00 .. 10:00
    g.am_width = rng.uniform(8.0, 20.0);    // 40 .. 100 minutes
    g.am_height = rng.uniform(80.0, 180.0);
    g.pm_center = rng.uniform(180.0, 228.0); // 15:00 .. 19:00
    g.pm_width = rng.uniform(8.0, 20.0);
    g.pm_height = rng.uniform(80.0, 180.0);
}

NodeGen draw_generator(Rng& rng) {
    NodeGen g;
    g.base = rng.uniform(40.0, 90.0);
    g.amp = rng.uniform(8.0, 20.0);
    g.phase = rng.uniform(0.0, k_two_pi);
    g.weekend_factor = rng.uniform(0.5, 0.8);
    g.noise_sigma = rng.uniform(2.0, 5.0);
    draw_bumps(rng, g);
    return g;
}

double bump(double slot, double center, double width) {
    const double d = (slot - center) / width;
    return std::exp(-0.5 * d * d);
}

double clamp(double v, double lo, double hi) { return std::min(hi, std::max(lo, v)); }

// A drift event perturbs the peak schedule: centers move up to 90 minutes,
// widths and heights rescale. Bounded on purpose, a node keeps a recognizable
// identity across drifts the way a real sensor does.
void drift_bumps(Rng& rng, NodeGen& g) {
    g.am_center = clamp(g.am_center + rng.uniform(-18.0, 18.0), 60.0, 132.0);
    g.am_width = clamp(g.am_width * rng.uniform(0.7, 1.4), 6.0, 26.0);
    g.am_height = clamp(g.am_height * rng.uniform(0.6, 1.5), 50.0, 220.0);
    g.pm_center = clamp(g.pm_center + rng.uniform(-18.0, 18.0), 168.0, 240.0);
    g.pm_width = clamp(g.pm_width * rng.uniform(0.7, 1.4), 6.0, 26.0);
    g.pm_height = clamp(g.pm_height * rng.uniform(0.6, 1.5), 50.0, 220.0);
}

double round3(double v) { return std::round(v * 1000.0) / 1000.0; }

} // namespace

SynthResult synth_generate(const SynthConfig& config) {
    if (config.periods < 1) throw ConfigError("synth: periods must be >= 1");
    if (config.initial_nodes < 1) throw ConfigError("synth: initial_nodes must be >= 1");
    if (config.growth < 0) throw ConfigError("synth: growth must be >= 0");
    if (config.drift_fraction < 0.0 || config.drift_fraction > 1.0)
        throw ConfigError("synth: drift fraction must be in [0,1]");
    if (config.days < 1) throw ConfigError("synth: days must be >= 1");

    SynthResult result;
    result.config = config;
    const int t_len = config.days * k_tod_slots;

    std::vector<std::string> ids;
    std::vector<NodeGen> gens;
    for (int tau = 0; tau < config.periods; ++tau) {
        SynthPeriod period;
        period.name = std::to_string(2011 + tau);

        const int n_old = static_cast<int>(ids.size());
        if (tau > 0 && config.drift_fraction > 0.0 && n_old > 0) {
            const int n_drift = static_cast<int>(std::floor(config.drift_fraction * n_old));
            std::vector<int> order(static_cast<std::size_t>(n_old));
            for (int i = 0; i < n_old; ++i) order[static_cast<std::size_t>(i)] = i;
            Rng pick(derive_seed(config.seed, "drift_pick", static_cast<std::uint64_t>(tau)));
            pick.shuffle(order);
            std::vector<int> chosen(order.begin(), order.begin() + n_drift);
            std::sort(chosen.begin(), chosen.end());
            for (int idx : chosen) {
                Rng redraw(derive_seed(config.seed, "drift", static_cast<std::uint64_t>(tau),
                                       static_cast<std::uint64_t>(idx)));
                // Drift perturbs a node's peak schedule; its base level stays.
                drift_bumps(redraw, gens[static_cast<std::size_t>(idx)]);
                period.drifted_ids.push_back(ids[static_cast<std::size_t>(idx)]);
            }
        }

        const int n_new = tau == 0 ? config.initial_nodes : config.growth;
        for (int k = 0; k < n_new; ++k) {
            const int idx = static_cast<int>(ids.size());
            std::string id = std::to_string(70000 + idx);
            Rng prng(derive_seed(config.seed, "params", static_cast<std::uint64_t>(idx)));
            gens.push_back(draw_generator(prng));
            ids.push_back(id);
            period.new_ids.push_back(id);
        }

        const int n = static_cast<int>(ids.size());
        period.sensor_ids = ids;
        period.post_miles.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) period.post_miles[static_cast<std::size_t>(i)] = 0.4 * i;

        period.flow = Matrix(t_len, n);
        for (int i = 0; i < n; ++i) {
            const NodeGen& g = gens[static_cast<std::size_t>(i)];
            Rng noise(derive_seed(config.seed, "noise", static_cast<std::uint64_t>(tau),
                                  static_cast<std::uint64_t>(i)));
            for (int t = 0; t < t_len; ++t) {
                const int slot = t % k_tod_slots;
                const int dow = (t / k_tod_slots) % k_dow_slots;
                double v = g.base + g.amp * std::sin(k_two_pi * slot / k_tod_slots + g.phase);
                double peaks = g.am_height * bump(slot, g.am_center, g.am_width) +
                               g.pm_height * bump(slot, g.pm_center, g.pm_width);
                if (dow >= 5) peaks *= g.weekend_factor;
                v += peaks + noise.normal(0.0, g.noise_sigma);
                period.flow(t, i) = round3(std::max(0.0, v));
            }
        }
        result.periods.push_back(std::move(period));
    }
    return result;
}

void write_synth_dataset(const SynthResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);

    nlohmann::json manifest;
    manifest["periods"] = nlohmann::json::array();
    nlohmann::json info;
    info["config"] = {{"periods", result.config.periods},
                      {"initial_nodes", result.config.initial_nodes},
                      {"growth", result.config.growth},
                      {"drift_fraction", result.config.drift_fraction},
                      {"days", result.config.days},
                      {"seed", result.config.seed}};
    info["periods"] = nlohmann::json::array();

    for (const auto& period : result.periods) {
        const std::string flow_name = period.name + "_flow.csv";
        const std::string sensors_name = period.name + "_sensors.csv";
        const std::string meta_name = period.name + "_metadata.csv";

        std::vector<std::vector<std::string>> flow_rows;
        flow_rows.reserve(static_cast<std::size_t>(period.flow.rows) + 1);
        flow_rows.push_back(period.sensor_ids);
        for (int t = 0; t < period.flow.rows; ++t) {
            std::vector<std::string> row(static_cast<std::size_t>(period.flow.cols));
            for (int c = 0; c < period.flow.cols; ++c)
                row[static_cast<std::size_t>(c)] = format_double(period.flow(t, c));
            flow_rows.push_back(std::move(row));
        }
        write_csv((fs::path(out_dir) / flow_name).string(), flow_rows);

        std::vector<std::vector<std::string>> sensor_rows{{"sensor_id"}};
        for (const auto& id : period.sensor_ids) sensor_rows.push_back({id});
        write_csv((fs::path(out_dir) / sensors_name).string(), sensor_rows);

        std::vector<std::vector<std::string>> meta_rows{{"sensor_id", "post_mile"}};
        for (std::size_t i = 0; i < period.sensor_ids.size(); ++i)
            meta_rows.push_back({period.sensor_ids[i], format_double(period.post_miles[i])});
        write_csv((fs::path(out_dir) / meta_name).string(), meta_rows);

        manifest["periods"].push_back({{"name", period.name},
                                       {"flow_file", flow_name},
                                       {"sensors_file", sensors_name},
                                       {"metadata_file", meta_name},
                                       {"interval_minutes", 5},
                                       {"start_dow", 0},
                                       {"start_slot", 0}});
        info["periods"].push_back({{"name", period.name},
                                   {"new_ids", period.new_ids},
                                   {"drifted_ids", period.drifted_ids}});
    }

    std::ofstream mf((fs::path(out_dir) / "manifest.json").string());
    if (!mf) throw ConfigError("cannot write manifest.json in " + out_dir);
    mf << manifest.dump(2) << '\n';
    std::ofstream inf((fs::path(out_dir) / "synth_info.json").string());
    if (!inf) throw ConfigError("cannot write synth_info.json in " + out_dir);
    inf << info.dump(2) << '\n';
}

} // namespace comemnet
