#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "comemnet/csv.hpp"
#include "comemnet/errors.hpp"
#include "commands.hpp"

namespace comemnet::cli {

namespace {

double round2(double v) { return std::round(v * 100.0) / 100.0; }

std::string num(double v) { return format_double(round2(v)); }

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) out.push_back(field);
    return out;
}

struct MetricLine {
    std::string period;
    std::string horizon;
    std::string metric;
    double value = 0.0;
};

std::vector<MetricLine> parse_metrics(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("no metrics.csv in " + path.parent_path().string() +
                              ": not a finished run directory");
    std::string header;
    std::getline(f, header);
    if (header != "run_id,variant,period,horizon,metric,value,nodes_total,nodes_trained")
        throw ConfigError("unrecognized metrics.csv header in " + path.string());
    std::vector<MetricLine> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        auto cols = split_csv_line(line);
        if (cols.size() != 8) throw ConfigError("malformed metrics row: " + line);
        rows.push_back({cols[2], cols[3], cols[4], std::stod(cols[5])});
    }
    if (rows.empty()) throw ConfigError("metrics.csv has no rows in " + path.string());
    return rows;
}

struct ForgetLine {
    int train_period = 0;
    int eval_period = 0;
    std::string train_label;
    std::string eval_label;
    double mae = 0.0;
    double bt = 0.0;
};

std::vector<ForgetLine> parse_forgetting(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    std::vector<ForgetLine> rows;
    if (!f) return rows;
    std::string line;
    std::getline(f, line); // header
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        auto cols = split_csv_line(line);
        if (cols.size() != 6) throw ConfigError("malformed forgetting row: " + line);
        rows.push_back({std::stoi(cols[0]), std::stoi(cols[1]), cols[2], cols[3],
                        std::stod(cols[4]), std::stod(cols[5])});
    }
    return rows;
}

// ---- svg primitives ----------------------------------------------------

std::string svg_open(int w, int h) {
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h
       << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
       << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";
    return os.str();
}

void svg_line(std::ostringstream& os, double x1, double y1, double x2, double y2,
              const std::string& color, double width = 1.0) {
    os << "<line x1=\"" << num(x1) << "\" y1=\"" << num(y1) << "\" x2=\"" << num(x2)
       << "\" y2=\"" << num(y2) << "\" stroke=\"" << color << "\" stroke-width=\""
       << num(width) << "\"/>\n";
}

void svg_rect(std::ostringstream& os, double x, double y, double w, double h,
              const std::string& fill, const std::string& stroke = "none") {
    os << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w)
       << "\" height=\"" << num(h) << "\" fill=\"" << fill << "\" stroke=\"" << stroke
       << "\"/>\n";
}

void svg_text(std::ostringstream& os, double x, double y, const std::string& text,
              int size = 11, const std::string& anchor = "start",
              const std::string& color = "#333333") {
    os << "<text x=\"" << num(x) << "\" y=\"" << num(y) << "\" font-family=\"sans-serif\""
       << " font-size=\"" << size << "\" text-anchor=\"" << anchor << "\" fill=\"" << color
       << "\">" << text << "</text>\n";
}

void svg_polyline(std::ostringstream& os, const std::vector<std::pair<double, double>>& pts,
                  const std::string& color) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) os << ' ';
        os << num(pts[i].first) << ',' << num(pts[i].second);
    }
    os << "\"/>\n";
}

// ---- plots ---------------------------------------------------------------

// MAE/RMSE at the average horizon against period index.
std::string lines_svg(const std::vector<MetricLine>& rows) {
    std::vector<std::string> periods;
    for (const auto& r : rows)
        if (std::find(periods.begin(), periods.end(), r.period) == periods.end())
            periods.push_back(r.period);

    const std::vector<std::pair<std::string, std::string>> series = {{"MAE", "#1f77b4"},
                                                                     {"RMSE", "#d62728"}};
    double vmax = 0.0;
    std::map<std::string, std::map<std::string, double>> by_metric; // metric -> period -> value
    for (const auto& r : rows)
        if (r.horizon.rfind("avg-", 0) == 0 &&
            (r.metric == "MAE" || r.metric == "RMSE")) {
            by_metric[r.metric][r.period] = r.value;
            vmax = std::max(vmax, r.value);
        }
    if (vmax <= 0.0) vmax = 1.0;
    vmax *= 1.05;

    const double x0 = 60, x1 = 620, y0 = 350, y1 = 20;
    auto px = [&](std::size_t i) {
        if (periods.size() < 2) return (x0 + x1) / 2;
        return x0 + static_cast<double>(i) * (x1 - x0) / (static_cast<double>(periods.size()) - 1);
    };
    auto py = [&](double v) { return y0 - v / vmax * (y0 - y1); };

    std::ostringstream os;
    os << svg_open(640, 400);
    svg_line(os, x0, y0, x1, y0, "#333333");
    svg_line(os, x0, y0, x0, y1, "#333333");
    for (int t = 0; t <= 4; ++t) {
        const double v = vmax * t / 4.0;
        svg_line(os, x0 - 4, py(v), x0, py(v), "#333333");
        svg_text(os, x0 - 8, py(v) + 4, num(v), 11, "end");
    }
    for (std::size_t i = 0; i < periods.size(); ++i)
        svg_text(os, px(i), y0 + 16, periods[i], 11, "middle");
    svg_text(os, (x0 + x1) / 2, 390, "period", 12, "middle");

    double legend_y = 30;
    for (const auto& [metric, color] : series) {
        auto it = by_metric.find(metric);
        if (it == by_metric.end()) continue;
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < periods.size(); ++i) {
            auto v = it->second.find(periods[i]);
            if (v != it->second.end()) pts.push_back({px(i), py(v->second)});
        }
        svg_polyline(os, pts, color);
        for (const auto& p : pts)
            os << "<circle cx=\"" << num(p.first) << "\" cy=\"" << num(p.second)
               << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        svg_text(os, 560, legend_y, metric, 12, "start", color);
        legend_y += 16;
    }
    os << "</svg>\n";
    return os.str();
}

// Per-node feature distributions of the last sampler pass: up to four nodes,
// highest drift score first.
std::string histogram_svg(const nlohmann::json& report) {
    std::vector<std::pair<double, std::string>> ranked; // (-score, id) for desc/asc ordering
    for (auto it = report["scores"].begin(); it != report["scores"].end(); ++it)
        ranked.push_back({-it.value().get<double>(), it.key()});
    std::sort(ranked.begin(), ranked.end());
    const std::size_t shown = std::min<std::size_t>(4, ranked.size());

    const auto& hist = report["hist_cur"];
    double mass_max = 0.0;
    for (std::size_t i = 0; i < shown; ++i) {
        const auto& id = ranked[i].second;
        if (!hist.contains(id)) continue;
        for (const auto& b : hist[id]) mass_max = std::max(mass_max, b.get<double>());
    }
    if (mass_max <= 0.0) mass_max = 1.0;

    const double panel_w = 140, panel_h = 150, gap = 20, top = 30;
    const int width = static_cast<int>(gap + shown * (panel_w + gap));
    std::ostringstream os;
    os << svg_open(std::max(width, 200), 230);
    svg_text(os, 10, 18, "node feature distributions (drift-ranked)", 12);
    for (std::size_t i = 0; i < shown; ++i) {
        const auto& id = ranked[i].second;
        if (!hist.contains(id)) continue;
        const double ox = gap + static_cast<double>(i) * (panel_w + gap);
        const auto& bins = hist[id];
        const double bw = panel_w / static_cast<double>(bins.size());
        svg_line(os, ox, top + panel_h, ox + panel_w, top + panel_h, "#333333");
        for (std::size_t b = 0; b < bins.size(); ++b) {
            const double m = bins[b].get<double>();
            const double h = m / mass_max * panel_h;
            svg_rect(os, ox + static_cast<double>(b) * bw, top + panel_h - h, bw - 1.0, h,
                     "#1f77b4");
        }
        svg_text(os, ox + panel_w / 2, top + panel_h + 16, id, 11, "middle");
        svg_text(os, ox + panel_w / 2, top + panel_h + 30,
                 "drift " + num(-ranked[i].first), 10, "middle", "#666666");
    }
    os << "</svg>\n";
    return os.str();
}

// Lower-triangular backward-transfer grid: red = forgetting, blue = gain.
std::string heatmap_svg(const std::vector<ForgetLine>& cells) {
    int n = 0;
    for (const auto& c : cells) n = std::max(n, c.train_period + 1);
    std::vector<std::string> labels(static_cast<std::size_t>(n));
    for (const auto& c : cells) labels[static_cast<std::size_t>(c.train_period)] = c.train_label;
    double bt_max = 0.0;
    for (const auto& c : cells) bt_max = std::max(bt_max, std::abs(c.bt));
    if (bt_max <= 0.0) bt_max = 1.0;

    const double cell = 52, ox = 90, oy = 50;
    const int w = static_cast<int>(ox + n * cell + 20);
    const int h = static_cast<int>(oy + n * cell + 40);
    std::ostringstream os;
    os << svg_open(w, h);
    svg_text(os, ox, 20, "backward transfer (train period x eval period)", 12);
    for (int i = 0; i < n; ++i) {
        svg_text(os, ox - 8, oy + i * cell + cell / 2 + 4, labels[static_cast<std::size_t>(i)],
                 11, "end");
        svg_text(os, ox + i * cell + cell / 2, oy + n * cell + 16,
                 labels[static_cast<std::size_t>(i)], 11, "middle");
    }
    for (const auto& c : cells) {
        const double x = ox + c.eval_period * cell;
        const double y = oy + c.train_period * cell;
        const double t = std::min(1.0, std::abs(c.bt) / bt_max);
        const int shade = static_cast<int>(std::round(255.0 * (1.0 - t)));
        std::ostringstream color;
        if (c.bt >= 0.0)
            color << "rgb(255," << shade << "," << shade << ")";
        else
            color << "rgb(" << shade << "," << shade << ",255)";
        svg_rect(os, x, y, cell - 2, cell - 2, color.str(), "#cccccc");
        svg_text(os, x + (cell - 2) / 2, y + cell / 2 + 4, num(c.bt), 10, "middle");
    }
    os << "</svg>\n";
    return os.str();
}

} // namespace

int cmd_report(const ReportArgs& args) {
    const std::filesystem::path run_dir(args.run_dir);
    if (!std::filesystem::is_directory(run_dir))
        throw ConfigError("run directory does not exist: " + run_dir.string());

    // gather and validate every input before the first write so a bad run
    // directory never leaves partial output behind
    auto metrics = parse_metrics(run_dir / "metrics.csv");
    auto forgetting = parse_forgetting(run_dir / "forgetting.csv");

    nlohmann::json last_report; // last epoch of the last period that sampled
    {
        std::ifstream f(run_dir / "sampler_reports.json", std::ios::binary);
        if (f) {
            nlohmann::json j;
            f >> j;
            for (const auto& p : j["periods"])
                if (!p["reports"].empty()) last_report = p["reports"].back();
        }
    }

    std::vector<std::pair<std::string, std::string>> outputs;

    {
        std::ostringstream csv;
        csv << "period,horizon,metric,value\n";
        for (const auto& r : metrics)
            csv << r.period << ',' << r.horizon << ',' << r.metric << ','
                << format_double(r.value) << '\n';
        outputs.push_back({"metric_lines.csv", csv.str()});
        outputs.push_back({"metric_lines.svg", lines_svg(metrics)});
    }

    if (!last_report.is_null()) {
        std::ostringstream csv;
        csv << "series,node_id,bin,mass\n";
        for (const char* series : {"hist_prev", "hist_cur"}) {
            const std::string tag = series == std::string("hist_prev") ? "prev" : "cur";
            for (auto it = last_report[series].begin(); it != last_report[series].end(); ++it)
                for (std::size_t b = 0; b < it.value().size(); ++b)
                    csv << tag << ',' << it.key() << ',' << b << ','
                        << format_double(it.value()[b].get<double>()) << '\n';
        }
        outputs.push_back({"node_histograms.csv", csv.str()});
        outputs.push_back({"node_histograms.svg", histogram_svg(last_report)});
    }

    if (!forgetting.empty()) {
        int n = 0;
        for (const auto& c : forgetting) n = std::max(n, c.train_period + 1);
        std::vector<std::string> labels(static_cast<std::size_t>(n));
        std::vector<std::vector<std::string>> grid(
            static_cast<std::size_t>(n), std::vector<std::string>(static_cast<std::size_t>(n)));
        for (const auto& c : forgetting) {
            labels[static_cast<std::size_t>(c.train_period)] = c.train_label;
            grid[static_cast<std::size_t>(c.train_period)][static_cast<std::size_t>(c.eval_period)] =
                format_double(c.bt);
        }
        std::ostringstream csv;
        csv << "train_period";
        for (int j = 0; j < n; ++j) csv << ',' << labels[static_cast<std::size_t>(j)];
        csv << '\n';
        for (int i = 0; i < n; ++i) {
            csv << labels[static_cast<std::size_t>(i)];
            for (int j = 0; j < n; ++j)
                csv << ',' << grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            csv << '\n';
        }
        outputs.push_back({"forgetting_heatmap.csv", csv.str()});
        outputs.push_back({"forgetting_heatmap.svg", heatmap_svg(forgetting)});
    }

    const std::filesystem::path out =
        args.out.empty() ? run_dir / "report" : std::filesystem::path(args.out);
    std::filesystem::create_directories(out);
    for (const auto& [name, content] : outputs) {
        std::ofstream f(out / name, std::ios::binary);
        if (!f) throw ConfigError("cannot write " + (out / name).string());
        f << content;
        std::cout << "wrote " << (out / name).string() << "\n";
    }
    return 0;
}

} // namespace comemnet::cli
