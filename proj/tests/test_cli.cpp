#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

// exercises the installed binary the way a user would, via a shell
int run_cli(const std::string& args) {
    const std::string cmd = std::string(COMEMNET_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return rc < 0 ? rc : WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("comemnet_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_tiny_config(const fs::path& p) {
    // leaves batch_size, lr, beta and lr_decay at their defaults on purpose:
    // the resolved-config test below asserts those survive into the artifact
    std::ofstream f(p);
    f << R"({"t_h":4,"t_f":3,"n_layers":2,"h_dim":8,"e_n":6,"d_d":3,"d_w":3,
             "epochs":2,"patience":2,"k":3,"rho":0.3,
             "sampler_batches":2,"sampler_batch_windows":4,
             "max_train_batches_per_epoch":2,"max_eval_windows":16})";
}

} // namespace

TEST_CASE("synth writes a loadable dataset and reruns byte-identically") {
    const auto dir = fresh_dir("synth");
    const std::string base = "synth --periods 3 --nodes 8 --growth 2 --drift 0.3 --days 1 --seed 7";
    CHECK(run_cli(base + " --out " + (dir / "a").string()) == 0);
    CHECK(run_cli(base + " --out " + (dir / "b").string()) == 0);
    CHECK(fs::exists(dir / "a" / "manifest.json"));
    for (const auto& entry : fs::directory_iterator(dir / "a")) {
        const auto name = entry.path().filename();
        CHECK(slurp(entry.path()) == slurp(dir / "b" / name));
    }
    CHECK(run_cli("ingest " + (dir / "a" / "manifest.json").string()) == 0);

    CHECK(run_cli("synth --periods 1 --nodes 5 --days 1 --seed 3 --out " +
                  (dir / "single").string()) == 0);
    CHECK(run_cli("ingest " + (dir / "single" / "manifest.json").string()) == 0);
}

TEST_CASE("train writes a complete run directory with default hyperparameters resolved") {
    const auto dir = fresh_dir("train");
    CHECK(run_cli("synth --periods 2 --nodes 6 --growth 2 --drift 0.5 --days 1 --seed 9 --out " +
                  (dir / "data").string()) == 0);
    write_tiny_config(dir / "cfg.json");

    const std::string manifest = (dir / "data" / "manifest.json").string();
    CHECK(run_cli("train " + manifest + " --config " + (dir / "cfg.json").string() +
                  " --seed 5 --forgetting --out " + (dir / "runs").string()) == 0);

    const fs::path run = dir / "runs" / "comemnet_s5_rho0.3_K3";
    for (const char* name : {"resolved_config.json", "metrics.csv", "sampler_reports.json",
                             "summary.json", "checkpoint.json", "forgetting.csv"})
        CHECK(fs::exists(run / name));

    nlohmann::json resolved;
    std::ifstream(run / "resolved_config.json") >> resolved;
    CHECK(resolved["config"]["batch_size"] == 128);
    CHECK(resolved["config"]["lr"] == 0.01);
    CHECK(resolved["config"]["beta"] == 0.99);
    CHECK(resolved["config"]["lr_decay"] == 0.5);
    CHECK(resolved["config"]["seed"] == 5);
    CHECK(resolved["variant"] == "comemnet");

    SUBCASE("identical rerun reproduces every artifact byte for byte") {
        CHECK(run_cli("train " + manifest + " --config " + (dir / "cfg.json").string() +
                      " --seed 5 --forgetting --out " + (dir / "runs2").string()) == 0);
        const fs::path run2 = dir / "runs2" / "comemnet_s5_rho0.3_K3";
        for (const char* name : {"metrics.csv", "sampler_reports.json", "forgetting.csv",
                                 "checkpoint.json", "summary.json"})
            CHECK(slurp(run / name) == slurp(run2 / name));
    }

    SUBCASE("report renders tables and plots, and histogram masses stay normalized") {
        CHECK(run_cli("report " + run.string()) == 0);
        for (const char* name :
             {"metric_lines.csv", "metric_lines.svg", "node_histograms.csv",
              "node_histograms.svg", "forgetting_heatmap.csv", "forgetting_heatmap.svg"})
            CHECK(fs::exists(run / "report" / name));

        std::ifstream hist(run / "report" / "node_histograms.csv");
        std::string line;
        std::getline(hist, line);
        CHECK(line == "series,node_id,bin,mass");
        std::map<std::string, double> per_node;
        while (std::getline(hist, line)) {
            std::istringstream is(line);
            std::string series, node, bin, mass;
            std::getline(is, series, ',');
            std::getline(is, node, ',');
            std::getline(is, bin, ',');
            std::getline(is, mass, ',');
            per_node[series + "/" + node] += std::stod(mass);
        }
        CHECK(!per_node.empty());
        for (const auto& [node, total] : per_node)
            CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

        CHECK(run_cli("report " + run.string() + " --out " + (dir / "rep2").string()) == 0);
        CHECK(slurp(run / "report" / "metric_lines.svg") ==
              slurp(dir / "rep2" / "metric_lines.svg"));
    }

    SUBCASE("static variant dispatches and tags its rows") {
        CHECK(run_cli("train " + manifest + " --config " + (dir / "cfg.json").string() +
                      " --seed 5 --variant static --out " + (dir / "runs_static").string()) == 0);
        const std::string csv =
            slurp(dir / "runs_static" / "static_s5_rho0.3_K3" / "metrics.csv");
        CHECK(csv.find(",static,") != std::string::npos);
        CHECK(csv.find(",comemnet,") == std::string::npos);
    }
}

TEST_CASE("sweep fans out deterministically and tags rows by value") {
    const auto dir = fresh_dir("sweep");
    CHECK(run_cli("synth --periods 2 --nodes 6 --growth 2 --drift 0.5 --days 1 --seed 9 --out " +
                  (dir / "data").string()) == 0);
    write_tiny_config(dir / "cfg.json");
    const std::string base = (dir / "data" / "manifest.json").string() + " --config " +
                             (dir / "cfg.json").string() + " --seed 4";
    const std::string common = base + " --param rho --values 0,0.3";

    CHECK(run_cli("sweep " + common + " --out " + (dir / "seq").string()) == 0);
    CHECK(run_cli("sweep " + common + " --parallel 2 --out " + (dir / "par").string()) == 0);
    const std::string seq = slurp(dir / "seq" / "sweep_rho.csv");
    CHECK(seq == slurp(dir / "par" / "sweep_rho.csv")); // fan-out cannot change the artifact
    CHECK(seq.find("rho,0,comemnet_s4_rho0_K3") != std::string::npos);
    CHECK(seq.find("rho,0.3,comemnet_s4_rho0.3_K3") != std::string::npos);
    CHECK(fs::exists(dir / "seq" / "comemnet_s4_rho0_K3" / "metrics.csv"));

    CHECK(run_cli("sweep " + base + " --param K --values 2 --out " + (dir / "k").string()) == 0);
    CHECK(fs::exists(dir / "k" / "sweep_K.csv"));
}

TEST_CASE("usage errors exit with code 2") {
    const auto dir = fresh_dir("errors");
    write_tiny_config(dir / "cfg.json");

    CHECK(run_cli("train " + (dir / "nope" / "manifest.json").string()) == 2);
    CHECK(run_cli("train") == 2);                    // missing required argument
    CHECK(run_cli("nonsense") == 2);                 // unknown command
    CHECK(run_cli("--help") == 0);

    CHECK(run_cli("synth --periods 2 --nodes 6 --growth 2 --days 1 --seed 9 --out " +
                  (dir / "data").string()) == 0);
    const std::string manifest = (dir / "data" / "manifest.json").string();
    CHECK(run_cli("train " + manifest + " --variant frozen") == 2);
    CHECK(run_cli("sweep " + manifest + " --param gamma --values 1") == 2);
    CHECK(run_cli("sweep " + manifest + " --param rho --values ''") == 2);
    CHECK(run_cli("sweep " + manifest + " --param rho") == 2); // --values required

    std::ofstream(dir / "bad.json") << R"({"learning_rate": 0.1})";
    CHECK(run_cli("train " + manifest + " --config " + (dir / "bad.json").string()) == 2);

    const auto empty = dir / "empty_run";
    fs::create_directories(empty);
    CHECK(run_cli("report " + empty.string()) == 2);
    CHECK(fs::is_empty(empty)); // no partial files on failure
    CHECK(run_cli("report " + (dir / "missing_dir").string()) == 2);
}
