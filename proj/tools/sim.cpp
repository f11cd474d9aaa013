#include "manetsim/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace manetsim;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot read config '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trace_name(const RunParams& p)
{
    std::ostringstream s;
    s << "trace_seed" << p.seed;
    if (p.n) {
        s << "_n" << *p.n;
    }
    if (p.t_f) {
        s << "_tf" << *p.t_f;
    }
    if (p.speed) {
        s << "_v" << *p.speed;
    }
    s << ".tsv";
    return s.str();
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Discrete-event OLSR / MP-OLSR route recovery simulator"};
    int preset = 0;
    std::string protocol;
    std::string recovery;
    std::string seeds;
    std::vector<double> tfs;
    std::vector<int> depths;
    std::vector<double> speeds;
    double duration = 0.0;
    std::string out_dir = "results";
    std::string config_path;
    bool trace = false;

    app.add_option("--preset", preset, "Scenario preset")->check(CLI::IsMember({1, 2, 3}));
    app.add_option("--protocol", protocol, "olsr or mpolsr");
    app.add_option("--recovery", recovery, "none, re, ftc or dr");
    app.add_option("--seeds", seeds, "Seed list, e.g. 1..5 or 1,4,9");
    app.add_option("--tf", tfs, "Failure time in seconds (repeatable)");
    app.add_option("--n", depths, "Scenario 2 failure depth (repeatable)");
    app.add_option("--speed", speeds, "Scenario 3 node speed in m/s (repeatable)");
    app.add_option("--duration", duration, "Simulated time in seconds");
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--config", config_path, "Config file; command-line options override it");
    app.add_flag("--trace", trace, "Write one event trace per run into the output directory");
    CLI11_PARSE(app, argc, argv);

    try {
        ScenarioSpec spec;
        if (!config_path.empty()) {
            spec = parse_config(read_file(config_path));
            if (preset != 0 && preset != spec.preset) {
                throw std::invalid_argument("--preset conflicts with the config file");
            }
        } else {
            spec = preset_spec(preset == 0 ? 1 : preset);
        }
        if (!protocol.empty()) {
            spec.net.protocol = parse_protocol(protocol);
        }
        if (!recovery.empty()) {
            spec.net.recovery.scheme = parse_scheme(recovery);
        }
        if (!seeds.empty()) {
            spec.seeds = parse_seed_list(seeds);
        }
        if (!tfs.empty()) {
            spec.t_f = tfs;
        }
        if (!depths.empty()) {
            spec.n = depths;
        }
        if (!speeds.empty()) {
            spec.speeds = speeds;
        }
        if (duration > 0.0) {
            spec.duration = duration;
        }
        spec.trace = spec.trace || trace;
        spec.validate();

        std::vector<RunResult> results;
        if (spec.trace) {
            std::filesystem::create_directories(out_dir);
            for (const auto& p : expand_runs(spec)) {
                std::ofstream tf(std::filesystem::path(out_dir) / trace_name(p));
                results.push_back(run_single(spec, p, &tf));
            }
        } else {
            results = run_batch(spec);
        }
        write_results(results, out_dir);
        std::cout << "wrote " << results.size() << " runs to " << out_dir << "/runs.csv and summary.csv\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
