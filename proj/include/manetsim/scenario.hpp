#pragma once

#include "manetsim/metrics.hpp"
#include "manetsim/network.hpp"
#include "manetsim/traffic.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace manetsim {

/// Everything needed to run a batch of simulations.
struct ScenarioSpec {
    int preset = 1;  // 1 and 2: dual chain with a failure; 3: random waypoint
    NetworkConfig net;
    std::vector<std::uint64_t> seeds{1};
    /// Failure instants in seconds. Empty: scenario 1 draws one per seed in
    /// [tf_min, tf_max]; scenario 2 uses every whole second of that range.
    std::vector<double> t_f;
    double tf_min = 15.0;
    double tf_max = 19.0;
    /// Scenario 2 failure depths: node n+1 of the upper chain goes down.
    std::vector<int> n{2};
    /// Scenario 3: one run per entry with every leg at exactly that speed.
    /// Empty: legs draw speeds in [speed_min, speed_max].
    std::vector<double> speeds;
    double speed_min = 1.0;
    double speed_max = 10.0;
    double duration = 50.0;  // seconds

    // topology
    std::size_t per_chain = 3;
    double spacing = 50.0;
    std::size_t node_count = 50;
    double area = 1000.0;
    double pause = 0.0;
    /// Scenario 1 link failure endpoints.
    NodeId fail_a = 2;
    NodeId fail_b = 3;

    // traffic
    double traffic_start = 10.0;
    double bit_rate = 100000.0;  // scenarios 1-2
    double packet_rate = 0.0;    // scenario 3 (takes precedence when > 0)
    std::uint32_t packet_size = 512;
    std::size_t flows = 1;

    bool trace = false;

    void validate() const;
};

ScenarioSpec preset_spec(int preset);

/// Parses the INI-style config text over the defaults of the preset it
/// names (`preset=` must come first if present). Throws std::invalid_argument
/// with the line number and key on any error.
ScenarioSpec parse_config(const std::string& text);

/// "1..5", "1,2,7" or "3".
std::vector<std::uint64_t> parse_seed_list(const std::string& s);

struct RunParams {
    std::uint64_t seed = 0;
    std::optional<double> t_f;
    std::optional<int> n;
    std::optional<double> speed;
};

struct RunResult {
    int preset = 0;
    Protocol protocol = Protocol::Olsr;
    Scheme recovery = Scheme::None;
    RunParams params;
    MetricsRecord metrics;
    std::size_t in_flight_at_end = 0;
    std::uint64_t events = 0;
    std::uint64_t fast_tcs = 0;
    std::vector<std::pair<NodeId, NodeId>> flow_pairs;
    std::string layout;  // node coordinates, "id:x:y" separated by spaces

    std::vector<double> latencies() const;
};

std::vector<RunParams> expand_runs(const ScenarioSpec& spec);

/// One isolated simulation. `trace` receives the event trace if given.
RunResult run_single(const ScenarioSpec& spec, const RunParams& params, std::ostream* trace = nullptr);

/// All runs of the spec, ordered by parameter tuple.
std::vector<RunResult> run_batch(const ScenarioSpec& spec);

void write_runs_csv(const std::vector<RunResult>& results, std::ostream& out);
void write_summary_csv(const std::vector<RunResult>& results, std::ostream& out);
/// Writes runs.csv and summary.csv into `dir`, creating it if needed.
void write_results(const std::vector<RunResult>& results, const std::string& dir);

} // namespace manetsim
