#include "manetsim/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace manetsim {

ScenarioSpec preset_spec(int preset)
{
    ScenarioSpec s;
    s.preset = preset;
    switch (preset) {
    case 1:
        break;
    case 2:
        s.per_chain = 9;
        s.duration = 100.0;
        s.tf_min = 20.0;
        s.tf_max = 25.0;
        s.n = {2, 3, 4, 5, 6, 7, 8};
        break;
    case 3:
        s.duration = 200.0;
        s.net.medium.tx_range = 250.0;
        s.packet_rate = 10.0;
        s.flows = 10;
        break;
    default:
        throw std::invalid_argument("preset must be 1, 2 or 3");
    }
    return s;
}

void ScenarioSpec::validate() const
{
    if (preset < 1 || preset > 3) {
        throw std::invalid_argument("preset must be 1, 2 or 3");
    }
    net.validate();
    if (seeds.empty()) {
        throw std::invalid_argument("seeds: at least one seed is required");
    }
    if (!(duration > 0.0)) {
        throw std::invalid_argument("duration must be > 0");
    }
    if (!(traffic_start >= 0.0) || traffic_start > duration) {
        throw std::invalid_argument("traffic start must lie in [0, duration]");
    }
    if (packet_size == 0 || flows == 0) {
        throw std::invalid_argument("traffic: packet_size and flows must be > 0");
    }
    if (packet_rate <= 0.0 && !(bit_rate > 0.0)) {
        throw std::invalid_argument("traffic: bit_rate or packet_rate must be > 0");
    }
    for (double t : t_f) {
        if (!(t >= 0.0) || t > duration) {
            throw std::invalid_argument("tf must lie in [0, duration]");
        }
    }
    if (preset != 3 && !(tf_min <= tf_max)) {
        throw std::invalid_argument("tf_min must be <= tf_max");
    }
    if (preset == 1) {
        const auto nodes = static_cast<NodeId>(2 * per_chain + 2);
        if (fail_a >= nodes || fail_b >= nodes || fail_a == fail_b) {
            throw std::invalid_argument("fail_link endpoints out of range");
        }
    }
    if (preset == 2) {
        if (n.empty()) {
            throw std::invalid_argument("n: at least one failure depth is required");
        }
        for (int d : n) {
            if (d < 1 || static_cast<std::size_t>(d) + 1 > per_chain) {
                throw std::invalid_argument("n must lie in [1, per_chain - 1] so the destination never fails");
            }
        }
    }
    if (preset == 3) {
        for (double v : speeds) {
            if (!(v > 0.0)) {
                throw std::invalid_argument("speeds must be > 0");
            }
        }
        RwpConfig{area, area, speed_min, speed_max, SimTime::from_seconds(pause)}.validate();
        if (flows > node_count * (node_count - 1)) {
            throw std::invalid_argument("too many flows for the node count");
        }
    }
}

// ---- config parsing -------------------------------------------------------

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return "";
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& v)
{
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) {
        throw std::invalid_argument("not a number: '" + v + "'");
    }
    return d;
}

long long to_int(const std::string& v)
{
    std::size_t used = 0;
    const long long i = std::stoll(v, &used);
    if (used != v.size()) {
        throw std::invalid_argument("not an integer: '" + v + "'");
    }
    return i;
}

std::size_t to_count(const std::string& v)
{
    const long long i = to_int(v);
    if (i < 0) {
        throw std::invalid_argument("must be >= 0");
    }
    return static_cast<std::size_t>(i);
}

bool to_bool(const std::string& v)
{
    if (v == "1" || v == "true" || v == "on" || v == "yes") {
        return true;
    }
    if (v == "0" || v == "false" || v == "off" || v == "no") {
        return false;
    }
    throw std::invalid_argument("not a boolean: '" + v + "'");
}

std::vector<std::string> split(const std::string& v, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

std::vector<double> to_doubles(const std::string& v)
{
    std::vector<double> out;
    for (const auto& x : split(v, ',')) {
        out.push_back(to_double(x));
    }
    return out;
}

// Integer lists accept ranges: "2..8" or "2,4,6".
std::vector<long long> to_int_list(const std::string& v)
{
    std::vector<long long> out;
    for (const auto& item : split(v, ',')) {
        const auto dots = item.find("..");
        if (dots == std::string::npos) {
            out.push_back(to_int(item));
            continue;
        }
        const long long a = to_int(item.substr(0, dots));
        const long long b = to_int(item.substr(dots + 2));
        if (b < a) {
            throw std::invalid_argument("empty range '" + item + "'");
        }
        for (long long i = a; i <= b; ++i) {
            out.push_back(i);
        }
    }
    if (out.empty()) {
        throw std::invalid_argument("empty list");
    }
    return out;
}

SimTime to_time(const std::string& v)
{
    return SimTime::from_seconds(to_double(v));
}

using Setter = std::function<void(ScenarioSpec&, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& setters()
{
    static const std::map<std::string, std::map<std::string, Setter>> table = {
        {"run",
         {
             {"preset", [](ScenarioSpec&, const std::string&) {}},  // applied in the first pass
             {"protocol", [](ScenarioSpec& s, const std::string& v) { s.net.protocol = parse_protocol(v); }},
             {"recovery", [](ScenarioSpec& s, const std::string& v) { s.net.recovery.scheme = parse_scheme(v); }},
             {"seeds", [](ScenarioSpec& s, const std::string& v) { s.seeds = parse_seed_list(v); }},
             {"tf", [](ScenarioSpec& s, const std::string& v) { s.t_f = to_doubles(v); }},
             {"tf_min", [](ScenarioSpec& s, const std::string& v) { s.tf_min = to_double(v); }},
             {"tf_max", [](ScenarioSpec& s, const std::string& v) { s.tf_max = to_double(v); }},
             {"n",
              [](ScenarioSpec& s, const std::string& v) {
                  s.n.clear();
                  for (long long i : to_int_list(v)) {
                      s.n.push_back(static_cast<int>(i));
                  }
              }},
             {"speeds", [](ScenarioSpec& s, const std::string& v) { s.speeds = to_doubles(v); }},
             {"speed_min", [](ScenarioSpec& s, const std::string& v) { s.speed_min = to_double(v); }},
             {"speed_max", [](ScenarioSpec& s, const std::string& v) { s.speed_max = to_double(v); }},
             {"duration", [](ScenarioSpec& s, const std::string& v) { s.duration = to_double(v); }},
             {"trace", [](ScenarioSpec& s, const std::string& v) { s.trace = to_bool(v); }},
         }},
        {"olsr",
         {
             {"hello_interval", [](ScenarioSpec& s, const std::string& v) { s.net.olsr.hello_interval = to_time(v); }},
             {"tc_interval", [](ScenarioSpec& s, const std::string& v) { s.net.olsr.tc_interval = to_time(v); }},
             {"neighb_hold_time",
              [](ScenarioSpec& s, const std::string& v) { s.net.olsr.neighb_hold_time = to_time(v); }},
             {"top_hold_time", [](ScenarioSpec& s, const std::string& v) { s.net.olsr.top_hold_time = to_time(v); }},
             {"max_jitter", [](ScenarioSpec& s, const std::string& v) { s.net.olsr.max_jitter = to_time(v); }},
             {"dup_hold_time", [](ScenarioSpec& s, const std::string& v) { s.net.olsr.dup_hold_time = to_time(v); }},
             {"lln", [](ScenarioSpec& s, const std::string& v) { s.net.olsr.lln_enabled = to_bool(v); }},
             {"send_empty_tc", [](ScenarioSpec& s, const std::string& v) { s.net.olsr.send_empty_tc = to_bool(v); }},
         }},
        {"mpolsr",
         {
             {"k", [](ScenarioSpec& s, const std::string& v) { s.net.multipath.k = to_count(v); }},
             {"node_penalty",
              [](ScenarioSpec& s, const std::string& v) { s.net.multipath.node_penalty_factor = to_double(v); }},
             {"edge_penalty",
              [](ScenarioSpec& s, const std::string& v) { s.net.multipath.edge_penalty_factor = to_double(v); }},
             {"disjointness",
              [](ScenarioSpec& s, const std::string& v) { s.net.multipath.disjointness = parse_disjointness(v); }},
         }},
        {"recovery",
         {
             {"scheme", [](ScenarioSpec& s, const std::string& v) { s.net.recovery.scheme = parse_scheme(v); }},
             {"fast_tc_interval",
              [](ScenarioSpec& s, const std::string& v) { s.net.recovery.fast_tc_interval = to_time(v); }},
             {"max_reemissions",
              [](ScenarioSpec& s, const std::string& v) {
                  const auto c = to_count(v);
                  if (c > 255) {
                      throw std::invalid_argument("must be <= 255");
                  }
                  s.net.recovery.max_reemissions = static_cast<std::uint8_t>(c);
              }},
         }},
        {"topology",
         {
             {"per_chain", [](ScenarioSpec& s, const std::string& v) { s.per_chain = to_count(v); }},
             {"spacing", [](ScenarioSpec& s, const std::string& v) { s.spacing = to_double(v); }},
             {"range", [](ScenarioSpec& s, const std::string& v) { s.net.medium.tx_range = to_double(v); }},
             {"per_hop_delay", [](ScenarioSpec& s, const std::string& v) { s.net.medium.per_hop_delay = to_time(v); }},
             {"loss_probability",
              [](ScenarioSpec& s, const std::string& v) { s.net.medium.loss_probability = to_double(v); }},
             {"node_count", [](ScenarioSpec& s, const std::string& v) { s.node_count = to_count(v); }},
             {"area", [](ScenarioSpec& s, const std::string& v) { s.area = to_double(v); }},
             {"pause", [](ScenarioSpec& s, const std::string& v) { s.pause = to_double(v); }},
             {"fail_link",
              [](ScenarioSpec& s, const std::string& v) {
                  const auto parts = split(v, '-');
                  if (parts.size() != 2) {
                      throw std::invalid_argument("expected a-b");
                  }
                  s.fail_a = static_cast<NodeId>(to_count(parts[0]));
                  s.fail_b = static_cast<NodeId>(to_count(parts[1]));
              }},
         }},
        {"traffic",
         {
             {"start", [](ScenarioSpec& s, const std::string& v) { s.traffic_start = to_double(v); }},
             {"bit_rate", [](ScenarioSpec& s, const std::string& v) { s.bit_rate = to_double(v); }},
             {"packet_rate", [](ScenarioSpec& s, const std::string& v) { s.packet_rate = to_double(v); }},
             {"packet_size",
              [](ScenarioSpec& s, const std::string& v) { s.packet_size = static_cast<std::uint32_t>(to_count(v)); }},
             {"flows", [](ScenarioSpec& s, const std::string& v) { s.flows = to_count(v); }},
         }},
    };
    return table;
}

struct Assignment {
    std::size_t line;
    std::string section;
    std::string key;
    std::string value;
};

std::vector<Assignment> tokenize(const std::string& text)
{
    std::vector<Assignment> out;
    std::istringstream in(text);
    std::string raw;
    std::string section = "run";
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find_first_of("#;");
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) {
            continue;
        }
        if (body.front() == '[') {
            if (body.back() != ']') {
                throw std::invalid_argument("line " + std::to_string(line) + ": malformed section header");
            }
            section = trim(body.substr(1, body.size() - 2));
            if (setters().count(section) == 0) {
                throw std::invalid_argument("line " + std::to_string(line) + ": unknown section [" + section + "]");
            }
            continue;
        }
        std::istringstream words(body);
        std::string word;
        while (words >> word) {
            const auto eq = word.find('=');
            if (eq == std::string::npos || eq == 0) {
                throw std::invalid_argument("line " + std::to_string(line) + ": expected key=value, got '" + word +
                                            "'");
            }
            out.push_back({line, section, word.substr(0, eq), word.substr(eq + 1)});
        }
    }
    return out;
}

} // namespace

std::vector<std::uint64_t> parse_seed_list(const std::string& s)
{
    std::vector<std::uint64_t> out;
    for (long long v : to_int_list(s)) {
        if (v < 0) {
            throw std::invalid_argument("seeds must be >= 0");
        }
        out.push_back(static_cast<std::uint64_t>(v));
    }
    return out;
}

ScenarioSpec parse_config(const std::string& text)
{
    const auto items = tokenize(text);
    int preset = 1;
    for (const auto& a : items) {
        if (a.section == "run" && a.key == "preset") {
            try {
                preset = static_cast<int>(to_int(a.value));
                preset_spec(preset);
            } catch (const std::exception& e) {
                throw std::invalid_argument("line " + std::to_string(a.line) + ": key 'preset': " + e.what());
            }
        }
    }
    ScenarioSpec spec = preset_spec(preset);
    for (const auto& a : items) {
        const auto& keys = setters().at(a.section);
        auto it = keys.find(a.key);
        if (it == keys.end()) {
            throw std::invalid_argument("line " + std::to_string(a.line) + ": unknown key '" + a.key + "' in [" +
                                        a.section + "]");
        }
        try {
            it->second(spec, a.value);
        } catch (const std::exception& e) {
            throw std::invalid_argument("line " + std::to_string(a.line) + ": key '" + a.key + "': " + e.what());
        }
    }
    spec.validate();
    return spec;
}

// ---- running --------------------------------------------------------------

std::vector<double> RunResult::latencies() const
{
    std::vector<double> out;
    for (const auto& r : metrics.latencies) {
        if (auto d = r.delta()) {
            out.push_back(*d);
        }
    }
    return out;
}

std::vector<RunParams> expand_runs(const ScenarioSpec& spec)
{
    std::vector<RunParams> out;
    switch (spec.preset) {
    case 1:
        for (auto seed : spec.seeds) {
            if (spec.t_f.empty()) {
                RngStream rng(seed, 0, RngPurpose::Scenario);
                // Millisecond resolution keeps the value exact in the CSV.
                const double tf = std::round(rng.uniform(spec.tf_min, spec.tf_max) * 1000.0) / 1000.0;
                out.push_back({seed, tf, std::nullopt, std::nullopt});
            } else {
                for (double tf : spec.t_f) {
                    out.push_back({seed, tf, std::nullopt, std::nullopt});
                }
            }
        }
        break;
    case 2: {
        std::vector<double> tfs = spec.t_f;
        if (tfs.empty()) {
            for (double t = std::ceil(spec.tf_min); t <= spec.tf_max; t += 1.0) {
                tfs.push_back(t);
            }
        }
        for (int n : spec.n) {
            for (double tf : tfs) {
                for (auto seed : spec.seeds) {
                    out.push_back({seed, tf, n, std::nullopt});
                }
            }
        }
        break;
    }
    default:
        if (spec.speeds.empty()) {
            for (auto seed : spec.seeds) {
                out.push_back({seed, std::nullopt, std::nullopt, std::nullopt});
            }
        } else {
            for (double v : spec.speeds) {
                for (auto seed : spec.seeds) {
                    out.push_back({seed, std::nullopt, std::nullopt, v});
                }
            }
        }
    }
    return out;
}

namespace {

std::string describe_layout(PositionSource& pos)
{
    std::string s;
    char buf[64];
    for (NodeId i = 0; i < pos.node_count(); ++i) {
        const Position p = pos.position_of(i, SimTime::zero());
        std::snprintf(buf, sizeof buf, "%s%u:%.1f:%.1f", i == 0 ? "" : " ", i, p.x, p.y);
        s += buf;
    }
    return s;
}

} // namespace

RunResult run_single(const ScenarioSpec& spec, const RunParams& params, std::ostream* trace)
{
    spec.validate();
    NetworkConfig cfg = spec.net;
    cfg.seed = params.seed;

    RunResult res;
    res.preset = spec.preset;
    res.protocol = cfg.protocol;
    res.recovery = cfg.recovery.scheme;
    res.params = params;

    std::unique_ptr<PositionSource> positions;
    NodeId src = 0;
    NodeId dst = 0;
    if (spec.preset == 3) {
        RwpConfig rwp{spec.area, spec.area, spec.speed_min, spec.speed_max, SimTime::from_seconds(spec.pause)};
        if (params.speed) {
            rwp.speed_min = rwp.speed_max = *params.speed;
        }
        positions = std::make_unique<RandomWaypoint>(spec.node_count, rwp, params.seed);
    } else {
        const DualChainLayout layout = dual_chain_layout(spec.per_chain, spec.spacing);
        verify_adjacency(layout, cfg.medium.tx_range);
        src = layout.source;
        dst = layout.destination;
        positions = std::make_unique<StaticPositions>(layout.positions);
    }
    res.layout = describe_layout(*positions);

    Network net(cfg, std::move(positions));
    if (trace != nullptr) {
        net.sim().set_trace(trace);
    }

    const SimTime start = SimTime::from_seconds(spec.traffic_start);
    const SimTime stop = SimTime::from_seconds(spec.duration);
    const SimTime interval = spec.packet_rate > 0.0 ? CbrFlow::interval_for_packet_rate(spec.packet_rate)
                                                    : CbrFlow::interval_for_bit_rate(spec.bit_rate, spec.packet_size);
    if (spec.preset == 3) {
        RngStream rng(params.seed, 0, RngPurpose::Traffic);
        res.flow_pairs = random_flow_pairs(spec.node_count, spec.flows, rng);
    } else {
        res.flow_pairs = {{src, dst}};
    }
    for (std::size_t i = 0; i < res.flow_pairs.size(); ++i) {
        CbrFlow f;
        f.id = static_cast<std::uint32_t>(i);
        f.source = res.flow_pairs[i].first;
        f.destination = res.flow_pairs[i].second;
        f.interval = interval;
        f.packet_size = spec.packet_size;
        f.start = start;
        f.stop = stop;
        net.add_flow(f);
    }

    if (spec.preset == 1 && params.t_f) {
        net.fail_link(LinkId::of(spec.fail_a, spec.fail_b), SimTime::from_seconds(*params.t_f));
    } else if (spec.preset == 2 && params.t_f && params.n) {
        // The node one hop past the detector on the upper chain.
        net.fail_node(static_cast<NodeId>(*params.n + 1), SimTime::from_seconds(*params.t_f));
    }

    const RunSummary summary = net.run_until(stop);
    res.metrics = net.metrics().record();
    res.in_flight_at_end = net.metrics().in_flight();
    res.events = summary.events_fired;
    res.fast_tcs = net.recovery().fast_tcs_sent();
    const auto& m = res.metrics;
    if (m.data_generated != m.data_delivered + m.data_dropped + res.in_flight_at_end) {
        throw std::logic_error("packet conservation violated");
    }
    return res;
}

std::vector<RunResult> run_batch(const ScenarioSpec& spec)
{
    spec.validate();
    std::vector<RunResult> out;
    for (const auto& p : expand_runs(spec)) {
        try {
            out.push_back(run_single(spec, p));
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "run failed (seed " << p.seed;
            if (p.t_f) {
                msg << ", t_f " << *p.t_f;
            }
            if (p.n) {
                msg << ", n " << *p.n;
            }
            if (p.speed) {
                msg << ", speed " << *p.speed;
            }
            msg << "): " << e.what();
            throw std::runtime_error(msg.str());
        }
    }
    auto key = [](const RunResult& r) {
        return std::make_tuple(r.params.n.value_or(-1), r.params.speed.value_or(-1.0), r.params.t_f.value_or(-1.0),
                               r.params.seed);
    };
    std::stable_sort(out.begin(), out.end(), [&](const RunResult& a, const RunResult& b) { return key(a) < key(b); });
    return out;
}

// ---- output ---------------------------------------------------------------

namespace {

std::string fmt(double v)
{
    if (!std::isfinite(v)) {
        return "nan";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string fmt(const std::optional<double>& v)
{
    return v ? fmt(*v) : "";
}

struct Stats {
    double min = NAN;
    double mean = NAN;
    double max = NAN;
};

Stats stats(const std::vector<double>& v)
{
    if (v.empty()) {
        return {};
    }
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return {*lo, std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()), *hi};
}

double ratio_or_nan(Ratio r)
{
    return r.defined ? r.value : NAN;
}

} // namespace

void write_runs_csv(const std::vector<RunResult>& results, std::ostream& out)
{
    out << "scenario,protocol,recovery,seed,t_f,n,speed,latency_min,latency_mean,latency_max,loss_pct,"
           "routing_load_pct,avg_delay_s\n";
    for (const auto& r : results) {
        const Stats lat = stats(r.latencies());
        out << r.preset << ',' << to_string(r.protocol) << ',' << to_string(r.recovery) << ',' << r.params.seed << ','
            << fmt(r.params.t_f) << ',' << (r.params.n ? std::to_string(*r.params.n) : "") << ','
            << fmt(r.params.speed) << ',' << fmt(lat.min) << ',' << fmt(lat.mean) << ',' << fmt(lat.max) << ','
            << fmt(ratio_or_nan(packet_loss_rate(r.metrics))) << ',' << fmt(ratio_or_nan(routing_load(r.metrics)))
            << ',' << fmt(ratio_or_nan(avg_e2e_delay(r.metrics))) << '\n';
    }
}

void write_summary_csv(const std::vector<RunResult>& results, std::ostream& out)
{
    out << "scenario,protocol,recovery,n,speed,runs,latency_min,latency_mean,latency_max,loss_min,loss_mean,"
           "loss_max,load_min,load_mean,load_max,delay_min,delay_mean,delay_max\n";
    using Key = std::tuple<int, int, int, int, double>;
    std::map<Key, std::vector<const RunResult*>> groups;
    for (const auto& r : results) {
        groups[{r.preset, static_cast<int>(r.protocol), static_cast<int>(r.recovery), r.params.n.value_or(-1),
                r.params.speed.value_or(-1.0)}]
            .push_back(&r);
    }
    for (const auto& [key, rs] : groups) {
        std::vector<double> lat, loss, load, delay;
        for (const auto* r : rs) {
            for (double d : r->latencies()) {
                lat.push_back(d);
            }
            if (auto x = packet_loss_rate(r->metrics); x.defined) {
                loss.push_back(x.value);
            }
            if (auto x = routing_load(r->metrics); x.defined) {
                load.push_back(x.value);
            }
            if (auto x = avg_e2e_delay(r->metrics); x.defined) {
                delay.push_back(x.value);
            }
        }
        const auto& first = *rs.front();
        out << first.preset << ',' << to_string(first.protocol) << ',' << to_string(first.recovery) << ','
            << (first.params.n ? std::to_string(*first.params.n) : "") << ',' << fmt(first.params.speed) << ','
            << rs.size();
        for (const auto& v : {lat, loss, load, delay}) {
            const Stats s = stats(v);
            out << ',' << fmt(s.min) << ',' << fmt(s.mean) << ',' << fmt(s.max);
        }
        out << '\n';
    }
}

void write_results(const std::vector<RunResult>& results, const std::string& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory '" + dir + "': " + ec.message());
    }
    for (const auto& [name, writer] :
         {std::pair{"runs.csv", &write_runs_csv}, std::pair{"summary.csv", &write_summary_csv}}) {
        const auto path = std::filesystem::path(dir) / name;
        std::ofstream f(path);
        if (!f) {
            throw std::runtime_error("cannot write '" + path.string() + "'");
        }
        writer(results, f);
        if (!f) {
            throw std::runtime_error("error while writing '" + path.string() + "'");
        }
    }
}

} // namespace manetsim
