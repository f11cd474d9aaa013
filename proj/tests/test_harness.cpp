#include "manetsim/scenario.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace manetsim;

namespace {

std::string error_of(const std::string& text)
{
    try {
        parse_config(text);
    } catch (const std::invalid_argument& e) {
        return e.what();
    }
    return {};
}

std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trace_of(ScenarioSpec spec, const RunParams& p)
{
    std::ostringstream out;
    run_single(spec, p, &out);
    return out.str();
}

// Trace lines strictly before `t_us`.
std::string prefix_before(const std::string& trace, std::int64_t t_us)
{
    std::istringstream in(trace);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        if (std::stoll(line.substr(0, line.find('\t'))) >= t_us) {
            break;
        }
        out += line + '\n';
    }
    return out;
}

} // namespace

TEST(Config, PresetOneFiveSeeds)
{
    const ScenarioSpec s = parse_config("preset=1 protocol=olsr recovery=none seeds=1..5");
    EXPECT_EQ(s.preset, 1);
    EXPECT_EQ(s.net.protocol, Protocol::Olsr);
    EXPECT_EQ(s.seeds, (std::vector<std::uint64_t>{1, 2, 3, 4, 5}));
    const auto runs = expand_runs(s);
    ASSERT_EQ(runs.size(), 5u);
    for (const auto& r : runs) {
        ASSERT_TRUE(r.t_f.has_value());
        EXPECT_GE(*r.t_f, 15.0);
        EXPECT_LE(*r.t_f, 19.0);
    }
}

TEST(Config, PresetTwoDepthEight)
{
    const ScenarioSpec s = parse_config("preset=2 n=8 recovery=ftc");
    EXPECT_EQ(s.per_chain, 9u);
    EXPECT_EQ(s.duration, 100.0);
    EXPECT_EQ(s.n, (std::vector<int>{8}));
    EXPECT_EQ(s.net.recovery.scheme, Scheme::FastTc);
    const auto runs = expand_runs(s);
    ASSERT_EQ(runs.size(), 6u);
    EXPECT_EQ(*runs.front().t_f, 20.0);
    EXPECT_EQ(*runs.back().t_f, 25.0);
}

TEST(Config, SectionsAndComments)
{
    const ScenarioSpec s = parse_config("# comment\npreset=3\n[olsr]\nhello_interval=1\n[mpolsr]\nk=2\n"
                                        "[run]\nprotocol=mpolsr\nspeeds=1,10\n");
    EXPECT_EQ(s.net.olsr.hello_interval, seconds(1));
    EXPECT_EQ(s.net.multipath.k, 2u);
    EXPECT_EQ(s.node_count, 50u);
    EXPECT_EQ(s.duration, 200.0);
    EXPECT_EQ(expand_runs(s).size(), 2u);
}

TEST(Config, ErrorsNameLineAndKey)
{
    const std::string dr = error_of("recovery=dr protocol=olsr");
    EXPECT_NE(dr.find("dr"), std::string::npos) << dr;

    const std::string unknown = error_of("preset=1\n[olsr]\nhelo_interval=2\n");
    EXPECT_NE(unknown.find("line 3"), std::string::npos) << unknown;
    EXPECT_NE(unknown.find("helo_interval"), std::string::npos) << unknown;

    const std::string bad = error_of("seeds=1..3\ntf_min=abc\n");
    EXPECT_NE(bad.find("line 2"), std::string::npos) << bad;
    EXPECT_NE(bad.find("tf_min"), std::string::npos) << bad;

    EXPECT_FALSE(error_of("[olsr]\nneighb_hold_time=1\n").empty());
    EXPECT_FALSE(error_of("[nosuch]\n").empty());
    EXPECT_FALSE(error_of("preset=4").empty());
    EXPECT_FALSE(error_of("protocol").empty());
}

TEST(Config, SeedLists)
{
    EXPECT_EQ(parse_seed_list("3"), (std::vector<std::uint64_t>{3}));
    EXPECT_EQ(parse_seed_list("1,2,7"), (std::vector<std::uint64_t>{1, 2, 7}));
    EXPECT_EQ(parse_seed_list("4..6"), (std::vector<std::uint64_t>{4, 5, 6}));
    EXPECT_THROW(parse_seed_list("5..4"), std::invalid_argument);
    EXPECT_THROW(parse_seed_list(""), std::invalid_argument);
    EXPECT_THROW(parse_seed_list("-1"), std::invalid_argument);
}

TEST(Presets, EncodeScenarioParameters)
{
    const ScenarioSpec one = preset_spec(1);
    EXPECT_EQ(dual_chain_layout(one.per_chain).positions.size(), 8u);
    EXPECT_EQ(one.duration, 50.0);
    const ScenarioSpec two = preset_spec(2);
    EXPECT_EQ(dual_chain_layout(two.per_chain).positions.size(), 20u);
    EXPECT_EQ(expand_runs(two).size(), 42u);
    const ScenarioSpec three = preset_spec(3);
    EXPECT_EQ(three.node_count, 50u);
    EXPECT_EQ(three.duration, 200.0);
    EXPECT_EQ(three.area, 1000.0);
}

TEST(Csv, EmptyResultsGiveHeaderOnly)
{
    std::ostringstream runs;
    std::ostringstream summary;
    write_runs_csv({}, runs);
    write_summary_csv({}, summary);
    const std::string r = runs.str();
    const std::string m = summary.str();
    EXPECT_EQ(std::count(r.begin(), r.end(), '\n'), 1);
    EXPECT_EQ(r.rfind("scenario,protocol,recovery,seed,t_f,n,speed,", 0), 0u);
    EXPECT_EQ(std::count(m.begin(), m.end(), '\n'), 1);
}

TEST(Csv, SixDecimalsAndDeterministicOrder)
{
    ScenarioSpec s = parse_config("preset=1 seeds=3,1,2 tf=17");
    const auto results = run_batch(s);
    ASSERT_EQ(results.size(), 3u);
    EXPECT_EQ(results[0].params.seed, 1u);
    EXPECT_EQ(results[2].params.seed, 3u);
    std::ostringstream out;
    write_runs_csv(results, out);
    std::istringstream in(out.str());
    std::string header;
    std::string row;
    std::getline(in, header);
    std::getline(in, row);
    EXPECT_EQ(row.rfind("1,olsr,none,1,17.000000,,,", 0), 0u) << row;
}

TEST(Csv, RepeatedBatchesAreByteIdentical)
{
    const auto dir = std::filesystem::temp_directory_path() / "manetsim_csv_test";
    std::filesystem::remove_all(dir);
    ScenarioSpec s = parse_config("preset=1 protocol=mpolsr recovery=dr seeds=1..2");
    write_results(run_batch(s), (dir / "a").string());
    write_results(run_batch(s), (dir / "b").string());
    for (const char* f : {"runs.csv", "summary.csv"}) {
        const std::string a = read_file(dir / "a" / f);
        EXPECT_FALSE(a.empty());
        EXPECT_EQ(a, read_file(dir / "b" / f)) << f;
    }
    std::filesystem::remove_all(dir);
}

TEST(Csv, UnwritablePathThrows)
{
    EXPECT_THROW(write_results({}, "/proc/manetsim/out"), std::exception);
}

TEST(Determinism, TracesAreByteIdentical)
{
    ScenarioSpec s = preset_spec(1);
    s.net.protocol = Protocol::MpOlsr;
    s.net.recovery.scheme = Scheme::RouteError;
    const RunParams p{7, 16.25, std::nullopt, std::nullopt};
    const std::string a = trace_of(s, p);
    EXPECT_GT(a.size(), 1000u);
    EXPECT_EQ(a, trace_of(s, p));
}

TEST(Determinism, PreFailureTracesMatchAcrossSchemes)
{
    for (Protocol proto : {Protocol::Olsr, Protocol::MpOlsr}) {
        ScenarioSpec s = preset_spec(1);
        s.net.protocol = proto;
        const RunParams p{3, 17.5, std::nullopt, std::nullopt};
        const std::string base = prefix_before(trace_of(s, p), 17500000);
        EXPECT_GT(base.size(), 1000u);
        for (Scheme scheme : {Scheme::RouteError, Scheme::FastTc, Scheme::DataReemission}) {
            if (scheme == Scheme::DataReemission && proto == Protocol::Olsr) {
                continue;
            }
            s.net.recovery.scheme = scheme;
            EXPECT_EQ(base, prefix_before(trace_of(s, p), 17500000)) << to_string(scheme);
        }
    }
}

TEST(Conservation, EveryPacketIsAccountedFor)
{
    std::vector<ScenarioSpec> specs;
    for (const char* text : {"preset=1 seeds=1..3", "preset=1 protocol=mpolsr recovery=dr seeds=1..3",
                             "preset=2 n=5 tf=22 recovery=re seeds=1", "preset=3 protocol=mpolsr recovery=ftc "
                                                                       "speeds=10 duration=40 seeds=1"}) {
        specs.push_back(parse_config(text));
    }
    for (const auto& s : specs) {
        for (const auto& r : run_batch(s)) {
            const MetricsRecord& m = r.metrics;
            EXPECT_GT(m.data_generated, 0u);
            EXPECT_EQ(m.data_generated, m.data_delivered + m.data_dropped + r.in_flight_at_end);
            std::uint64_t by_reason = 0;
            for (auto c : m.drops_by_reason) {
                by_reason += c;
            }
            EXPECT_EQ(by_reason, m.data_dropped);
        }
    }
}
