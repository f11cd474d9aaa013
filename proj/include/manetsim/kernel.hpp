#pragma once

#include "manetsim/sim_time.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <queue>
#include <random>
#include <string>
#include <vector>

namespace manetsim {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = 0xffffffffu;

enum class EventKind : std::uint8_t {
    TimerFire,
    FrameDelivery,
    NodeFailure,
    TrafficEmit,
    TupleExpiry,
};

const char* to_string(EventKind kind);

/// Short label carried into the event trace. `tag` must outlive the run
/// (string literals in practice).
struct EventLabel {
    const char* tag = "";
    std::int64_t arg = -1;
};

class EventHandle {
public:
    EventHandle() = default;
    explicit EventHandle(std::uint64_t seq) : seq_(seq) {}
    bool valid() const { return seq_ != kInvalid; }
    std::uint64_t seq() const { return seq_; }

private:
    static constexpr std::uint64_t kInvalid = ~std::uint64_t{0};
    std::uint64_t seq_ = kInvalid;
};

struct RunSummary {
    std::uint64_t events_fired = 0;
    SimTime clock;
};

/// Single-threaded discrete-event engine.
///
/// Events fire in (fire_time, seq) order; seq is a monotone insertion
/// counter, so events scheduled for the same instant fire in the order they
/// were scheduled. Cancellation is lazy: a cancelled entry stays in the heap
/// and is skipped when it reaches the top.
class Simulator {
public:
    using Action = std::function<void()>;

    Simulator() = default;
    Simulator(const Simulator&) = delete;
    Simulator& operator=(const Simulator&) = delete;

    /// Throws std::logic_error when `at` is earlier than the current clock.
    EventHandle schedule(SimTime at, EventKind kind, NodeId target, EventLabel label, Action action);
    EventHandle schedule_in(SimTime delay, EventKind kind, NodeId target, EventLabel label, Action action)
    {
        return schedule(now_ + delay, kind, target, label, std::move(action));
    }

    /// True iff the event was still pending.
    bool cancel(EventHandle handle);
    bool is_pending(EventHandle handle) const;

    RunSummary run_until(SimTime t_end);

    SimTime now() const { return now_; }
    std::size_t pending() const { return pending_; }
    std::uint64_t events_fired() const { return fired_; }

    /// One line per fired event: time_us, seq, kind, node, detail (tab separated).
    void set_trace(std::ostream* out) { trace_ = out; }

private:
    struct Entry {
        SimTime time;
        std::uint64_t seq;
        EventKind kind;
        NodeId target;
        EventLabel label;
        Action action;
    };
    struct Later {
        bool operator()(const Entry& a, const Entry& b) const
        {
            if (a.time != b.time) {
                return a.time > b.time;
            }
            return a.seq > b.seq;
        }
    };
    enum class State : std::uint8_t { Pending, Done, Cancelled };

    void emit_trace(const Entry& e) const;

    std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
    std::vector<State> states_;
    SimTime now_;
    std::uint64_t next_seq_ = 0;
    std::uint64_t fired_ = 0;
    std::size_t pending_ = 0;
    std::ostream* trace_ = nullptr;
};

/// Purposes that get their own random stream per node.
enum class RngPurpose : std::uint32_t {
    StartOffset = 1,
    Jitter = 2,
    Medium = 3,
    Mobility = 4,
    Traffic = 5,
    Scenario = 6,
};

/// Deterministic random stream keyed by (master seed, node, purpose).
///
/// The seed for each stream is derived with a fixed mixing function, so
/// adding nodes or purposes never perturbs the draws of an existing stream.
/// Conversions to real values and ranges avoid the standard distributions,
/// whose output is implementation-defined.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id, RngPurpose purpose);

    std::uint64_t next() { return engine_(); }
    /// Uniform integer in [0, bound). bound must be > 0.
    std::uint64_t below(std::uint64_t bound);
    /// Uniform in [0, 1).
    double uniform01();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    /// Uniform in [0, max] at microsecond resolution.
    SimTime uniform_time(SimTime max);

private:
    std::mt19937_64 engine_;
};

std::uint64_t mix64(std::uint64_t x);

/// Uniform draw in [0, max_jitter].
SimTime draw_jitter(SimTime max_jitter, RngStream& stream);

} // namespace manetsim
