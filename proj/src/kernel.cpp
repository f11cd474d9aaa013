#include "manetsim/kernel.hpp"

#include <ostream>
#include <stdexcept>
#include <string>

namespace manetsim {

const char* to_string(EventKind kind)
{
    switch (kind) {
    case EventKind::TimerFire:
        return "timer";
    case EventKind::FrameDelivery:
        return "delivery";
    case EventKind::NodeFailure:
        return "failure";
    case EventKind::TrafficEmit:
        return "traffic";
    case EventKind::TupleExpiry:
        return "expiry";
    }
    return "?";
}

EventHandle Simulator::schedule(SimTime at, EventKind kind, NodeId target, EventLabel label, Action action)
{
    if (at < now_) {
        throw std::logic_error("Simulator::schedule: event at " + std::to_string(at.us()) +
                               "us is before the clock (" + std::to_string(now_.us()) + "us), tag=" +
                               label.tag);
    }
    const std::uint64_t seq = next_seq_++;
    states_.push_back(State::Pending);
    queue_.push(Entry{at, seq, kind, target, label, std::move(action)});
    ++pending_;
    return EventHandle{seq};
}

bool Simulator::cancel(EventHandle handle)
{
    if (!is_pending(handle)) {
        return false;
    }
    states_[handle.seq()] = State::Cancelled;
    --pending_;
    return true;
}

bool Simulator::is_pending(EventHandle handle) const
{
    return handle.valid() && handle.seq() < states_.size() && states_[handle.seq()] == State::Pending;
}

RunSummary Simulator::run_until(SimTime t_end)
{
    if (t_end < now_) {
        throw std::logic_error("Simulator::run_until: end time before clock");
    }
    std::uint64_t fired_here = 0;
    while (!queue_.empty() && queue_.top().time <= t_end) {
        // priority_queue::top is const; the entry is discarded right after.
        Entry e = std::move(const_cast<Entry&>(queue_.top()));
        queue_.pop();
        if (states_[e.seq] != State::Pending) {
            continue;
        }
        states_[e.seq] = State::Done;
        --pending_;
        now_ = e.time;
        ++fired_;
        ++fired_here;
        if (trace_ != nullptr) {
            emit_trace(e);
        }
        e.action();
    }
    now_ = t_end;
    return RunSummary{fired_here, now_};
}

void Simulator::emit_trace(const Entry& e) const
{
    std::ostream& out = *trace_;
    out << e.time.us() << '\t' << e.seq << '\t' << to_string(e.kind) << '\t';
    if (e.target == kNoNode) {
        out << '-';
    } else {
        out << e.target;
    }
    out << '\t' << e.label.tag;
    if (e.label.arg >= 0) {
        out << ':' << e.label.arg;
    }
    out << '\n';
}

std::uint64_t mix64(std::uint64_t x)
{
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t master_seed, std::uint64_t stream_id, RngPurpose purpose)
    : engine_(mix64(mix64(master_seed) ^ mix64(stream_id * 0x100000001b3ULL + static_cast<std::uint64_t>(purpose))))
{
}

std::uint64_t RngStream::below(std::uint64_t bound)
{
    if (bound == 0) {
        throw std::invalid_argument("RngStream::below: zero bound");
    }
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return x % bound;
}

double RngStream::uniform01()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

SimTime RngStream::uniform_time(SimTime max)
{
    if (max.us() <= 0) {
        return SimTime::zero();
    }
    return SimTime::from_us(static_cast<std::int64_t>(below(static_cast<std::uint64_t>(max.us()) + 1)));
}

SimTime draw_jitter(SimTime max_jitter, RngStream& stream)
{
    if (max_jitter < SimTime::zero()) {
        throw std::invalid_argument("draw_jitter: negative bound");
    }
    return stream.uniform_time(max_jitter);
}

} // namespace manetsim
