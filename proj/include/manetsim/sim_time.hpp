#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace manetsim {

/// Simulation time as an integer count of microseconds.
///
/// All queue ordering and tie-breaking happens on this integer, so two
/// builds on different platforms order events identically.
class SimTime {
public:
    constexpr SimTime() = default;

    static constexpr SimTime from_us(std::int64_t us) { return SimTime{us}; }
    static constexpr SimTime from_ms(std::int64_t ms) { return SimTime{ms * 1000}; }

    /// Rounds to the nearest microsecond.
    static SimTime from_seconds(double s)
    {
        if (!std::isfinite(s)) {
            throw std::invalid_argument("SimTime::from_seconds: non-finite value");
        }
        return SimTime{static_cast<std::int64_t>(std::llround(s * 1e6))};
    }

    static constexpr SimTime zero() { return SimTime{0}; }
    static constexpr SimTime max() { return SimTime{std::numeric_limits<std::int64_t>::max()}; }

    constexpr std::int64_t us() const { return us_; }
    constexpr double seconds() const { return static_cast<double>(us_) / 1e6; }

    constexpr auto operator<=>(const SimTime&) const = default;

    constexpr SimTime operator+(SimTime o) const { return SimTime{us_ + o.us_}; }
    constexpr SimTime operator-(SimTime o) const { return SimTime{us_ - o.us_}; }
    constexpr SimTime& operator+=(SimTime o)
    {
        us_ += o.us_;
        return *this;
    }
    constexpr SimTime operator*(std::int64_t k) const { return SimTime{us_ * k}; }

private:
    constexpr explicit SimTime(std::int64_t us) : us_(us) {}
    std::int64_t us_ = 0;
};

inline SimTime seconds(double s) { return SimTime::from_seconds(s); }

} // namespace manetsim
