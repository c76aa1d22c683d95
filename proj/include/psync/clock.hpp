#pragma once

#include <compare>
#include <memory>
#include <string>
#include <string_view>

namespace psync {

/// A point on the ground-truth timeline, in abstract seconds.
///
/// Constructors reject negative and non-finite values, so a RealTime held
/// anywhere in the library is always a valid timestamp.
class RealTime {
public:
    RealTime() = default;
    explicit RealTime(double value);

    double value() const { return value_; }
    auto operator<=>(const RealTime&) const = default;

private:
    double value_ = 0.0;
};

/// A point on the timeline as reported by the global clock oracle.
class SystemTime {
public:
    SystemTime() = default;
    explicit SystemTime(double value);

    double value() const { return value_; }
    auto operator<=>(const SystemTime&) const = default;

private:
    double value_ = 0.0;
};

/// The global clock: an increasing continuous map from real time to system
/// time, with a total inverse on the non-negative reals.
///
/// Three kinds are built in: the identity clock, the square-root slowdown
/// clock, and compositions of the two. Any increasing map whose derivative
/// vanishes at infinity would serve as a slowdown clock; the square root is
/// the one the stabilization arithmetic below is written for, so it is the
/// only slowdown primitive exposed.
///
/// Oracles are immutable values; copies share structure and are cheap.
class ClockOracle {
public:
    enum class Kind { identity, sqrt, composed };

    static ClockOracle identity();
    static ClockOracle sqrt();
    /// compose(outer, inner) evaluates as outer(inner(t)).
    /// Nesting depth is capped at 8.
    static ClockOracle compose(ClockOracle outer, ClockOracle inner);

    /// Parses "identity", "sqrt" or "compose(<oracle>,<oracle>)".
    static ClockOracle parse(std::string_view name);

    Kind kind() const { return kind_; }
    int depth() const { return depth_; }
    std::string name() const;

    SystemTime eval(RealTime t) const;
    RealTime inverse(SystemTime s) const;

    /// Raw double versions; inputs must be finite and non-negative.
    double eval_raw(double t) const;
    double inverse_raw(double s) const;

    bool operator==(const ClockOracle& other) const;

private:
    ClockOracle(Kind kind, std::shared_ptr<const ClockOracle> outer,
                std::shared_ptr<const ClockOracle> inner, int depth);

    Kind kind_ = Kind::identity;
    std::shared_ptr<const ClockOracle> outer_;
    std::shared_ptr<const ClockOracle> inner_;
    int depth_ = 1;
};

/// System time read off the oracle at real time t.
SystemTime clock_eval(const ClockOracle& oracle, RealTime t);

/// The unique real time mapping to system time s.
RealTime clock_inverse(const ClockOracle& oracle, SystemTime s);

/// Message delay as perceived through the oracle: eval(t + delta) - eval(t),
/// a system-time duration. Computed in the direct form; callers that need
/// the cancellation-free form for very large t (the delay-curve emitter)
/// use observed_delay_stable.
double observed_delay(const ClockOracle& oracle, RealTime t, RealTime delta);

/// Algebraically equivalent delta / (sqrt(t+delta) + sqrt(t)) evaluation of
/// the sqrt-clock delay, stable for t far beyond 1/epsilon.
double sqrt_observed_delay_stable(double t, double delta);

/// Least real time from which the sqrt-clock delay for messages with real
/// delay `delta` is at most one system-time unit: (max{1,delta}-1)^2 / 4.
RealTime stabilization_real_time(RealTime delta);

/// The same threshold in system time: (max{1,delta}-1) / 2.
SystemTime stabilization_system_time(RealTime delta);

}  // namespace psync
