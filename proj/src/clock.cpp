#include "psync/clock.hpp"

#include <cmath>
#include <stdexcept>

namespace psync {

namespace {

constexpr int kMaxDepth = 8;

void require_time(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string(what) + " must be finite");
    }
    if (v < 0.0) {
        throw std::invalid_argument(std::string(what) + " must be non-negative");
    }
}

// Splits "a,b" at the comma that sits at parenthesis depth zero.
std::size_t top_level_comma(std::string_view s) {
    int depth = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(') ++depth;
        else if (s[i] == ')') --depth;
        else if (s[i] == ',' && depth == 0) return i;
    }
    return std::string_view::npos;
}

}  // namespace

RealTime::RealTime(double value) : value_(value) {
    require_time(value, "real time");
}

SystemTime::SystemTime(double value) : value_(value) {
    require_time(value, "system time");
}

ClockOracle::ClockOracle(Kind kind, std::shared_ptr<const ClockOracle> outer,
                         std::shared_ptr<const ClockOracle> inner, int depth)
    : kind_(kind), outer_(std::move(outer)), inner_(std::move(inner)), depth_(depth) {}

ClockOracle ClockOracle::identity() {
    return ClockOracle(Kind::identity, nullptr, nullptr, 1);
}

ClockOracle ClockOracle::sqrt() {
    return ClockOracle(Kind::sqrt, nullptr, nullptr, 1);
}

ClockOracle ClockOracle::compose(ClockOracle outer, ClockOracle inner) {
    const int depth = 1 + std::max(outer.depth_, inner.depth_);
    if (depth > kMaxDepth) {
        throw std::invalid_argument("clock oracle composition exceeds depth 8");
    }
    return ClockOracle(Kind::composed,
                       std::make_shared<const ClockOracle>(std::move(outer)),
                       std::make_shared<const ClockOracle>(std::move(inner)), depth);
}

ClockOracle ClockOracle::parse(std::string_view name) {
    if (name == "identity") return identity();
    if (name == "sqrt") return sqrt();
    constexpr std::string_view prefix = "compose(";
    if (name.starts_with(prefix) && name.ends_with(")")) {
        std::string_view args = name.substr(prefix.size(), name.size() - prefix.size() - 1);
        const std::size_t comma = top_level_comma(args);
        if (comma != std::string_view::npos) {
            return compose(parse(args.substr(0, comma)), parse(args.substr(comma + 1)));
        }
    }
    throw std::invalid_argument("unknown clock oracle: " + std::string(name));
}

std::string ClockOracle::name() const {
    switch (kind_) {
        case Kind::identity: return "identity";
        case Kind::sqrt: return "sqrt";
        case Kind::composed: return "compose(" + outer_->name() + "," + inner_->name() + ")";
    }
    return "identity";
}

double ClockOracle::eval_raw(double t) const {
    require_time(t, "clock input");
    switch (kind_) {
        case Kind::identity: return t;
        case Kind::sqrt: return std::sqrt(t);
        case Kind::composed: return outer_->eval_raw(inner_->eval_raw(t));
    }
    return t;
}

double ClockOracle::inverse_raw(double s) const {
    require_time(s, "clock input");
    switch (kind_) {
        case Kind::identity: return s;
        case Kind::sqrt: return s * s;
        case Kind::composed: return inner_->inverse_raw(outer_->inverse_raw(s));
    }
    return s;
}

SystemTime ClockOracle::eval(RealTime t) const {
    return SystemTime(eval_raw(t.value()));
}

RealTime ClockOracle::inverse(SystemTime s) const {
    return RealTime(inverse_raw(s.value()));
}

bool ClockOracle::operator==(const ClockOracle& other) const {
    if (kind_ != other.kind_) return false;
    if (kind_ != Kind::composed) return true;
    return *outer_ == *other.outer_ && *inner_ == *other.inner_;
}

SystemTime clock_eval(const ClockOracle& oracle, RealTime t) {
    return oracle.eval(t);
}

RealTime clock_inverse(const ClockOracle& oracle, SystemTime s) {
    return oracle.inverse(s);
}

double observed_delay(const ClockOracle& oracle, RealTime t, RealTime delta) {
    return oracle.eval_raw(t.value() + delta.value()) - oracle.eval_raw(t.value());
}

double sqrt_observed_delay_stable(double t, double delta) {
    require_time(t, "real time");
    require_time(delta, "delta");
    if (delta == 0.0) return 0.0;
    return delta / (std::sqrt(t + delta) + std::sqrt(t));
}

RealTime stabilization_real_time(RealTime delta) {
    const double d = std::max(1.0, delta.value()) - 1.0;
    return RealTime(0.25 * d * d);
}

SystemTime stabilization_system_time(RealTime delta) {
    return SystemTime(0.5 * (std::max(1.0, delta.value()) - 1.0));
}

}  // namespace psync
