#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "psync/bytes.hpp"
#include "psync/clock.hpp"

namespace psync {

using PartyId = std::uint32_t;

/// Additive slack applied to every legality comparison. Times are IEEE-754
/// doubles and the sqrt clock produces irrationals, so boundary cases are
/// decided up to this tolerance.
inline constexpr double kLegalityTolerance = 1e-9;

/// A message held by the global message system. uids are assigned by the
/// system and are unique within an execution; self-messages are allowed.
struct Message {
    PartyId sender = 0;
    PartyId receiver = 0;
    Bytes payload;
    std::uint64_t uid = 0;

    bool operator==(const Message&) const = default;
};

/// One transition record: at `system_time`, `party` received the (possibly
/// empty) multiset `received`, moved to the state encoded by `state`, sent
/// `sent`, and emitted `outputs`. `terminated` is the party's sticky
/// termination flag after the transition.
///
/// `received` and `sent` are kept sorted by uid, which is the canonical
/// multiset layout. `state` is a canonical encoding: equal states encode to
/// equal byte strings, so state comparison is byte comparison.
struct Event {
    SystemTime system_time;
    PartyId party = 0;
    std::vector<Message> received;
    Bytes state;
    std::vector<Message> sent;
    std::vector<Bytes> outputs;
    bool terminated = false;

    bool operator==(const Event&) const = default;
};

/// A finite recorded execution: party inputs and initial states, the crash
/// schedule that was in force (real time), and the event list up to a
/// system-time horizon.
///
/// Events are strictly ordered by (system_time, party, min received uid,
/// min sent uid), where the min uid of an empty multiset is taken to be 0 —
/// a timer-driven event precedes same-instant deliveries at the same party.
struct Execution {
    std::map<PartyId, Bytes> inputs;
    std::map<PartyId, Bytes> initial_states;
    std::map<PartyId, double> crashes;  // party -> crash real time
    std::vector<Event> events;
    SystemTime horizon;
};

/// Ordering key used for the event-list invariant.
struct EventOrderKey {
    double system_time;
    PartyId party;
    std::uint64_t min_received_uid;
    std::uint64_t min_sent_uid;

    auto operator<=>(const EventOrderKey&) const = default;
};

EventOrderKey event_order_key(const Event& e);

/// Throws std::logic_error if the event list violates the strict ordering
/// invariant.
void validate_event_order(const Execution& e);

/// Outcome of a legality check or a replay.
struct Verdict {
    enum class Code { ok, violation, malformed, divergence };

    Code code = Code::ok;
    std::optional<std::uint64_t> uid;
    std::string detail;

    static Verdict pass() { return Verdict{}; }
    static Verdict fail(Code c, std::optional<std::uint64_t> uid, std::string detail);

    bool ok() const { return code == Code::ok; }
    explicit operator bool() const { return ok(); }
};

/// True iff the executions differ at most in event timestamps: inputs,
/// initial states, crash schedules and the timestamp-erased event lists all
/// agree, in the same order.
bool equivalent(const Execution& a, const Execution& b);

/// Canonical byte encoding of everything `equivalent` compares. Two
/// executions are equivalent iff their signatures are equal.
std::string equivalence_signature(const Execution& e);

enum class RetimeDirection { apply, unapply };

/// Maps every event timestamp (and the horizon) through the oracle:
/// `apply` substitutes eval(t), `unapply` substitutes inverse(t). All other
/// fields are untouched, so the result is equivalent to the input.
Execution retime(const Execution& e, const ClockOracle& oracle, RetimeDirection direction);

/// Checks the unknown-latency delivery guarantee: every message sent at real
/// time t is received by real time t + delta, and every unreceived message
/// has its delivery deadline beyond the horizon. Event timestamps are con-
/// verted to real time through `oracle`. On failure reports the smallest
/// violating uid; structural defects (receive without send, duplicate uids,
/// wrong receiver) are reported as malformed.
Verdict check_ul_legal(const Execution& e, double delta, const ClockOracle& oracle);

/// Serial reference implementation; same contract, no parallel scan.
Verdict check_ul_legal_serial(const Execution& e, double delta, const ClockOracle& oracle);

/// Checks the global-stabilization-time guarantee: every message sent at
/// real time t is received by real time max(t, T) + delta, with the same
/// unreceived-message horizon rule.
Verdict check_gst_legal(const Execution& e, double delta, double stabilization_T,
                        const ClockOracle& oracle);

Verdict check_gst_legal_serial(const Execution& e, double delta, double stabilization_T,
                               const ClockOracle& oracle);

/// Smallest stabilization time T (real time) from the candidate set
/// {0} u {receive_real - delta} for which check_gst_legal passes, or absent
/// if no candidate passes within the horizon. Legality is monotone in T, so
/// the scan is a partition-point search.
std::optional<RealTime> find_gst_witness(const Execution& e, double delta,
                                         const ClockOracle& oracle);

}  // namespace psync
