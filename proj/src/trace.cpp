#include "psync/trace.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace psync {

namespace {

constexpr std::uint64_t kNoUid = std::numeric_limits<std::uint64_t>::max();

std::uint64_t min_uid(const std::vector<Message>& msgs, std::uint64_t empty_value) {
    if (msgs.empty()) return empty_value;
    std::uint64_t m = kNoUid;
    for (const Message& msg : msgs) m = std::min(m, msg.uid);
    return m;
}

struct MessageRecord {
    Message msg;
    double send_sys = 0.0;
    bool received = false;
    double recv_sys = 0.0;
};

struct MessageTable {
    std::vector<MessageRecord> records;  // sorted by uid
    Verdict malformed = Verdict::pass();
};

// Collects every message into a uid-sorted table and diagnoses structural
// defects: duplicate or missing sends, double receives, wrong receiver,
// content mismatches between the sent and received copies, and receives
// that precede their send in real time.
MessageTable build_message_table(const Execution& e, const ClockOracle& oracle) {
    MessageTable table;
    std::unordered_map<std::uint64_t, std::size_t> index;

    for (const Event& ev : e.events) {
        for (const Message& m : ev.sent) {
            if (m.sender != ev.party) {
                table.malformed = Verdict::fail(Verdict::Code::malformed, m.uid,
                                                "sent message not attributed to sending party");
                return table;
            }
            auto [it, inserted] = index.emplace(m.uid, table.records.size());
            if (!inserted) {
                table.malformed =
                    Verdict::fail(Verdict::Code::malformed, m.uid, "uid sent more than once");
                return table;
            }
            table.records.push_back(MessageRecord{m, ev.system_time.value(), false, 0.0});
        }
    }
    for (const Event& ev : e.events) {
        for (const Message& m : ev.received) {
            auto it = index.find(m.uid);
            if (it == index.end()) {
                table.malformed =
                    Verdict::fail(Verdict::Code::malformed, m.uid, "received but never sent");
                return table;
            }
            MessageRecord& rec = table.records[it->second];
            if (rec.received) {
                table.malformed =
                    Verdict::fail(Verdict::Code::malformed, m.uid, "received more than once");
                return table;
            }
            if (ev.party != rec.msg.receiver) {
                table.malformed = Verdict::fail(Verdict::Code::malformed, m.uid,
                                                "delivered to a party other than the receiver");
                return table;
            }
            if (m != rec.msg) {
                table.malformed = Verdict::fail(Verdict::Code::malformed, m.uid,
                                                "received copy differs from sent message");
                return table;
            }
            const double send_real = oracle.inverse_raw(rec.send_sys);
            const double recv_real = oracle.inverse_raw(ev.system_time.value());
            if (recv_real < send_real - kLegalityTolerance) {
                table.malformed =
                    Verdict::fail(Verdict::Code::malformed, m.uid, "received before sent");
                return table;
            }
            rec.received = true;
            rec.recv_sys = ev.system_time.value();
        }
    }
    std::sort(table.records.begin(), table.records.end(),
              [](const MessageRecord& a, const MessageRecord& b) { return a.msg.uid < b.msg.uid; });
    return table;
}

// Delivery deadline in real time. UL is the T = 0 case.
inline double delivery_deadline(double send_real, double delta, double stabilization_T) {
    return std::max(send_real, stabilization_T) + delta;
}

inline bool record_legal(const MessageRecord& rec, double delta, double stabilization_T,
                         double horizon_real, const ClockOracle& oracle) {
    const double send_real = oracle.inverse_raw(rec.send_sys);
    const double deadline = delivery_deadline(send_real, delta, stabilization_T);
    if (rec.received) {
        return oracle.inverse_raw(rec.recv_sys) <= deadline + kLegalityTolerance;
    }
    // Still in flight at the horizon: legal only if the deadline lies beyond it.
    return deadline > horizon_real - kLegalityTolerance;
}

Verdict scan_serial(const MessageTable& table, double delta, double stabilization_T,
                    double horizon_real, const ClockOracle& oracle) {
    for (const MessageRecord& rec : table.records) {
        if (!record_legal(rec, delta, stabilization_T, horizon_real, oracle)) {
            return Verdict::fail(Verdict::Code::violation, rec.msg.uid,
                                 rec.received ? "received after its delivery deadline"
                                              : "undelivered although its deadline is within the horizon");
        }
    }
    return Verdict::pass();
}

Verdict scan_parallel(const MessageTable& table, double delta, double stabilization_T,
                      double horizon_real, const ClockOracle& oracle) {
    const auto n = static_cast<std::int64_t>(table.records.size());
    unsigned long long worst = kNoUid;
#pragma omp parallel for schedule(static) reduction(min : worst)
    for (std::int64_t i = 0; i < n; ++i) {
        const MessageRecord& rec = table.records[static_cast<std::size_t>(i)];
        if (!record_legal(rec, delta, stabilization_T, horizon_real, oracle)) {
            worst = std::min<unsigned long long>(worst, rec.msg.uid);
        }
    }
    if (worst == kNoUid) return Verdict::pass();
    const auto it = std::lower_bound(
        table.records.begin(), table.records.end(), static_cast<std::uint64_t>(worst),
        [](const MessageRecord& r, std::uint64_t uid) { return r.msg.uid < uid; });
    return Verdict::fail(Verdict::Code::violation, static_cast<std::uint64_t>(worst),
                         it->received ? "received after its delivery deadline"
                                      : "undelivered although its deadline is within the horizon");
}

// Scans of a few thousand records are not worth forking threads for.
constexpr std::size_t kParallelScanThreshold = 4096;

Verdict check_legal(const Execution& e, double delta, double stabilization_T,
                    const ClockOracle& oracle, bool allow_parallel) {
    if (delta < 0.0 || stabilization_T < 0.0) {
        throw std::invalid_argument("delta and T must be non-negative");
    }
    MessageTable table = build_message_table(e, oracle);
    if (!table.malformed.ok()) return table.malformed;
    const double horizon_real = oracle.inverse_raw(e.horizon.value());
    if (allow_parallel && table.records.size() >= kParallelScanThreshold) {
        return scan_parallel(table, delta, stabilization_T, horizon_real, oracle);
    }
    return scan_serial(table, delta, stabilization_T, horizon_real, oracle);
}

void append_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void append_double(std::string& out, double v) {
    append_u64(out, std::bit_cast<std::uint64_t>(v));
}

void append_bytes(std::string& out, const Bytes& b) {
    append_u64(out, b.size());
    out.append(reinterpret_cast<const char*>(b.data()), b.size());
}

void append_message(std::string& out, const Message& m) {
    append_u32(out, m.sender);
    append_u32(out, m.receiver);
    append_u64(out, m.uid);
    append_bytes(out, m.payload);
}

}  // namespace

Verdict Verdict::fail(Code c, std::optional<std::uint64_t> uid, std::string detail) {
    Verdict v;
    v.code = c;
    v.uid = uid;
    v.detail = std::move(detail);
    return v;
}

EventOrderKey event_order_key(const Event& e) {
    // An empty received multiset keys as 0 (uids start at 1): timer-driven
    // events precede same-instant deliveries at the same party.
    return EventOrderKey{e.system_time.value(), e.party, min_uid(e.received, 0),
                         min_uid(e.sent, 0)};
}

void validate_event_order(const Execution& e) {
    for (std::size_t i = 1; i < e.events.size(); ++i) {
        if (!(event_order_key(e.events[i - 1]) < event_order_key(e.events[i]))) {
            throw std::logic_error("event list is not strictly ordered");
        }
    }
}

bool equivalent(const Execution& a, const Execution& b) {
    if (a.inputs != b.inputs || a.initial_states != b.initial_states || a.crashes != b.crashes) {
        return false;
    }
    if (a.events.size() != b.events.size()) return false;
    for (std::size_t i = 0; i < a.events.size(); ++i) {
        const Event& x = a.events[i];
        const Event& y = b.events[i];
        if (x.party != y.party || x.terminated != y.terminated || x.received != y.received ||
            x.state != y.state || x.sent != y.sent || x.outputs != y.outputs) {
            return false;
        }
    }
    return true;
}

std::string equivalence_signature(const Execution& e) {
    std::string out;
    out.reserve(256 + e.events.size() * 64);
    out.append("PSIG1");
    append_u64(out, e.inputs.size());
    for (const auto& [party, input] : e.inputs) {
        append_u32(out, party);
        append_bytes(out, input);
    }
    append_u64(out, e.initial_states.size());
    for (const auto& [party, state] : e.initial_states) {
        append_u32(out, party);
        append_bytes(out, state);
    }
    append_u64(out, e.crashes.size());
    for (const auto& [party, t] : e.crashes) {
        append_u32(out, party);
        append_double(out, t);
    }
    append_u64(out, e.events.size());
    for (const Event& ev : e.events) {
        append_u32(out, ev.party);
        append_u64(out, ev.received.size());
        for (const Message& m : ev.received) append_message(out, m);
        append_bytes(out, ev.state);
        append_u64(out, ev.sent.size());
        for (const Message& m : ev.sent) append_message(out, m);
        append_u64(out, ev.outputs.size());
        for (const Bytes& b : ev.outputs) append_bytes(out, b);
        out.push_back(ev.terminated ? '\1' : '\0');
    }
    return out;
}

Execution retime(const Execution& e, const ClockOracle& oracle, RetimeDirection direction) {
    Execution out = e;
    const bool apply = direction == RetimeDirection::apply;
    for (Event& ev : out.events) {
        ev.system_time = apply ? SystemTime(oracle.eval_raw(ev.system_time.value()))
                               : SystemTime(oracle.inverse_raw(ev.system_time.value()));
    }
    out.horizon = apply ? SystemTime(oracle.eval_raw(e.horizon.value()))
                        : SystemTime(oracle.inverse_raw(e.horizon.value()));
    validate_event_order(out);
    return out;
}

Verdict check_ul_legal(const Execution& e, double delta, const ClockOracle& oracle) {
    return check_legal(e, delta, 0.0, oracle, true);
}

Verdict check_ul_legal_serial(const Execution& e, double delta, const ClockOracle& oracle) {
    return check_legal(e, delta, 0.0, oracle, false);
}

Verdict check_gst_legal(const Execution& e, double delta, double stabilization_T,
                        const ClockOracle& oracle) {
    return check_legal(e, delta, stabilization_T, oracle, true);
}

Verdict check_gst_legal_serial(const Execution& e, double delta, double stabilization_T,
                               const ClockOracle& oracle) {
    return check_legal(e, delta, stabilization_T, oracle, false);
}

std::optional<RealTime> find_gst_witness(const Execution& e, double delta,
                                         const ClockOracle& oracle) {
    MessageTable table = build_message_table(e, oracle);
    if (!table.malformed.ok()) return std::nullopt;
    const double horizon_real = oracle.inverse_raw(e.horizon.value());

    std::vector<double> candidates;
    candidates.push_back(0.0);
    for (const MessageRecord& rec : table.records) {
        if (!rec.received) continue;
        candidates.push_back(std::max(0.0, oracle.inverse_raw(rec.recv_sys) - delta));
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    auto legal_at = [&](double T) {
        return scan_serial(table, delta, T, horizon_real, oracle).ok();
    };
    // Legality is monotone in T: max(t, T) + delta only grows with T.
    const auto it = std::partition_point(candidates.begin(), candidates.end(),
                                         [&](double T) { return !legal_at(T); });
    if (it == candidates.end()) return std::nullopt;
    return RealTime(*it);
}

}  // namespace psync
