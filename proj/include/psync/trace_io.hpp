#pragma once

#include <string>
#include <string_view>

#include "psync/trace.hpp"

namespace psync {

/// A decoded trace file: the execution plus the clock oracle it was recorded
/// under. Legality bounds live on the real timeline, so a trace is only
/// checkable together with its clock.
struct TraceDocument {
    ClockOracle oracle = ClockOracle::identity();
    Execution execution;
};

/// Canonical line-oriented encoding: line 1 is a header record, then one
/// initial-state record per party, then one record per event. Field order is
/// fixed and no extra whitespace is emitted, so byte equality of encodings
/// coincides with record equality. Timestamps use the shortest decimal
/// representation that round-trips; payloads of received messages appear as
/// 64-bit digests (the full payload lives with the send record).
std::string encode_trace(const Execution& e, const ClockOracle& oracle);

/// Inverse of encode_trace. Throws std::runtime_error on any structural
/// problem: bad version, unresolvable received uid, digest mismatch,
/// unordered events.
TraceDocument decode_trace(std::string_view text);

/// Atomic file write (temp file + rename) of the canonical encoding.
void write_trace_file(const std::string& path, const Execution& e, const ClockOracle& oracle);

TraceDocument read_trace_file(const std::string& path);

}  // namespace psync
