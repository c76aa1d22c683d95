#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace psync {

/// Opaque byte string used for payloads, state encodings and outputs.
using Bytes = std::vector<std::uint8_t>;

std::string to_hex(const Bytes& data);
Bytes from_hex(std::string_view hex);

/// FNV-1a 64-bit digest, used for payload fingerprints in trace files.
std::uint64_t fnv1a64(const Bytes& data);

/// Digest rendered as 16 lowercase hex characters.
std::string payload_digest(const Bytes& data);

inline Bytes bytes_of(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

}  // namespace psync
