#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace powrace {

using Bytes = std::vector<std::uint8_t>;

/// 256-bit value, big-endian byte order. Used both for digests and for
/// mining targets, so ordinary lexicographic comparison is numeric comparison.
using Hash256 = std::array<std::uint8_t, 32>;

Hash256 sha256(std::span<const std::uint8_t> data);

std::string to_hex(const Hash256& h);

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

} // namespace powrace
