#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace labelforge {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::string_view data);
std::string sha256_hex(std::string_view data);
std::string to_hex(const Sha256Digest& digest);

/// First eight digest bytes read big-endian.
std::uint64_t digest_prefix_u64(const Sha256Digest& digest);

}  // namespace labelforge
