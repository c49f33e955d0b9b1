#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "zkcontact/bytes.hpp"

namespace zkcontact {

using Digest = std::array<uint8_t, 32>;

Digest sha256(std::span<const uint8_t> data);

/// SHAKE256 expansion of `input` to `out_len` bytes.
Bytes xof_expand(std::span<const uint8_t> input, size_t out_len);

std::string hex_encode(std::span<const uint8_t> data);
Bytes hex_decode(std::string_view hex);

} // namespace zkcontact
