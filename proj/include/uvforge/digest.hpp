#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uvforge {

/// SHA-256 of the input as 64 lowercase hex characters.
std::string sha256_hex(std::span<const std::uint8_t> data);
std::string sha256_hex(std::string_view data);

std::string base64_encode(std::span<const std::uint8_t> data);
/// Throws Error{DecodeError} on malformed input.
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace uvforge
