#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rfk {

std::string base64_encode(const std::uint8_t* data, std::size_t size);
std::string base64_encode(const std::vector<std::uint8_t>& data);

// Strict decoder: standard alphabet, '=' padding, no whitespace. Throws
// ParseError on malformed input.
std::vector<std::uint8_t> base64_decode(const std::string& text);

}  // namespace rfk
