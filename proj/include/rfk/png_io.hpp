#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rfk/image.hpp"

namespace rfk {

// Encode as 8-bit RGB PNG. Output is deterministic for a given input.
std::vector<std::uint8_t> encode_png(const Image& image);

// Decode any common PNG layout (palette, gray, alpha, 16-bit) to 8-bit RGB.
Image decode_png(const std::uint8_t* data, std::size_t size);
Image decode_png(const std::vector<std::uint8_t>& data);

// Width/height from the IHDR chunk without a full decode.
struct PngHeader {
  int width = 0;
  int height = 0;
};
PngHeader peek_png_header(const std::uint8_t* data, std::size_t size);

// 16-bit grayscale PNG used for the per-channel raster exports.
std::vector<std::uint8_t> encode_png_gray16(int width, int height,
                                            const std::vector<std::uint16_t>& samples);
std::vector<std::uint16_t> decode_png_gray16(const std::vector<std::uint8_t>& data, int* width,
                                             int* height);

std::vector<std::uint8_t> read_binary_file(const std::string& path);
void write_binary_file(const std::string& path, const std::uint8_t* data, std::size_t size);

}  // namespace rfk
