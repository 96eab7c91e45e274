#pragma once

#include <cstdint>
#include <vector>

namespace rfk {

// 8-bit RGB image, row-major from the top-left corner.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;  // width * height * 3 bytes

  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * width + x) * 3;
  }

  bool operator==(const Image& other) const = default;
};

}  // namespace rfk
