#include "rfk/png_io.hpp"

#include <png.h>

#include <csetjmp>
#include <cstring>
#include <fstream>

#include "rfk/errors.hpp"

namespace rfk {

namespace {

struct MemoryReader {
  const std::uint8_t* data;
  std::size_t size;
  std::size_t offset;
};

void read_from_memory(png_structp png, png_bytep out, png_size_t count) {
  auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (reader->offset + count > reader->size) {
    png_error(png, "unexpected end of PNG stream");
  }
  std::memcpy(out, reader->data + reader->offset, count);
  reader->offset += count;
}

void write_to_vector(png_structp png, png_bytep data, png_size_t count) {
  auto* sink = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  sink->insert(sink->end(), data, data + count);
}

void flush_noop(png_structp) {}

struct ReadGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~ReadGuard() { png_destroy_read_struct(&png, &info, nullptr); }
};

struct WriteGuard {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~WriteGuard() { png_destroy_write_struct(&png, &info); }
};

}  // namespace

std::vector<std::uint8_t> encode_png(const Image& image) {
  if (image.width <= 0 || image.height <= 0 ||
      image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    throw ValidationError("encode_png: inconsistent image dimensions");
  }
  std::vector<std::uint8_t> out;
  WriteGuard g;
  g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!g.png) throw IoError("encode_png: png_create_write_struct failed");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw IoError("encode_png: png_create_info_struct failed");
  if (setjmp(png_jmpbuf(g.png))) throw IoError("encode_png: libpng error");

  png_set_write_fn(g.png, &out, write_to_vector, flush_noop);
  png_set_IHDR(g.png, g.info, static_cast<png_uint_32>(image.width),
               static_cast<png_uint_32>(image.height), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(g.png, 6);
  png_write_info(g.png, g.info);
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) {
    rows[static_cast<std::size_t>(y)] =
        const_cast<png_bytep>(image.rgb.data() + image.index(0, y));
  }
  png_write_image(g.png, rows.data());
  png_write_end(g.png, nullptr);
  return out;
}

Image decode_png(const std::uint8_t* data, std::size_t size) {
  if (size < 8 || png_sig_cmp(data, 0, 8) != 0) throw ParseError("decode_png: not a PNG stream");
  ReadGuard g;
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!g.png) throw IoError("decode_png: png_create_read_struct failed");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw IoError("decode_png: png_create_info_struct failed");
  if (setjmp(png_jmpbuf(g.png))) throw ParseError("decode_png: malformed PNG stream");

  MemoryReader reader{data, size, 0};
  png_set_read_fn(g.png, &reader, read_from_memory);
  png_read_info(g.png, g.info);

  png_set_palette_to_rgb(g.png);
  png_set_expand_gray_1_2_4_to_8(g.png);
  png_set_gray_to_rgb(g.png);
  png_set_strip_16(g.png);
  png_set_strip_alpha(g.png);
  if (png_get_valid(g.png, g.info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(g.png);
  png_read_update_info(g.png, g.info);

  Image image;
  image.width = static_cast<int>(png_get_image_width(g.png, g.info));
  image.height = static_cast<int>(png_get_image_height(g.png, g.info));
  if (png_get_channels(g.png, g.info) != 3) {
    // tRNS expansion can reintroduce alpha; drop it.
    png_set_strip_alpha(g.png);
    png_read_update_info(g.png, g.info);
  }
  image.rgb.resize(static_cast<std::size_t>(image.width) * image.height * 3);
  std::vector<png_bytep> rows(static_cast<std::size_t>(image.height));
  for (int y = 0; y < image.height; ++y) {
    rows[static_cast<std::size_t>(y)] = image.rgb.data() + image.index(0, y);
  }
  png_read_image(g.png, rows.data());
  png_read_end(g.png, nullptr);
  return image;
}

Image decode_png(const std::vector<std::uint8_t>& data) {
  return decode_png(data.data(), data.size());
}

PngHeader peek_png_header(const std::uint8_t* data, std::size_t size) {
  static const std::uint8_t signature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  // 8 signature bytes + chunk length/type + 8 bytes of IHDR payload we need.
  if (size < 24 || std::memcmp(data, signature, 8) != 0 ||
      std::memcmp(data + 12, "IHDR", 4) != 0) {
    throw ParseError("peek_png_header: not a PNG stream");
  }
  auto be32 = [&](std::size_t off) {
    return (std::uint32_t(data[off]) << 24) | (std::uint32_t(data[off + 1]) << 16) |
           (std::uint32_t(data[off + 2]) << 8) | std::uint32_t(data[off + 3]);
  };
  PngHeader h;
  h.width = static_cast<int>(be32(16));
  h.height = static_cast<int>(be32(20));
  return h;
}

std::vector<std::uint8_t> encode_png_gray16(int width, int height,
                                            const std::vector<std::uint16_t>& samples) {
  if (width <= 0 || height <= 0 ||
      samples.size() != static_cast<std::size_t>(width) * height) {
    throw ValidationError("encode_png_gray16: inconsistent dimensions");
  }
  std::vector<std::uint8_t> out;
  WriteGuard g;
  g.png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!g.png) throw IoError("encode_png_gray16: png_create_write_struct failed");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw IoError("encode_png_gray16: png_create_info_struct failed");
  if (setjmp(png_jmpbuf(g.png))) throw IoError("encode_png_gray16: libpng error");

  png_set_write_fn(g.png, &out, write_to_vector, flush_noop);
  png_set_IHDR(g.png, g.info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height),
               16, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(g.png, g.info);
  // PNG stores 16-bit samples big-endian.
  std::vector<std::uint8_t> row(static_cast<std::size_t>(width) * 2);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      std::uint16_t v = samples[static_cast<std::size_t>(y) * width + x];
      row[static_cast<std::size_t>(x) * 2] = static_cast<std::uint8_t>(v >> 8);
      row[static_cast<std::size_t>(x) * 2 + 1] = static_cast<std::uint8_t>(v & 0xff);
    }
    png_write_row(g.png, row.data());
  }
  png_write_end(g.png, nullptr);
  return out;
}

std::vector<std::uint16_t> decode_png_gray16(const std::vector<std::uint8_t>& data, int* width,
                                             int* height) {
  ReadGuard g;
  g.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!g.png) throw IoError("decode_png_gray16: png_create_read_struct failed");
  g.info = png_create_info_struct(g.png);
  if (!g.info) throw IoError("decode_png_gray16: png_create_info_struct failed");
  if (setjmp(png_jmpbuf(g.png))) throw ParseError("decode_png_gray16: malformed PNG stream");

  MemoryReader reader{data.data(), data.size(), 0};
  png_set_read_fn(g.png, &reader, read_from_memory);
  png_read_info(g.png, g.info);
  if (png_get_color_type(g.png, g.info) != PNG_COLOR_TYPE_GRAY ||
      png_get_bit_depth(g.png, g.info) != 16) {
    throw ParseError("decode_png_gray16: expected 16-bit grayscale");
  }
  int w = static_cast<int>(png_get_image_width(g.png, g.info));
  int h = static_cast<int>(png_get_image_height(g.png, g.info));
  std::vector<std::uint16_t> samples(static_cast<std::size_t>(w) * h);
  std::vector<std::uint8_t> row(static_cast<std::size_t>(w) * 2);
  for (int y = 0; y < h; ++y) {
    png_read_row(g.png, row.data(), nullptr);
    for (int x = 0; x < w; ++x) {
      samples[static_cast<std::size_t>(y) * w + x] =
          static_cast<std::uint16_t>((row[static_cast<std::size_t>(x) * 2] << 8) |
                                     row[static_cast<std::size_t>(x) * 2 + 1]);
    }
  }
  if (width) *width = w;
  if (height) *height = h;
  return samples;
}

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path);
  return data;
}

void write_binary_file(const std::string& path, const std::uint8_t* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create file: " + path);
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace rfk
