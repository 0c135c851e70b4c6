#include <algorithm>
#include <array>
#include <csetjmp>
#include <cmath>
#include <cstdio>
#include <memory>

#include <png.h>

#include "normalis/io.hpp"

namespace normalis {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Decoded PNG with samples widened to 16 bits per channel value slot.
struct RawPng {
  int width = 0;
  int height = 0;
  int bit_depth = 0;
  int channels = 0;
  std::vector<std::uint16_t> samples;  // row-major, interleaved
};

RawPng read_png(const fs::path& path) {
  FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw IoError("cannot open " + path.string());
  unsigned char sig[8];
  if (std::fread(sig, 1, 8, file.get()) != 8 || png_sig_cmp(sig, 0, 8) != 0) {
    throw FormatError(path.string() + ": not a PNG file");
  }
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw FormatError("libpng initialization failed");
  }
  RawPng out;
  std::vector<png_bytep> rows;
  std::vector<unsigned char> buffer;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw FormatError(path.string() + ": corrupt or truncated PNG");
  }
  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);
  const auto color = png_get_color_type(png, info);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (png_get_bit_depth(png, info) < 8) png_set_packing(png);
  if (color == PNG_COLOR_TYPE_GRAY && png_get_bit_depth(png, info) < 8) png_set_expand_gray_1_2_4_to_8(png);
  png_read_update_info(png, info);

  out.width = static_cast<int>(png_get_image_width(png, info));
  out.height = static_cast<int>(png_get_image_height(png, info));
  out.bit_depth = png_get_bit_depth(png, info);
  out.channels = png_get_channels(png, info);
  const std::size_t rowbytes = png_get_rowbytes(png, info);
  buffer.resize(rowbytes * static_cast<std::size_t>(out.height));
  rows.resize(static_cast<std::size_t>(out.height));
  for (int r = 0; r < out.height; ++r) rows[r] = buffer.data() + rowbytes * static_cast<std::size_t>(r);
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  const std::size_t count = static_cast<std::size_t>(out.width) * out.height * out.channels;
  out.samples.resize(count);
  if (out.bit_depth == 16) {
    for (std::size_t i = 0; i < count; ++i) {
      out.samples[i] = static_cast<std::uint16_t>((buffer[2 * i] << 8) | buffer[2 * i + 1]);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) out.samples[i] = buffer[i];
  }
  return out;
}

// `samples` row-major interleaved; 16-bit samples are written big-endian.
void write_png(const fs::path& path, int width, int height, int bit_depth, int color_type, int channels,
               const std::vector<std::uint16_t>& samples) {
  std::vector<unsigned char> buffer;
  const std::size_t count = static_cast<std::size_t>(width) * height * channels;
  if (bit_depth == 16) {
    buffer.resize(2 * count);
    for (std::size_t i = 0; i < count; ++i) {
      buffer[2 * i] = static_cast<unsigned char>(samples[i] >> 8);
      buffer[2 * i + 1] = static_cast<unsigned char>(samples[i] & 0xff);
    }
  } else {
    buffer.resize(count);
    for (std::size_t i = 0; i < count; ++i) buffer[i] = static_cast<unsigned char>(samples[i]);
  }
  const std::size_t rowbytes = buffer.size() / static_cast<std::size_t>(height);
  std::vector<png_bytep> rows(static_cast<std::size_t>(height));
  for (int r = 0; r < height; ++r) rows[r] = buffer.data() + rowbytes * static_cast<std::size_t>(r);

  FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw IoError("cannot write " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), bit_depth, color_type,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

std::uint16_t encode_component(double c) {
  const double scaled = std::round((c + 1.0) * 0.5 * 65535.0);
  return static_cast<std::uint16_t>(std::clamp(scaled, 0.0, 65535.0));
}

// Viridis anchors at 0, 1/8, ..., 1.
constexpr std::array<std::array<double, 3>, 9> kViridis = {{{68, 1, 84},
                                                             {71, 44, 122},
                                                             {59, 81, 139},
                                                             {44, 113, 142},
                                                             {33, 144, 141},
                                                             {39, 173, 129},
                                                             {92, 200, 99},
                                                             {170, 220, 50},
                                                             {253, 231, 37}}};

}  // namespace

DepthImage read_depth_png16(const fs::path& path) {
  const RawPng raw = read_png(path);
  if (raw.bit_depth != 16 || raw.channels != 1) {
    throw FormatError(path.string() + ": depth PNG must be 16-bit single-channel (got " +
                      std::to_string(raw.bit_depth) + "-bit, " + std::to_string(raw.channels) + " channels)");
  }
  DepthImage out(raw.width, raw.height);
  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    if (raw.samples[i] != 0) out.set(i, raw.samples[i] / 1000.0);
  }
  return out;
}

void write_depth_png16(const DepthImage& depth, const fs::path& path) {
  std::vector<std::uint16_t> samples(depth.size().pixels(), 0);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!depth.valid(i)) continue;
    const double mm = std::round(depth.value(i) * 1000.0);
    if (mm >= 1.0 && mm <= 65535.0) samples[i] = static_cast<std::uint16_t>(mm);
  }
  write_png(path, depth.width(), depth.height(), 16, PNG_COLOR_TYPE_GRAY, 1, samples);
}

void encode_normal_png(const NormalMap& normals, const fs::path& path) {
  std::vector<std::uint16_t> samples(normals.size().pixels() * 4, 0);
  for (std::size_t i = 0; i < normals.size().pixels(); ++i) {
    if (!normals.valid(i)) continue;
    const Vec3& n = normals.normal(i);
    samples[4 * i] = encode_component(n.x());
    samples[4 * i + 1] = encode_component(n.y());
    samples[4 * i + 2] = encode_component(n.z());
    samples[4 * i + 3] = 65535;
  }
  write_png(path, normals.width(), normals.height(), 16, PNG_COLOR_TYPE_RGB_ALPHA, 4, samples);
}

NormalMap decode_normal_png(const fs::path& path) {
  const RawPng raw = read_png(path);
  if (raw.bit_depth != 16 || (raw.channels != 3 && raw.channels != 4)) {
    throw FormatError(path.string() + ": normal PNG must be 16-bit RGB or RGBA");
  }
  NormalMap out(raw.width, raw.height);
  const auto ch = static_cast<std::size_t>(raw.channels);
  for (std::size_t i = 0; i < out.size().pixels(); ++i) {
    const std::uint16_t* px = raw.samples.data() + ch * i;
    if (ch == 4 && px[3] == 0) continue;
    if (ch == 3 && px[0] == 0 && px[1] == 0 && px[2] == 0) continue;
    const Vec3 n(px[0] / 65535.0 * 2.0 - 1.0, px[1] / 65535.0 * 2.0 - 1.0, px[2] / 65535.0 * 2.0 - 1.0);
    const double norm = n.norm();
    if (norm > 0.0) out.set(i, n / norm);
  }
  return out;
}

NormalMap read_normal_map(const fs::path& path) {
  if (path.extension() == ".pfm") return read_normal_pfm(path);
  return decode_normal_png(path);
}

void write_normal_map(const NormalMap& normals, const fs::path& path) {
  if (path.extension() == ".pfm") {
    write_normal_pfm(normals, path);
  } else {
    encode_normal_png(normals, path);
  }
}

BinaryMask read_mask_png(const fs::path& path) {
  const RawPng raw = read_png(path);
  if (raw.channels != 1) throw FormatError(path.string() + ": mask PNG must be single-channel");
  BinaryMask out(raw.width, raw.height);
  for (std::size_t i = 0; i < raw.samples.size(); ++i) out.data[i] = raw.samples[i] != 0 ? 1 : 0;
  return out;
}

void write_mask_png(const BinaryMask& mask, const fs::path& path) {
  std::vector<std::uint16_t> samples(mask.data.size());
  for (std::size_t i = 0; i < samples.size(); ++i) samples[i] = mask.data[i] ? 255 : 0;
  write_png(path, mask.size.width, mask.size.height, 8, PNG_COLOR_TYPE_GRAY, 1, samples);
}

void write_normal_color_png(const NormalMap& normals, const fs::path& path) {
  std::vector<std::uint16_t> samples(normals.size().pixels() * 3, 0);
  for (std::size_t i = 0; i < normals.size().pixels(); ++i) {
    if (!normals.valid(i)) continue;
    for (int c = 0; c < 3; ++c) {
      const double x = std::round((normals.normal(i)[c] + 1.0) * 0.5 * 255.0);
      samples[3 * i + c] = static_cast<std::uint16_t>(std::clamp(x, 0.0, 255.0));
    }
  }
  write_png(path, normals.width(), normals.height(), 8, PNG_COLOR_TYPE_RGB, 3, samples);
}

std::array<std::uint8_t, 3> error_color(double degrees, double max_degrees) {
  const double t = std::clamp(degrees / max_degrees, 0.0, 1.0) * 8.0;
  const auto lo = static_cast<std::size_t>(std::min(std::floor(t), 7.0));
  const double f = t - static_cast<double>(lo);
  std::array<std::uint8_t, 3> rgb{};
  for (int c = 0; c < 3; ++c) {
    const double x = kViridis[lo][c] + f * (kViridis[lo + 1][c] - kViridis[lo][c]);
    rgb[c] = static_cast<std::uint8_t>(std::lround(x));
  }
  return rgb;
}

void write_error_map_png(const AngularErrorMap& errors, const fs::path& path, double max_degrees) {
  std::vector<std::uint16_t> samples(errors.size.pixels() * 3, 0);
  for (std::size_t i = 0; i < errors.size.pixels(); ++i) {
    if (!errors.valid[i]) continue;
    const auto rgb = error_color(errors.degrees[i], max_degrees);
    for (int c = 0; c < 3; ++c) samples[3 * i + c] = rgb[c];
  }
  write_png(path, errors.size.width, errors.size.height, 8, PNG_COLOR_TYPE_RGB, 3, samples);
}

}  // namespace normalis
