#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "normalis/io.hpp"

namespace normalis {
namespace {

std::uint32_t byteswap32(std::uint32_t x) {
  return ((x & 0xffU) << 24) | ((x & 0xff00U) << 8) | ((x >> 8) & 0xff00U) | (x >> 24);
}

constexpr bool kHostLittle = std::endian::native == std::endian::little;

// Reads one whitespace-delimited header token.
std::string header_token(std::istream& in, const fs::path& path) {
  std::string token;
  char ch;
  while (in.get(ch)) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!token.empty()) return token;
    } else {
      token.push_back(ch);
    }
  }
  throw FormatError(path.string() + ": truncated PFM header");
}

template <class Image>
Image scalar_from_pfm(const fs::path& path) {
  const FloatImage raw = read_pfm(path);
  if (raw.channels != 1) throw FormatError(path.string() + ": expected a single-channel (Pf) PFM");
  Image out(raw.width, raw.height);
  for (std::size_t i = 0; i < raw.data.size(); ++i) out.set(i, static_cast<double>(raw.data[i]));
  return out;
}

template <class Image>
void scalar_to_pfm(const Image& image, const fs::path& path) {
  FloatImage raw{image.width(), image.height(), 1, std::vector<float>(image.size().pixels(), 0.0f)};
  for (std::size_t i = 0; i < raw.data.size(); ++i) {
    if (image.valid(i)) raw.data[i] = static_cast<float>(image.value(i));
  }
  write_pfm(raw, path);
}

}  // namespace

FloatImage read_pfm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());

  const std::string magic = header_token(in, path);
  FloatImage img;
  if (magic == "Pf") {
    img.channels = 1;
  } else if (magic == "PF") {
    img.channels = 3;
  } else {
    throw FormatError(path.string() + ": not a PFM file (magic '" + magic + "')");
  }
  try {
    img.width = std::stoi(header_token(in, path));
    img.height = std::stoi(header_token(in, path));
  } catch (const std::logic_error&) {
    throw FormatError(path.string() + ": malformed PFM dimensions");
  }
  if (img.width <= 0 || img.height <= 0) throw FormatError(path.string() + ": non-positive PFM dimensions");
  double scale = 0.0;
  try {
    scale = std::stod(header_token(in, path));
  } catch (const std::logic_error&) {
    throw FormatError(path.string() + ": malformed PFM scale");
  }
  if (scale == 0.0 || !std::isfinite(scale)) throw FormatError(path.string() + ": PFM scale must be non-zero");
  const bool file_little = scale < 0.0;

  const std::size_t row_len = static_cast<std::size_t>(img.width) * static_cast<std::size_t>(img.channels);
  img.data.resize(row_len * static_cast<std::size_t>(img.height));
  std::vector<std::uint32_t> row(row_len);
  for (int r = 0; r < img.height; ++r) {
    if (!in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row_len * 4))) {
      throw FormatError(path.string() + ": truncated PFM payload");
    }
    // File rows run bottom-up.
    float* dst = img.data.data() + static_cast<std::size_t>(img.height - 1 - r) * row_len;
    for (std::size_t c = 0; c < row_len; ++c) {
      std::uint32_t bits = row[c];
      if (file_little != kHostLittle) bits = byteswap32(bits);
      dst[c] = std::bit_cast<float>(bits);
    }
  }
  return img;
}

void write_pfm(const FloatImage& image, const fs::path& path, Endianness order) {
  if (image.channels != 1 && image.channels != 3) throw InvalidInput("PFM supports 1 or 3 channels");
  const std::size_t row_len = static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.channels);
  if (image.width <= 0 || image.height <= 0 || image.data.size() != row_len * static_cast<std::size_t>(image.height)) {
    throw InvalidInput("write_pfm: data size does not match dimensions");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  const bool little = order == Endianness::Little;
  out << (image.channels == 1 ? "Pf" : "PF") << '\n'
      << image.width << ' ' << image.height << '\n'
      << (little ? "-1.0" : "1.0") << '\n';
  std::vector<std::uint32_t> row(row_len);
  for (int r = image.height - 1; r >= 0; --r) {
    const float* src = image.data.data() + static_cast<std::size_t>(r) * row_len;
    for (std::size_t c = 0; c < row_len; ++c) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(src[c]);
      if (little != kHostLittle) bits = byteswap32(bits);
      row[c] = bits;
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row_len * 4));
  }
  if (!out) throw IoError("failed writing " + path.string());
}

DepthImage read_depth_pfm(const fs::path& path) { return scalar_from_pfm<DepthImage>(path); }
DisparityImage read_disparity_pfm(const fs::path& path) { return scalar_from_pfm<DisparityImage>(path); }
void write_depth_pfm(const DepthImage& depth, const fs::path& path) { scalar_to_pfm(depth, path); }
void write_disparity_pfm(const DisparityImage& disparity, const fs::path& path) { scalar_to_pfm(disparity, path); }

NormalMap read_normal_pfm(const fs::path& path) {
  const FloatImage raw = read_pfm(path);
  if (raw.channels != 3) throw FormatError(path.string() + ": expected a three-channel (PF) normal map");
  NormalMap out(raw.width, raw.height);
  for (std::size_t i = 0; i < out.size().pixels(); ++i) {
    const Vec3 n(raw.data[3 * i], raw.data[3 * i + 1], raw.data[3 * i + 2]);
    const double norm = n.norm();
    if (norm > 0.0 && std::isfinite(norm)) out.set(i, n / norm);
  }
  return out;
}

void write_normal_pfm(const NormalMap& normals, const fs::path& path) {
  FloatImage raw{normals.width(), normals.height(), 3, std::vector<float>(normals.size().pixels() * 3, 0.0f)};
  for (std::size_t i = 0; i < normals.size().pixels(); ++i) {
    if (!normals.valid(i)) continue;
    for (int c = 0; c < 3; ++c) raw.data[3 * i + c] = static_cast<float>(normals.normal(i)[c]);
  }
  write_pfm(raw, path);
}

}  // namespace normalis
