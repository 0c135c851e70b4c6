#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "normalis/geometry.hpp"
#include "normalis/metrics.hpp"
#include "normalis/synthetic.hpp"

namespace normalis {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// PFM
// ---------------------------------------------------------------------------

/// Float raster, top row first, `channels` interleaved samples per pixel
/// (1 for "Pf", 3 for "PF").
struct FloatImage {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<float> data;
};

enum class Endianness { Little, Big };

/// Reads "Pf" (grey) or "PF" (RGB) files. Rows are stored bottom-up; the
/// sign of the scale line selects the byte order (negative = little-endian).
FloatImage read_pfm(const fs::path& path);
void write_pfm(const FloatImage& image, const fs::path& path, Endianness order = Endianness::Little);

/// Invalid pixels are written as 0 and read back as invalid.
DepthImage read_depth_pfm(const fs::path& path);
DisparityImage read_disparity_pfm(const fs::path& path);
void write_depth_pfm(const DepthImage& depth, const fs::path& path);
void write_disparity_pfm(const DisparityImage& disparity, const fs::path& path);

/// Three-channel PFM; invalid pixels are stored as (0, 0, 0).
NormalMap read_normal_pfm(const fs::path& path);
void write_normal_pfm(const NormalMap& normals, const fs::path& path);

// ---------------------------------------------------------------------------
// PNG
// ---------------------------------------------------------------------------

/// 16-bit grey depth in millimeters; 0 marks an invalid pixel.
DepthImage read_depth_png16(const fs::path& path);
/// Depths round to the nearest millimeter; values outside [1, 65535] mm are
/// written as 0 (invalid).
void write_depth_png16(const DepthImage& depth, const fs::path& path);

/// 16-bit RGBA: channel c = round((n_c + 1) / 2 * 65535), alpha 65535 for
/// valid pixels and 0 (with zero colour) for invalid ones.
void encode_normal_png(const NormalMap& normals, const fs::path& path);
/// Accepts 16-bit RGBA (alpha 0 = invalid) or 16-bit RGB (all-zero =
/// invalid); decoded vectors are renormalized.
NormalMap decode_normal_png(const fs::path& path);

/// Chooses PFM or PNG by extension (".pfm" / ".png").
NormalMap read_normal_map(const fs::path& path);
void write_normal_map(const NormalMap& normals, const fs::path& path);

/// 8-bit grey mask, nonzero = set.
BinaryMask read_mask_png(const fs::path& path);
void write_mask_png(const BinaryMask& mask, const fs::path& path);

/// 8-bit RGB visualization ((n + 1) / 2 * 255), invalid pixels black.
void write_normal_color_png(const NormalMap& normals, const fs::path& path);

/// RGB colour for an angular error: viridis ramp over [0, max_degrees],
/// saturating above.
std::array<std::uint8_t, 3> error_color(double degrees, double max_degrees = 30.0);
/// 8-bit RGB error map; invalid pixels black.
void write_error_map_png(const AngularErrorMap& errors, const fs::path& path, double max_degrees = 30.0);

// ---------------------------------------------------------------------------
// Dataset manifest
// ---------------------------------------------------------------------------

enum class DepthFormat { PfmMeters, Png16Millimeters, PfmDisparity };

std::string_view to_string(DepthFormat format);
DepthFormat parse_depth_format(std::string_view name);

/// Evaluation band around a dihedral ridge.
struct RidgeBand {
  SplitAxis axis = SplitAxis::U;
  double split = 0.0;
  double half_width = 2.0;
};

struct ManifestEntry {
  std::string id;
  fs::path depth_path;
  DepthFormat depth_format = DepthFormat::PfmMeters;
  CameraIntrinsics intrinsics;
  std::optional<fs::path> gt_normal_path;
  std::optional<fs::path> gt_mask_path;
  std::optional<RidgeBand> ridge;
  std::optional<SceneSpec> scene;
};

/// Paths in a loaded manifest are absolute (resolved against the manifest's
/// directory); `save_manifest` writes them relative to it when possible.
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
};

/// Parses and validates: unique ids, known depth formats, valid intrinsics,
/// and existing referenced files. Throws FormatError / IoError naming the
/// offending entry.
DatasetManifest load_manifest(const fs::path& path);
void save_manifest(const DatasetManifest& manifest, const fs::path& path);

/// Entry depth as either metric depth or an inverse-depth-like image
/// (disparity).
using EntryDepth = std::variant<DepthImage, InverseDepthImage>;
EntryDepth load_entry_depth(const ManifestEntry& entry);

}  // namespace normalis
