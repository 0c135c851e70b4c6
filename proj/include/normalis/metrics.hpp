#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "normalis/image.hpp"

namespace normalis {

/// Per-pixel angle between estimate and ground truth in degrees; valid where
/// both inputs are valid.
struct AngularErrorMap {
  ImageSize size;
  std::vector<double> degrees;
  std::vector<std::uint8_t> valid;

  std::size_t valid_count() const;
};

enum class AngleMode {
  Directed,  ///< arccos of the signed cosine, [0, 180]
  Axial      ///< n and -n identified, [0, 90]
};

AngularErrorMap angular_error_map(const NormalMap& estimate, const NormalMap& ground_truth,
                                  AngleMode mode = AngleMode::Directed);

/// e_A: mean over valid pixels (compensated summation). Throws
/// DegenerateInput when no pixel is valid.
double mean_angular_error(const AngularErrorMap& errors);

struct ErrorSummary {
  double mean = 0.0;
  double median = 0.0;
  double max = 0.0;
  std::size_t count = 0;
};

/// Mean/median/max over valid pixels, optionally restricted to `region`
/// (same size, nonzero = included). Throws DegenerateInput when empty.
ErrorSummary summarize(const AngularErrorMap& errors, std::optional<std::span<const std::uint8_t>> region = std::nullopt);

/// Clears validity outside `region`.
AngularErrorMap restrict_to(const AngularErrorMap& errors, std::span<const std::uint8_t> region);

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Tallies prediction against ground truth over pixels where `evaluate` is
/// set (all pixels when absent).
ConfusionCounts confusion(const BinaryMask& prediction, const BinaryMask& ground_truth,
                          const BinaryMask* evaluate = nullptr);

/// F-score in percent. Throws DegenerateInput when tp + fp + fn = 0.
double fscore(const ConfusionCounts& c);
/// Intersection over union in percent. Throws DegenerateInput when
/// tp + fp + fn = 0.
double iou(const ConfusionCounts& c);

}  // namespace normalis
