#include "normalis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace normalis {
namespace {

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

void require_relevant(const ConfusionCounts& c) {
  if (c.tp + c.fp + c.fn == 0) throw DegenerateInput("score undefined: tp + fp + fn = 0");
}

}  // namespace

std::size_t AngularErrorMap::valid_count() const {
  return static_cast<std::size_t>(std::count_if(valid.begin(), valid.end(), [](auto m) { return m != 0; }));
}

AngularErrorMap angular_error_map(const NormalMap& estimate, const NormalMap& ground_truth, AngleMode mode) {
  require_same_size(estimate.size(), ground_truth.size(), "angular_error_map");
  const ImageSize size = estimate.size();
  AngularErrorMap out{size, std::vector<double>(size.pixels(), 0.0), std::vector<std::uint8_t>(size.pixels(), 0)};
  for (std::size_t i = 0; i < size.pixels(); ++i) {
    if (!estimate.valid(i) || !ground_truth.valid(i)) continue;
    const Vec3& a = estimate.normal(i);
    const Vec3& b = ground_truth.normal(i);
    const double denom = a.norm() * b.norm();
    if (!(denom > 0.0)) continue;
    double cosine = std::clamp(a.dot(b) / denom, -1.0, 1.0);
    if (mode == AngleMode::Axial) cosine = std::abs(cosine);
    out.degrees[i] = std::acos(cosine) * 180.0 / std::numbers::pi;
    out.valid[i] = 1;
  }
  return out;
}

double mean_angular_error(const AngularErrorMap& errors) {
  CompensatedSum sum;
  std::size_t n = 0;
  for (std::size_t i = 0; i < errors.degrees.size(); ++i) {
    if (!errors.valid[i]) continue;
    sum.add(errors.degrees[i]);
    ++n;
  }
  if (n == 0) throw DegenerateInput("mean_angular_error: no valid pixels");
  return sum.value() / static_cast<double>(n);
}

AngularErrorMap restrict_to(const AngularErrorMap& errors, std::span<const std::uint8_t> region) {
  if (region.size() != errors.valid.size()) throw InvalidInput("restrict_to: region size mismatch");
  AngularErrorMap out = errors;
  for (std::size_t i = 0; i < region.size(); ++i) {
    if (!region[i]) out.valid[i] = 0;
  }
  return out;
}

ErrorSummary summarize(const AngularErrorMap& errors, std::optional<std::span<const std::uint8_t>> region) {
  if (region && region->size() != errors.valid.size()) throw InvalidInput("summarize: region size mismatch");
  std::vector<double> values;
  values.reserve(errors.degrees.size());
  CompensatedSum sum;
  for (std::size_t i = 0; i < errors.degrees.size(); ++i) {
    if (!errors.valid[i] || (region && !(*region)[i])) continue;
    values.push_back(errors.degrees[i]);
    sum.add(errors.degrees[i]);
  }
  if (values.empty()) throw DegenerateInput("summarize: no valid pixels");
  ErrorSummary s;
  s.count = values.size();
  s.mean = sum.value() / static_cast<double>(values.size());
  s.max = *std::max_element(values.begin(), values.end());
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  s.median = *mid;
  if (values.size() % 2 == 0) s.median = 0.5 * (s.median + *std::max_element(values.begin(), mid));
  return s;
}

ConfusionCounts confusion(const BinaryMask& prediction, const BinaryMask& ground_truth, const BinaryMask* evaluate) {
  require_same_size(prediction.size, ground_truth.size, "confusion");
  if (evaluate) require_same_size(prediction.size, evaluate->size, "confusion");
  ConfusionCounts c;
  for (std::size_t i = 0; i < prediction.data.size(); ++i) {
    if (evaluate && !evaluate->data[i]) continue;
    const bool p = prediction.data[i] != 0;
    const bool g = ground_truth.data[i] != 0;
    if (p && g) {
      ++c.tp;
    } else if (p) {
      ++c.fp;
    } else if (g) {
      ++c.fn;
    } else {
      ++c.tn;
    }
  }
  return c;
}

double fscore(const ConfusionCounts& c) {
  require_relevant(c);
  // 2 tp^2 / (2 tp^2 + tp (fp + fn)) with the common factor tp removed so
  // that tp = 0 scores 0 instead of 0/0.
  const double tp = static_cast<double>(c.tp);
  return 2.0 * tp / (2.0 * tp + static_cast<double>(c.fp) + static_cast<double>(c.fn)) * 100.0;
}

double iou(const ConfusionCounts& c) {
  require_relevant(c);
  const double tp = static_cast<double>(c.tp);
  return tp / (tp + static_cast<double>(c.fp) + static_cast<double>(c.fn)) * 100.0;
}

}  // namespace normalis
