#pragma once

#include <array>
#include <string_view>

#include "normalis/image.hpp"

namespace normalis {

enum class GradientKernel { CentralDifference, Sobel, Prewitt };

std::string_view to_string(GradientKernel kernel);
/// Accepts "central", "sobel", "prewitt". Throws InvalidInput otherwise.
GradientKernel parse_gradient_kernel(std::string_view name);

/// 3x3 horizontal stencil, row-major over (dv, du) in {-1, 0, 1}^2, applied
/// as g_u(u, v) = sum w[dv][du] * I(u + du, v + dv). The vertical stencil is
/// its transpose. Weights are normalized so an affine ramp yields its slope.
struct Stencil {
  std::array<std::array<double, 3>, 3> horizontal{};
  std::array<std::array<double, 3>, 3> vertical{};
  /// Pixels (dv, du) the output validity depends on.
  std::array<std::array<bool, 3>, 3> footprint{};
};

const Stencil& stencil(GradientKernel kernel);

/// Per-pixel inverse-depth gradients g_u = d(1/z)/du, g_v = d(1/z)/dv in
/// (1/m)/px. A pixel is valid only if every pixel in the stencil footprint
/// is inside the image and valid.
struct GradientField {
  ImageSize size;
  std::vector<double> gu;
  std::vector<double> gv;
  std::vector<std::uint8_t> valid;

  bool valid_at(int u, int v) const { return valid[size.index(u, v)] != 0; }
};

/// Throws InvalidInput if the image is smaller than 3x3.
GradientField compute_gradients(const InverseDepthImage& image, GradientKernel kernel = GradientKernel::CentralDifference);

}  // namespace normalis
