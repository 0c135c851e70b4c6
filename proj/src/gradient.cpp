#include "normalis/gradient.hpp"

#include <string>

namespace normalis {
namespace {

Stencil make_stencil(const std::array<double, 3>& smoothing, bool cross_footprint) {
  // Horizontal derivative: smoothing across rows, [-1 0 1]/2 across columns,
  // normalized by the smoothing sum so a unit ramp gives exactly 1.
  double total = 0.0;
  for (double s : smoothing) total += s;
  Stencil st;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      const double diff = (c - 1) * 0.5;
      st.horizontal[r][c] = smoothing[r] * diff / total;
      st.vertical[c][r] = st.horizontal[r][c];
      st.footprint[r][c] = cross_footprint ? (r == 1 || c == 1) : true;
    }
  }
  return st;
}

}  // namespace

std::string_view to_string(GradientKernel kernel) {
  switch (kernel) {
    case GradientKernel::CentralDifference: return "central";
    case GradientKernel::Sobel: return "sobel";
    case GradientKernel::Prewitt: return "prewitt";
  }
  return "unknown";
}

GradientKernel parse_gradient_kernel(std::string_view name) {
  if (name == "central" || name == "central-difference") return GradientKernel::CentralDifference;
  if (name == "sobel") return GradientKernel::Sobel;
  if (name == "prewitt") return GradientKernel::Prewitt;
  throw InvalidInput("unknown gradient kernel '" + std::string(name) + "' (expected central, sobel or prewitt)");
}

const Stencil& stencil(GradientKernel kernel) {
  static const Stencil central = make_stencil({0.0, 1.0, 0.0}, true);
  static const Stencil sobel = make_stencil({1.0, 2.0, 1.0}, false);
  static const Stencil prewitt = make_stencil({1.0, 1.0, 1.0}, false);
  switch (kernel) {
    case GradientKernel::Sobel: return sobel;
    case GradientKernel::Prewitt: return prewitt;
    case GradientKernel::CentralDifference: break;
  }
  return central;
}

GradientField compute_gradients(const InverseDepthImage& image, GradientKernel kernel) {
  const ImageSize size = image.size();
  if (size.width < 3 || size.height < 3) {
    throw InvalidInput("compute_gradients: image " + std::to_string(size.width) + "x" +
                       std::to_string(size.height) + " is smaller than the 3x3 stencil");
  }
  const Stencil& st = stencil(kernel);
  GradientField out{size, std::vector<double>(size.pixels(), 0.0), std::vector<double>(size.pixels(), 0.0),
                    std::vector<std::uint8_t>(size.pixels(), 0)};

  const auto values = image.values();
  const auto mask = image.mask();
  const int w = size.width;
  if (kernel == GradientKernel::CentralDifference) {
    for (int v = 1; v + 1 < size.height; ++v) {
      for (int u = 1; u + 1 < w; ++u) {
        const std::size_t i = size.index(u, v);
        if (!(mask[i] & mask[i - 1] & mask[i + 1] & mask[i - w] & mask[i + w])) continue;
        out.gu[i] = 0.5 * (values[i + 1] - values[i - 1]);
        out.gv[i] = 0.5 * (values[i + w] - values[i - w]);
        out.valid[i] = 1;
      }
    }
    return out;
  }
  // Stencils are antisymmetric, so sum weight * (far side - near side):
  // differences first keeps constant fields exactly zero.
  for (int v = 1; v + 1 < size.height; ++v) {
    for (int u = 1; u + 1 < w; ++u) {
      const std::size_t i = size.index(u, v);
      bool ok = true;
      for (int r = 0; r < 3 && ok; ++r) {
        for (int c = 0; c < 3; ++c) {
          if (st.footprint[r][c] && !mask[size.index(u + c - 1, v + r - 1)]) {
            ok = false;
            break;
          }
        }
      }
      if (!ok) continue;
      double gu = 0.0;
      double gv = 0.0;
      for (int t = 0; t < 3; ++t) {
        gu += st.horizontal[t][2] * (values[size.index(u + 1, v + t - 1)] - values[size.index(u - 1, v + t - 1)]);
        gv += st.vertical[2][t] * (values[size.index(u + t - 1, v + 1)] - values[size.index(u + t - 1, v - 1)]);
      }
      out.gu[i] = gu;
      out.gv[i] = gv;
      out.valid[i] = 1;
    }
  }
  return out;
}

}  // namespace normalis
