// Python bindings: numpy in, numpy out. Invalid pixels are NaN (or <= 0
// for depth input).

#include <cmath>
#include <limits>
#include <string>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "normalis/bench.hpp"
#include "normalis/error.hpp"
#include "normalis/io.hpp"

namespace py = pybind11;
using namespace normalis;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

template <class Image>
Image image_from(const DoubleArray& a, const char* what) {
  if (a.ndim() != 2) throw InvalidInput(std::string(what) + " must be a 2-D array");
  const auto h = static_cast<int>(a.shape(0));
  const auto w = static_cast<int>(a.shape(1));
  return Image::from_values(w, h, {a.data(), static_cast<std::size_t>(a.size())});
}

template <class Image>
DoubleArray image_to(const Image& img) {
  DoubleArray out({img.height(), img.width()});
  double* p = out.mutable_data();
  for (std::size_t i = 0; i < img.size().pixels(); ++i) p[i] = img.valid(i) ? img.value(i) : kNaN;
  return out;
}

DoubleArray normals_to(const NormalMap& n) {
  DoubleArray out({n.height(), n.width(), 3});
  double* p = out.mutable_data();
  for (std::size_t i = 0; i < n.size().pixels(); ++i) {
    const Vec3 v = n.valid(i) ? n.normal(i) : Vec3(kNaN, kNaN, kNaN);
    p[3 * i] = v.x();
    p[3 * i + 1] = v.y();
    p[3 * i + 2] = v.z();
  }
  return out;
}

NormalMap normals_from(const DoubleArray& a) {
  if (a.ndim() != 3 || a.shape(2) != 3) throw InvalidInput("normal map must have shape (H, W, 3)");
  NormalMap n(static_cast<int>(a.shape(1)), static_cast<int>(a.shape(0)));
  const double* p = a.data();
  for (std::size_t i = 0; i < n.size().pixels(); ++i) {
    const Vec3 v(p[3 * i], p[3 * i + 1], p[3 * i + 2]);
    if (v.allFinite() && v.squaredNorm() > 0.0) n.set(i, v.normalized());
  }
  return n;
}

CameraIntrinsics camera_for(const CameraIntrinsics& k, const DoubleArray& a) {
  if (a.ndim() != 2) throw InvalidInput("image must be a 2-D array");
  CameraIntrinsics out = k;
  out.width = static_cast<int>(a.shape(1));
  out.height = static_cast<int>(a.shape(0));
  return out;
}

std::vector<AxialCandidate> candidates_from(const std::vector<double>& along, const std::vector<double>& nz) {
  if (along.size() != nz.size()) throw InvalidInput("along and nz must have the same length");
  std::vector<AxialCandidate> out(along.size());
  for (std::size_t i = 0; i < along.size(); ++i) out[i] = {along[i], nz[i]};
  return out;
}

DoubleArray estimate(const DoubleArray& image, const CameraIntrinsics& k, const std::string& estimator,
                     const std::string& kernel, int radius, int pca_window, int threads, bool inverse_depth) {
  EstimatorConfig cfg;
  cfg.estimator = parse_estimator(estimator);
  cfg.kernel = parse_gradient_kernel(kernel);
  cfg.neighborhood = Neighborhood::square(radius);
  cfg.pca_window = pca_window;
  const CameraIntrinsics cam = camera_for(k, image);
  NormalMap n;
  {
    py::gil_scoped_release release;
    n = inverse_depth ? estimate_normals(image_from<InverseDepthImage>(image, "image"), cam, cfg, {threads})
                      : estimate_normals(image_from<DepthImage>(image, "depth"), cam, cfg, {threads});
  }
  return normals_to(n);
}

py::tuple render(const SceneSpec& scene, const CameraIntrinsics& k) {
  return py::make_tuple(image_to(render_depth(scene, k)), normals_to(ground_truth_normals(scene, k)));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Surface normals from depth images";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<DegenerateInput>(m, "DegenerateInput", PyExc_ArithmeticError);
  py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  py::class_<CameraIntrinsics>(m, "CameraIntrinsics")
      .def(py::init([](double fx, double fy, double u0, double v0, int width, int height) {
             return CameraIntrinsics{fx, fy, u0, v0, width, height};
           }),
           py::arg("fx"), py::arg("fy"), py::arg("u0"), py::arg("v0"), py::arg("width") = 0, py::arg("height") = 0)
      .def_readwrite("fx", &CameraIntrinsics::fx)
      .def_readwrite("fy", &CameraIntrinsics::fy)
      .def_readwrite("u0", &CameraIntrinsics::u0)
      .def_readwrite("v0", &CameraIntrinsics::v0)
      .def_readwrite("width", &CameraIntrinsics::width)
      .def_readwrite("height", &CameraIntrinsics::height)
      .def("__repr__", [](const CameraIntrinsics& k) {
        return "CameraIntrinsics(fx=" + std::to_string(k.fx) + ", fy=" + std::to_string(k.fy) +
               ", u0=" + std::to_string(k.u0) + ", v0=" + std::to_string(k.v0) + ", width=" +
               std::to_string(k.width) + ", height=" + std::to_string(k.height) + ")";
      });

  m.def("estimators", [] {
    std::vector<std::string> names;
    for (Estimator e : all_estimators()) names.emplace_back(to_string(e));
    return names;
  });

  m.def("estimate_normals", &estimate, py::arg("image"), py::arg("intrinsics"), py::arg("estimator") = "sne+",
        py::arg("kernel") = "central", py::arg("neighborhood_radius") = 1, py::arg("pca_window") = 5,
        py::arg("threads") = 1, py::arg("inverse_depth") = false,
        "Normal map of shape (H, W, 3) from depth (or inverse depth / disparity when inverse_depth=True). "
        "Non-positive or NaN input pixels and pixels without an estimate come back as NaN. The image size "
        "overrides intrinsics.width/height.");

  m.def(
      "back_project",
      [](double u, double v, double z, const CameraIntrinsics& k) {
        const Vec3 q = back_project(u, v, z, k);
        return std::array<double, 3>{q.x(), q.y(), q.z()};
      },
      py::arg("u"), py::arg("v"), py::arg("z"), py::arg("intrinsics"));

  m.def(
      "axial_optimal_inclination",
      [](const std::vector<double>& along, const std::vector<double>& nz) {
        const auto s = axial_optimal_inclination(candidates_from(along, nz));
        return py::make_tuple(s.theta, s.branch, s.objective);
      },
      py::arg("along"), py::arg("nz"), "Returns (theta, branch, objective).");
  m.def(
      "grid_search_inclination",
      [](const std::vector<double>& along, const std::vector<double>& nz, double step) {
        return grid_search_inclination(candidates_from(along, nz), step);
      },
      py::arg("along"), py::arg("nz"), py::arg("step") = 1e-3);

  m.def(
      "render_plane",
      [](const std::array<double, 3>& normal, const std::array<double, 3>& point, const CameraIntrinsics& k) {
        const Vec3 n = Vec3(normal[0], normal[1], normal[2]).normalized();
        return render(PlaneScene::through(n, {point[0], point[1], point[2]}), k);
      },
      py::arg("normal"), py::arg("point"), py::arg("intrinsics"), "Returns (depth, ground-truth normals).");
  m.def(
      "render_sphere",
      [](const std::array<double, 3>& center, double radius, const CameraIntrinsics& k) {
        return render(SphereScene{{center[0], center[1], center[2]}, radius}, k);
      },
      py::arg("center"), py::arg("radius"), py::arg("intrinsics"), "Returns (depth, ground-truth normals).");
  m.def(
      "add_noise",
      [](const DoubleArray& depth, double sigma_fraction, std::uint64_t seed) {
        return image_to(add_noise(image_from<DepthImage>(depth, "depth"), {NoiseUnit::FractionOfDepth, sigma_fraction, seed}));
      },
      py::arg("depth"), py::arg("sigma_fraction"), py::arg("seed") = 0);

  m.def(
      "angular_error",
      [](const DoubleArray& estimate, const DoubleArray& truth) {
        const auto e = angular_error_map(normals_from(estimate), normals_from(truth));
        DoubleArray out({e.size.height, e.size.width});
        double* p = out.mutable_data();
        for (std::size_t i = 0; i < e.degrees.size(); ++i) p[i] = e.valid[i] ? e.degrees[i] : kNaN;
        return out;
      },
      py::arg("estimate"), py::arg("truth"), "Per-pixel angle in degrees, NaN where either map is invalid.");
  m.def(
      "mean_angular_error",
      [](const DoubleArray& estimate, const DoubleArray& truth) {
        return mean_angular_error(angular_error_map(normals_from(estimate), normals_from(truth)));
      },
      py::arg("estimate"), py::arg("truth"));

  m.def(
      "fscore", [](std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) { return fscore({tp, fp, fn, 0}); },
      py::arg("tp"), py::arg("fp"), py::arg("fn"));
  m.def(
      "iou", [](std::uint64_t tp, std::uint64_t fp, std::uint64_t fn) { return iou({tp, fp, fn, 0}); },
      py::arg("tp"), py::arg("fp"), py::arg("fn"));

  m.def(
      "read_depth",
      [](const std::string& path) {
        const fs::path p(path);
        return image_to(p.extension() == ".png" ? read_depth_png16(p) : read_depth_pfm(p));
      },
      py::arg("path"), "Depth in meters from a .pfm (float meters) or .png (16-bit millimeters) file.");
  m.def(
      "write_depth",
      [](const DoubleArray& depth, const std::string& path) {
        const fs::path p(path);
        const auto img = image_from<DepthImage>(depth, "depth");
        if (p.extension() == ".png") write_depth_png16(img, p);
        else write_depth_pfm(img, p);
      },
      py::arg("depth"), py::arg("path"));
  m.def(
      "read_normals", [](const std::string& path) { return normals_to(read_normal_map(path)); }, py::arg("path"));
  m.def(
      "write_normals",
      [](const DoubleArray& normals, const std::string& path) { write_normal_map(normals_from(normals), path); },
      py::arg("normals"), py::arg("path"));

  m.def(
      "oracle_check",
      [](std::size_t trials, std::uint64_t seed, double step) {
        OracleCheckResult r;
        {
          py::gil_scoped_release release;
          r = run_oracle_check(trials, seed, step);
        }
        py::dict d;
        d["trials"] = r.trials;
        d["violations"] = r.violations;
        d["max_theta_deviation"] = r.max_theta_deviation;
        d["max_objective_shortfall"] = r.max_objective_shortfall;
        d["seconds"] = r.seconds;
        d["passed"] = r.passed();
        return d;
      },
      py::arg("trials") = 10000, py::arg("seed") = 1, py::arg("step") = 1e-3);
}
