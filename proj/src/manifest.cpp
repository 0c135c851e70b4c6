#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "normalis/io.hpp"

namespace normalis {
namespace {

using nlohmann::json;

constexpr const char* kManifestFormat = "normalis-manifest";
constexpr int kManifestVersion = 1;

json vec_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::string_view axis_name(SplitAxis axis) { return axis == SplitAxis::U ? "u" : "v"; }

SplitAxis parse_axis(const std::string& s) {
  if (s == "u") return SplitAxis::U;
  if (s == "v") return SplitAxis::V;
  throw FormatError("split axis must be \"u\" or \"v\", got \"" + s + "\"");
}

json plane_to_json(const PlaneScene& p) { return {{"normal", vec_to_json(p.normal)}, {"offset", p.offset}}; }
PlaneScene plane_from_json(const json& j) { return {vec_from_json(j.at("normal")), j.at("offset").get<double>()}; }

json scene_to_json(const SceneSpec& scene) {
  if (const auto* p = std::get_if<PlaneScene>(&scene)) {
    json j = plane_to_json(*p);
    j["type"] = "plane";
    return j;
  }
  if (const auto* s = std::get_if<SphereScene>(&scene)) {
    return {{"type", "sphere"}, {"center", vec_to_json(s->center)}, {"radius", s->radius}};
  }
  const auto& d = std::get<DihedralScene>(scene);
  return {{"type", "dihedral"},
          {"first", plane_to_json(d.first)},
          {"second", plane_to_json(d.second)},
          {"axis", axis_name(d.axis)},
          {"split", d.split}};
}

SceneSpec scene_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "plane") return plane_from_json(j);
  if (type == "sphere") return SphereScene{vec_from_json(j.at("center")), j.at("radius").get<double>()};
  if (type == "dihedral") {
    return DihedralScene{plane_from_json(j.at("first")), plane_from_json(j.at("second")),
                         parse_axis(j.at("axis").get<std::string>()), j.at("split").get<double>()};
  }
  throw FormatError("unknown scene type \"" + type + "\"");
}

json intrinsics_to_json(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"u0", k.u0}, {"v0", k.v0}, {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics intrinsics_from_json(const json& j) {
  CameraIntrinsics k{j.at("fx").get<double>(), j.at("fy").get<double>(), j.at("u0").get<double>(),
                     j.at("v0").get<double>(), j.at("width").get<int>(),  j.at("height").get<int>()};
  k.validate();
  return k;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  const fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string relative_to(const fs::path& p, const fs::path& base) {
  if (base.empty()) return p.generic_string();
  const fs::path rel = p.lexically_relative(base);
  if (rel.empty() || *rel.begin() == "..") return p.generic_string();
  return rel.generic_string();
}

void require_file(const fs::path& p, const std::string& id, const char* field) {
  if (!fs::is_regular_file(p)) {
    throw IoError("manifest entry '" + id + "': " + field + " " + p.string() + " does not exist");
  }
}

}  // namespace

std::string_view to_string(DepthFormat format) {
  switch (format) {
    case DepthFormat::PfmMeters: return "pfm-meters";
    case DepthFormat::Png16Millimeters: return "png16-millimeters";
    case DepthFormat::PfmDisparity: return "pfm-disparity";
  }
  return "unknown";
}

DepthFormat parse_depth_format(std::string_view name) {
  for (auto f : {DepthFormat::PfmMeters, DepthFormat::Png16Millimeters, DepthFormat::PfmDisparity}) {
    if (to_string(f) == name) return f;
  }
  throw FormatError("unknown depth_format \"" + std::string(name) +
                    "\" (expected pfm-meters, png16-millimeters or pfm-disparity)");
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  const fs::path base = path.parent_path();
  DatasetManifest manifest;
  std::set<std::string> ids;
  try {
    if (doc.value("format", std::string(kManifestFormat)) != kManifestFormat) {
      throw FormatError("not a normalis manifest");
    }
    if (doc.value("version", kManifestVersion) != kManifestVersion) throw FormatError("unsupported manifest version");
    for (const auto& e : doc.at("entries")) {
      ManifestEntry entry;
      entry.id = e.at("id").get<std::string>();
      if (entry.id.empty()) throw FormatError("entry with empty id");
      if (!ids.insert(entry.id).second) throw FormatError("duplicate entry id '" + entry.id + "'");
      try {
        entry.depth_path = resolve(base, e.at("depth_path").get<std::string>());
        entry.depth_format = parse_depth_format(e.at("depth_format").get<std::string>());
        entry.intrinsics = intrinsics_from_json(e.at("intrinsics"));
        if (e.contains("gt_normal_path")) entry.gt_normal_path = resolve(base, e["gt_normal_path"].get<std::string>());
        if (e.contains("gt_mask_path")) entry.gt_mask_path = resolve(base, e["gt_mask_path"].get<std::string>());
        if (e.contains("ridge")) {
          const auto& r = e["ridge"];
          entry.ridge = RidgeBand{parse_axis(r.at("axis").get<std::string>()), r.at("split").get<double>(),
                                  r.value("half_width", 2.0)};
        }
        if (e.contains("scene")) entry.scene = scene_from_json(e["scene"]);
      } catch (const json::exception& ex) {
        throw FormatError("entry '" + entry.id + "': " + ex.what());
      } catch (const InvalidInput& ex) {
        throw FormatError("entry '" + entry.id + "': " + ex.what());
      } catch (const FormatError& ex) {
        throw FormatError("entry '" + entry.id + "': " + ex.what());
      }
      require_file(entry.depth_path, entry.id, "depth_path");
      if (entry.gt_normal_path) require_file(*entry.gt_normal_path, entry.id, "gt_normal_path");
      if (entry.gt_mask_path) require_file(*entry.gt_mask_path, entry.id, "gt_mask_path");
      manifest.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& ex) {
    throw FormatError(path.string() + ": " + ex.what());
  } catch (const FormatError& ex) {
    throw FormatError(path.string() + ": " + ex.what());
  }
  return manifest;
}

void save_manifest(const DatasetManifest& manifest, const fs::path& path) {
  const fs::path base = path.parent_path();
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    json j{{"id", e.id},
           {"depth_path", relative_to(e.depth_path, base)},
           {"depth_format", to_string(e.depth_format)},
           {"intrinsics", intrinsics_to_json(e.intrinsics)}};
    if (e.gt_normal_path) j["gt_normal_path"] = relative_to(*e.gt_normal_path, base);
    if (e.gt_mask_path) j["gt_mask_path"] = relative_to(*e.gt_mask_path, base);
    if (e.ridge) j["ridge"] = {{"axis", axis_name(e.ridge->axis)}, {"split", e.ridge->split}, {"half_width", e.ridge->half_width}};
    if (e.scene) j["scene"] = scene_to_json(*e.scene);
    entries.push_back(std::move(j));
  }
  const json doc{{"format", kManifestFormat}, {"version", kManifestVersion}, {"entries", std::move(entries)}};
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing manifest " + path.string());
}

EntryDepth load_entry_depth(const ManifestEntry& entry) {
  EntryDepth out;
  switch (entry.depth_format) {
    case DepthFormat::PfmMeters: out = read_depth_pfm(entry.depth_path); break;
    case DepthFormat::Png16Millimeters: out = read_depth_png16(entry.depth_path); break;
    case DepthFormat::PfmDisparity: out = disparity_as_inverse_depth(read_disparity_pfm(entry.depth_path)); break;
  }
  const ImageSize size = std::visit([](const auto& img) { return img.size(); }, out);
  if (size != entry.intrinsics.size()) {
    throw FormatError("entry '" + entry.id + "': depth image size does not match intrinsics");
  }
  return out;
}

}  // namespace normalis
