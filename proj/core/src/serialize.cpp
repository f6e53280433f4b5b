#include "demogen/serialize.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include "demogen/errors.hpp"

namespace demogen {

using nlohmann::json;

json pose_json(const Pose& p) {
  auto f = p.flat();
  return json(std::vector<double>(f.begin(), f.end()));
}

Pose json_pose(const json& j) {
  auto v = j.get<std::vector<double>>();
  if (v.size() != 7) throw FormatError("pose needs 7 numbers");
  std::array<double, 7> a;
  std::copy(v.begin(), v.end(), a.begin());
  return Pose::from_flat(a);
}

std::string shape_name(Shape s) {
  switch (s) {
    case Shape::Box: return "box";
    case Shape::Cylinder: return "cylinder";
    case Shape::Cone: return "cone";
    case Shape::Sphere: return "sphere";
  }
  return "box";
}

Shape name_shape(const std::string& s) {
  if (s == "box") return Shape::Box;
  if (s == "cylinder") return Shape::Cylinder;
  if (s == "cone") return Shape::Cone;
  if (s == "sphere") return Shape::Sphere;
  throw FormatError("unknown shape: " + s);
}

json primitive_json(const Primitive& prim) {
  json j;
  j["shape"] = shape_name(prim.shape);
  j["size"] = {prim.size.x(), prim.size.y(), prim.size.z()};
  j["pose"] = pose_json(prim.pose);
  return j;
}

Primitive json_primitive(const json& j) {
  Primitive p;
  p.shape = name_shape(j.at("shape").get<std::string>());
  auto sz = j.at("size").get<std::vector<double>>();
  if (sz.size() != 3) throw FormatError("primitive size needs 3 numbers");
  p.size = Vec3{sz[0], sz[1], sz[2]};
  p.pose = json_pose(j.at("pose"));
  return p;
}

}  // namespace demogen
