#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "demogen/pose.hpp"
#include "demogen/primitives.hpp"

namespace demogen {

// Poses travel as flat 7-arrays (px,py,pz,qw,qx,qy,qz), primitives as
// {shape, size, pose} objects. Malformed input throws FormatError.
nlohmann::json pose_json(const Pose& p);
Pose json_pose(const nlohmann::json& j);

std::string shape_name(Shape s);
Shape name_shape(const std::string& s);

nlohmann::json primitive_json(const Primitive& prim);
Primitive json_primitive(const nlohmann::json& j);

}  // namespace demogen
