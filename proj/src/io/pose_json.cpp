#include <json.hpp>

#include <cmath>
#include <string>

#include "patchwarp/error.hpp"
#include "patchwarp/io.hpp"

namespace patchwarp::io {

using nlohmann::json;

PoseKeypoints parse_pose_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, std::string("keypoint JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::Parse, "keypoint JSON must be an object");
  if (doc.contains("format") && doc["format"] != "coco18") {
    throw Error(ErrorCode::Parse, "unsupported keypoint format " + doc["format"].dump());
  }
  if (!doc.contains("keypoints") || !doc["keypoints"].is_object()) {
    throw Error(ErrorCode::Parse, "keypoint JSON lacks a \"keypoints\" object");
  }

  PoseKeypoints pose;
  for (const auto& [name, value] : doc["keypoints"].items()) {
    const auto joint = joint_from_string(name);
    if (!joint) continue;
    if (!value.is_array() || value.size() != 3 || !value[0].is_number() || !value[1].is_number() ||
        !value[2].is_number()) {
      throw Error(ErrorCode::Parse, "joint " + name + " must be [x, y, confidence]");
    }
    const double x = value[0].get<double>();
    const double y = value[1].get<double>();
    const double c = value[2].get<double>();
    if (!std::isfinite(x) || !std::isfinite(y) || !(c >= 0.0 && c <= 1.0)) {
      throw Error(ErrorCode::Parse, "joint " + name + " has non-finite position or confidence outside [0,1]");
    }
    pose.set(*joint, Point2{x, y}, c);
  }
  return pose;
}

PoseKeypoints read_pose_json(const std::filesystem::path& path) {
  const Bytes raw = read_file(path);
  try {
    return parse_pose_json(std::string_view(reinterpret_cast<const char*>(raw.data()), raw.size()));
  } catch (const Error& e) {
    throw Error(e.code(), path.string() + ": " + e.detail());
  }
}

std::string pose_to_json(const PoseKeypoints& pose) {
  json kp = json::object();
  for (int i = 0; i < kJointCount; ++i) {
    const auto j = static_cast<Joint>(i);
    if (const auto& k = pose.get(j)) {
      kp[std::string(to_string(j))] = {k->position.x, k->position.y, k->confidence};
    }
  }
  json doc = {{"format", "coco18"}, {"keypoints", kp}};
  return doc.dump(2) + "\n";
}

}  // namespace patchwarp::io
