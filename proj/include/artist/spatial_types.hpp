#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace artist {

using Json = nlohmann::json;

// UTC, second resolution.
using Timestamp = std::chrono::sys_seconds;

Timestamp now_utc();
std::string format_timestamp(Timestamp t);
Timestamp parse_timestamp(const std::string& text);

// One object-detection message. Azimuth is egocentric: 0 is straight ahead,
// positive angles are to the user's right.
struct DetectedObject {
  std::string label;
  double azimuth_deg = 0.0;
  double distance_m = 1.0;
  std::optional<double> characteristic_length_m;
  double confidence = 1.0;

  bool operator==(const DetectedObject&) const = default;
};

// Throws MalformedInput when a field is out of range.
void check_detection(const DetectedObject& obj);

// Snapshot of the objects around the user. A context is built unfrozen by the
// detection feed and frozen when a step starts; there are no mutators, so a
// frozen value stays identical for as long as anyone holds it.
class SpatialContext {
 public:
  SpatialContext() = default;
  SpatialContext(std::vector<DetectedObject> objects, Timestamp captured_at,
                 bool frozen = false);

  const std::vector<DetectedObject>& objects() const noexcept { return objects_; }
  Timestamp captured_at() const noexcept { return captured_at_; }
  bool frozen() const noexcept { return frozen_; }

  SpatialContext frozen_copy() const;

  bool operator==(const SpatialContext&) const = default;

 private:
  std::vector<DetectedObject> objects_;
  Timestamp captured_at_{};
  bool frozen_ = false;
};

void to_json(Json& j, const DetectedObject& o);
void from_json(const Json& j, DetectedObject& o);
void to_json(Json& j, const SpatialContext& c);
void from_json(const Json& j, SpatialContext& c);

}  // namespace artist
