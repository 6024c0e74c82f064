#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "artist/spatial_types.hpp"

namespace artist::spatial {

enum class SpatialRelation { OnYourLeft, OnYourRight, InFrontOfYou };

inline constexpr double kFrontHalfAngleDeg = 20.0;
inline constexpr double kMinConfidence = 0.5;
inline constexpr double kMeasureTolerance = 0.25;

std::string_view to_string(SpatialRelation r);  // "on_your_left", ...
std::string_view phrase(SpatialRelation r);     // "on your left", ...

// Exactly +-20 degrees counts as in front.
SpatialRelation relation_of(const DetectedObject& obj);

struct Mention {
  std::string label;
  std::size_t begin = 0;
  std::size_t end = 0;

  bool operator==(const Mention&) const = default;
};

// First whole-word, case-insensitive occurrence of each detected label
// (confidence >= 0.5), ordered by position. Throws std::logic_error if the
// context is not frozen.
std::vector<Mention> first_mentions(std::string_view text, const SpatialContext& context);

// Inserts " <relation phrase>" after the first mention of every detected label.
// Mentions already followed by a relation phrase are left alone, so the
// operation is idempotent.
std::string elaborate_locations(std::string_view text, const SpatialContext& context);

struct Measure {
  std::size_t begin = 0;
  std::size_t end = 0;
  double meters = 0.0;
};

// "<number> <unit>" occurrences; numbers are digits (optionally decimal) or
// the words one..twelve; units are inch/in, cm, mm, ft, m and their plurals.
std::vector<Measure> find_measures(std::string_view text);

// Appends ", or the length of a <label>" at the end of the clause holding a
// measure when a detected object's characteristic length is within 25% of it.
// The object whose length ratio is nearest 1 wins.
std::string substitute_measures(std::string_view text, const SpatialContext& context);

// Relation-only rendering of a context for prompts, e.g.
// "coffee mug: on your right; screwdriver: in front of you, about 18 cm long".
std::string summarize(const SpatialContext& context);

// Holds the most recent unfrozen context. Publishers replace it wholesale
// (last write wins); snapshot() hands out a frozen copy.
class DetectionFeed {
 public:
  DetectionFeed();

  void publish(std::vector<DetectedObject> objects);
  void publish(SpatialContext context);
  SpatialContext latest() const;
  SpatialContext snapshot() const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const SpatialContext> latest_;
};

}  // namespace artist::spatial
