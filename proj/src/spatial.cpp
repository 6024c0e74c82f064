#include "artist/spatial.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>

#include "artist/text_util.hpp"

namespace artist::spatial {

namespace {

void require_frozen(const SpatialContext& context) {
  if (!context.frozen()) {
    throw std::logic_error("spatial rewriting requires a frozen context");
  }
}

// One representative object per lowercase label: highest confidence, first on
// ties. Low-confidence detections are dropped.
std::vector<const DetectedObject*> usable_objects(const SpatialContext& context) {
  std::vector<const DetectedObject*> out;
  std::map<std::string, std::size_t> by_label;
  for (const auto& obj : context.objects()) {
    if (obj.confidence < kMinConfidence) continue;
    const std::string key = text::to_lower(obj.label);
    const auto it = by_label.find(key);
    if (it == by_label.end()) {
      by_label.emplace(key, out.size());
      out.push_back(&obj);
    } else if (obj.confidence > out[it->second]->confidence) {
      out[it->second] = &obj;
    }
  }
  return out;
}

bool followed_by_relation(std::string_view text, std::size_t end) {
  std::size_t i = end;
  while (i < text.size() && (text[i] == ' ' || text[i] == '(')) ++i;
  if (i == end) return false;
  for (auto r : {SpatialRelation::OnYourLeft, SpatialRelation::OnYourRight,
                 SpatialRelation::InFrontOfYou}) {
    const auto p = phrase(r);
    if (text.size() - i >= p.size() && text::iequals(text.substr(i, p.size()), p)) return true;
  }
  return false;
}

struct NumberWord {
  std::string_view word;
  int value;
};

constexpr std::array<NumberWord, 12> kNumberWords{{{"one", 1},
                                                   {"two", 2},
                                                   {"three", 3},
                                                   {"four", 4},
                                                   {"five", 5},
                                                   {"six", 6},
                                                   {"seven", 7},
                                                   {"eight", 8},
                                                   {"nine", 9},
                                                   {"ten", 10},
                                                   {"eleven", 11},
                                                   {"twelve", 12}}};

struct Unit {
  std::string_view word;
  double meters;
};

constexpr std::array<Unit, 15> kUnits{{{"inch", 0.0254},
                                       {"inches", 0.0254},
                                       {"in", 0.0254},
                                       {"cm", 0.01},
                                       {"mm", 0.001},
                                       {"ft", 0.3048},
                                       {"foot", 0.3048},
                                       {"feet", 0.3048},
                                       {"m", 1.0},
                                       {"meter", 1.0},
                                       {"meters", 1.0},
                                       {"metre", 1.0},
                                       {"metres", 1.0},
                                       {"centimeters", 0.01},
                                       {"millimeters", 0.001}}};

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isdigit(c) != 0;
  });
}

std::optional<double> unit_scale(std::string_view word) {
  const std::string lower = text::to_lower(word);
  for (const auto& u : kUnits) {
    if (u.word == lower) return u.meters;
  }
  return std::nullopt;
}

bool only_spaces(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c == ' '; });
}

// Insertion point for a measure annotation: just before the punctuation that
// closes the clause, or the end of the (right-trimmed) text.
std::size_t clause_end(std::string_view text, std::size_t from) {
  for (std::size_t i = from; i < text.size(); ++i) {
    const char c = text[i];
    if (c == ',' || c == '.' || c == ';' || c == ':' || c == '!' || c == '?') {
      const bool boundary = i + 1 == text.size() || text[i + 1] == ' ' || text[i + 1] == '\n' ||
                            text[i + 1] == '\t';
      if (boundary) return i;
    }
  }
  std::size_t end = text.size();
  while (end > from && (text[end - 1] == ' ' || text[end - 1] == '\n')) --end;
  return end;
}

constexpr std::string_view kReferencePrefix = ", or the length of a ";

}  // namespace

std::string_view to_string(SpatialRelation r) {
  switch (r) {
    case SpatialRelation::OnYourLeft: return "on_your_left";
    case SpatialRelation::OnYourRight: return "on_your_right";
    case SpatialRelation::InFrontOfYou: return "in_front_of_you";
  }
  return "?";
}

std::string_view phrase(SpatialRelation r) {
  switch (r) {
    case SpatialRelation::OnYourLeft: return "on your left";
    case SpatialRelation::OnYourRight: return "on your right";
    case SpatialRelation::InFrontOfYou: return "in front of you";
  }
  return "?";
}

SpatialRelation relation_of(const DetectedObject& obj) {
  if (obj.azimuth_deg < -kFrontHalfAngleDeg) return SpatialRelation::OnYourLeft;
  if (obj.azimuth_deg > kFrontHalfAngleDeg) return SpatialRelation::OnYourRight;
  return SpatialRelation::InFrontOfYou;
}

std::vector<Mention> first_mentions(std::string_view text, const SpatialContext& context) {
  require_frozen(context);
  std::vector<Mention> out;
  for (const DetectedObject* obj : usable_objects(context)) {
    if (const auto pos = text::find_whole_word(text, obj->label)) {
      out.push_back({obj->label, *pos, *pos + obj->label.size()});
    }
  }
  std::sort(out.begin(), out.end(), [](const Mention& a, const Mention& b) {
    if (a.begin != b.begin) return a.begin < b.begin;
    return a.end > b.end;
  });
  return out;
}

std::string elaborate_locations(std::string_view text, const SpatialContext& context) {
  const auto mentions = first_mentions(text, context);
  const auto objects = usable_objects(context);

  std::vector<std::pair<std::size_t, std::string_view>> inserts;
  std::size_t covered_until = 0;
  for (const auto& m : mentions) {
    // A shorter label inside a longer one ("mug" in "coffee mug") is skipped.
    if (m.begin < covered_until) continue;
    covered_until = m.end;
    if (followed_by_relation(text, m.end)) continue;
    const auto obj = std::find_if(objects.begin(), objects.end(), [&](const DetectedObject* o) {
      return text::iequals(o->label, m.label);
    });
    inserts.emplace_back(m.end, phrase(relation_of(**obj)));
  }

  std::string out(text);
  for (auto it = inserts.rbegin(); it != inserts.rend(); ++it) {
    out.insert(it->first, " " + std::string(it->second));
  }
  return out;
}

std::vector<Measure> find_measures(std::string_view text) {
  std::vector<Measure> out;
  const auto spans = text::word_spans(text);
  for (std::size_t i = 0; i < spans.size(); ++i) {
    const std::string_view word = text.substr(spans[i].begin, spans[i].end - spans[i].begin);
    std::optional<double> value;
    std::size_t unit_idx = i + 1;

    if (all_digits(word)) {
      // "1.5": digits '.' digits
      if (i + 1 < spans.size() && spans[i].end < text.size() && text[spans[i].end] == '.' &&
          spans[i + 1].begin == spans[i].end + 1) {
        const auto frac = text.substr(spans[i + 1].begin, spans[i + 1].end - spans[i + 1].begin);
        if (all_digits(frac)) {
          value = std::stod(std::string(text.substr(spans[i].begin,
                                                    spans[i + 1].end - spans[i].begin)));
          unit_idx = i + 2;
        }
      }
      if (!value) value = std::stod(std::string(word));
    } else {
      const std::string lower = text::to_lower(word);
      for (const auto& nw : kNumberWords) {
        if (nw.word == lower) value = nw.value;
      }
    }
    if (!value || unit_idx >= spans.size()) continue;

    const std::size_t number_end = spans[unit_idx - 1].end;
    const auto gap = text.substr(number_end, spans[unit_idx].begin - number_end);
    if (!only_spaces(gap)) continue;
    const auto unit_word =
        text.substr(spans[unit_idx].begin, spans[unit_idx].end - spans[unit_idx].begin);
    const auto scale = unit_scale(unit_word);
    if (!scale) continue;
    out.push_back({spans[i].begin, spans[unit_idx].end, *value * *scale});
    i = unit_idx;
  }
  return out;
}

std::string substitute_measures(std::string_view text, const SpatialContext& context) {
  require_frozen(context);
  const auto objects = usable_objects(context);

  std::vector<std::pair<std::size_t, std::string>> inserts;
  for (const auto& measure : find_measures(text)) {
    if (measure.meters <= 0.0) continue;
    const DetectedObject* best = nullptr;
    double best_dev = 0.0;
    for (const DetectedObject* obj : objects) {
      if (!obj->characteristic_length_m) continue;
      const double dev = std::abs(*obj->characteristic_length_m / measure.meters - 1.0);
      if (dev <= kMeasureTolerance && (!best || dev < best_dev)) {
        best = obj;
        best_dev = dev;
      }
    }
    if (!best) continue;
    const std::size_t at = clause_end(text, measure.end);
    if (text.substr(at).starts_with(kReferencePrefix)) continue;  // already annotated
    if (!inserts.empty() && inserts.back().first == at) continue;
    inserts.emplace_back(at, std::string(kReferencePrefix) + best->label);
  }

  std::string out(text);
  for (auto it = inserts.rbegin(); it != inserts.rend(); ++it) {
    out.insert(it->first, it->second);
  }
  return out;
}

std::string summarize(const SpatialContext& context) {
  std::string out;
  for (const DetectedObject* obj : usable_objects(context)) {
    if (!out.empty()) out += "; ";
    out += obj->label;
    out += ": ";
    out += phrase(relation_of(*obj));
    if (obj->characteristic_length_m) {
      char buf[48];
      std::snprintf(buf, sizeof buf, ", about %.0f cm long", *obj->characteristic_length_m * 100.0);
      out += buf;
    }
  }
  return out;
}

DetectionFeed::DetectionFeed()
    : latest_(std::make_shared<const SpatialContext>(std::vector<DetectedObject>{}, now_utc())) {}

void DetectionFeed::publish(std::vector<DetectedObject> objects) {
  publish(SpatialContext(std::move(objects), now_utc()));
}

void DetectionFeed::publish(SpatialContext context) {
  auto next = std::make_shared<const SpatialContext>(
      SpatialContext(context.objects(), context.captured_at(), false));
  std::lock_guard lock(mutex_);
  latest_ = std::move(next);
}

SpatialContext DetectionFeed::latest() const {
  std::shared_ptr<const SpatialContext> current;
  {
    std::lock_guard lock(mutex_);
    current = latest_;
  }
  return *current;
}

SpatialContext DetectionFeed::snapshot() const { return latest().frozen_copy(); }

}  // namespace artist::spatial
