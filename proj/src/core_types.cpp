#include "artist/core_types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <numeric>

#include "artist/errors.hpp"

namespace artist {

// ---------------------------------------------------------------------------
// Timestamps

Timestamp now_utc() {
  return std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
}

std::string format_timestamp(Timestamp t) {
  const std::time_t secs = t.time_since_epoch().count();
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Timestamp parse_timestamp(const std::string& text) {
  std::tm tm{};
  char z = 0;
  int consumed = 0;
  const int got = std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%c%n", &tm.tm_year,
                              &tm.tm_mon, &tm.tm_mday, &tm.tm_hour, &tm.tm_min, &tm.tm_sec,
                              &z, &consumed);
  if (got != 7 || z != 'Z' || static_cast<std::size_t>(consumed) != text.size()) {
    throw MalformedInput("timestamp must be YYYY-MM-DDTHH:MM:SSZ, got '" + text + "'");
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  return Timestamp{std::chrono::seconds{timegm(&tm)}};
}

// ---------------------------------------------------------------------------
// Enumerations

namespace {

template <typename E, std::size_t N>
E lookup(std::string_view s, const std::array<std::pair<E, std::string_view>, N>& table,
         const char* what) {
  for (const auto& [value, name] : table) {
    if (name == s) return value;
  }
  throw MalformedInput(std::string("unknown ") + what + ": '" + std::string(s) + "'");
}

template <typename E, std::size_t N>
std::string_view name_of(E e, const std::array<std::pair<E, std::string_view>, N>& table) {
  for (const auto& [value, name] : table) {
    if (value == e) return name;
  }
  return "?";
}

constexpr std::array<std::pair<SimplificationTechnique, std::string_view>, 4> kTechniqueNames{{
    {SimplificationTechnique::ContentReduction, "content_reduction"},
    {SimplificationTechnique::SyntacticSimplification, "syntactic_simplification"},
    {SimplificationTechnique::LexicalSimplification, "lexical_simplification"},
    {SimplificationTechnique::ElaborativeSimplification, "elaborative_simplification"},
}};

constexpr std::array<std::pair<SimplificationTechnique, std::string_view>, 4> kTechniqueDisplay{{
    {SimplificationTechnique::ContentReduction, "content reduction"},
    {SimplificationTechnique::SyntacticSimplification, "syntactic simplification"},
    {SimplificationTechnique::LexicalSimplification, "lexical simplification"},
    {SimplificationTechnique::ElaborativeSimplification, "elaborative simplification"},
}};

constexpr std::array<std::pair<SimplificationTechnique, std::string_view>, 4> kTechniqueCodes{{
    {SimplificationTechnique::ContentReduction, "A1"},
    {SimplificationTechnique::SyntacticSimplification, "A2"},
    {SimplificationTechnique::LexicalSimplification, "A3"},
    {SimplificationTechnique::ElaborativeSimplification, "A4"},
}};

constexpr std::array<std::pair<DesignGuideline, std::string_view>, 3> kGuidelineNames{{
    {DesignGuideline::MeaningPreservation, "meaning_preservation"},
    {DesignGuideline::ARConstraints, "ar_constraints"},
    {DesignGuideline::LengthOverGrammar, "length_over_grammar"},
}};

constexpr std::array<std::pair<ErrorClass, std::string_view>, 3> kErrorNames{{
    {ErrorClass::MeaningAltered, "meaning_altered"},
    {ErrorClass::SyntacticallyComplex, "syntactically_complex"},
    {ErrorClass::TooLong, "too_long"},
}};

constexpr std::array<std::pair<StepStatus, std::string_view>, 4> kStatusNames{{
    {StepStatus::Draft, "draft"},
    {StepStatus::Simplified, "simplified"},
    {StepStatus::Reviewed, "reviewed"},
    {StepStatus::Published, "published"},
}};

}  // namespace

std::string_view to_string(SimplificationTechnique t) { return name_of(t, kTechniqueNames); }
std::string_view display_name(SimplificationTechnique t) { return name_of(t, kTechniqueDisplay); }
std::string_view technique_code(SimplificationTechnique t) { return name_of(t, kTechniqueCodes); }
SimplificationTechnique technique_from_string(std::string_view s) {
  return lookup(s, kTechniqueNames, "simplification technique");
}

std::string_view to_string(DesignGuideline g) { return name_of(g, kGuidelineNames); }
DesignGuideline guideline_from_string(std::string_view s) {
  return lookup(s, kGuidelineNames, "design guideline");
}

std::string_view to_string(ErrorClass e) { return name_of(e, kErrorNames); }
ErrorClass error_class_from_string(std::string_view s) {
  return lookup(s, kErrorNames, "error class");
}

std::string_view to_string(StepStatus s) { return name_of(s, kStatusNames); }
StepStatus step_status_from_string(std::string_view s) {
  return lookup(s, kStatusNames, "step status");
}

// ---------------------------------------------------------------------------
// ErrorRegistry

ErrorRegistry::ErrorRegistry()
    : order_{ErrorClass::MeaningAltered, ErrorClass::SyntacticallyComplex, ErrorClass::TooLong} {}

ErrorRegistry::ErrorRegistry(std::vector<ErrorClass> order) : order_(std::move(order)) {
  if (order_.empty()) throw std::invalid_argument("error registry must not be empty");
  for (std::size_t i = 0; i < order_.size(); ++i) {
    for (std::size_t k = i + 1; k < order_.size(); ++k) {
      if (order_[i] == order_[k]) {
        throw std::invalid_argument("duplicate error class in registry: " +
                                    std::string(to_string(order_[i])));
      }
    }
  }
}

const ErrorRegistry& ErrorRegistry::standard() {
  static const ErrorRegistry registry;
  return registry;
}

std::size_t ErrorRegistry::index_of(ErrorClass e) const {
  const auto it = std::find(order_.begin(), order_.end(), e);
  if (it == order_.end()) {
    throw std::out_of_range("error class not registered: " + std::string(to_string(e)));
  }
  return static_cast<std::size_t>(it - order_.begin());
}

std::string ErrorRegistry::hash() const {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](unsigned char c) {
    h ^= c;
    h *= 1099511628211ull;
  };
  for (std::size_t i = 0; i < order_.size(); ++i) {
    if (i) mix(',');
    for (char c : to_string(order_[i])) mix(static_cast<unsigned char>(c));
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Manual documents

ManualDocument ManualDocument::make(std::string manual_id, std::string title,
                                    std::vector<ManualStep> steps, std::set<std::string> tags,
                                    int version, Timestamp created_at, Timestamp updated_at) {
  ManualDocument doc{std::move(manual_id), std::move(title), std::move(steps), std::move(tags),
                     version, created_at, updated_at};
  const auto violations = validate_manual(doc);
  if (!violations.empty()) {
    std::string msg = "invalid manual:";
    for (const auto& v : violations) msg += " [" + v.field + ": " + v.rule + "]";
    throw InvalidManual(msg);
  }
  return doc;
}

std::set<std::string> glossary_of(const ManualDocument& doc) {
  std::set<std::string> terms;
  for (const auto& tag : doc.tags) {
    if (tag.size() > kGlossaryTagPrefix.size() && tag.starts_with(kGlossaryTagPrefix)) {
      std::string term = tag.substr(kGlossaryTagPrefix.size());
      std::transform(term.begin(), term.end(), term.begin(),
                     [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
      terms.insert(std::move(term));
    }
  }
  return terms;
}

std::vector<ManualViolation> validate_manual(const ManualDocument& doc) {
  std::vector<ManualViolation> out;
  if (doc.steps.empty()) {
    out.push_back({"steps", "steps must be nonempty"});
  }
  bool contiguous = true;
  for (std::size_t i = 0; i < doc.steps.size(); ++i) {
    if (doc.steps[i].step_id != static_cast<int>(i) + 1) contiguous = false;
  }
  if (!contiguous) {
    out.push_back({"steps.step_id", "step_ids must be 1..len(steps), contiguous and in order"});
  }
  for (const auto& step : doc.steps) {
    const std::string where = "steps[" + std::to_string(step.step_id) + "]";
    if (step.original_text.empty()) {
      out.push_back({where + ".original_text", "original_text must be nonempty"});
    }
    if ((step.status == StepStatus::Reviewed || step.status == StepStatus::Published) &&
        !step.simplified_text) {
      out.push_back({where + ".simplified_text",
                     "status reviewed/published requires simplified_text"});
    }
    if (step.spatial_snapshot && !step.spatial_snapshot->frozen()) {
      out.push_back({where + ".spatial_snapshot", "spatial_snapshot must be frozen"});
    }
  }
  if (doc.version < 1) {
    out.push_back({"version", "version must be >= 1"});
  }
  if (doc.updated_at < doc.created_at) {
    out.push_back({"updated_at", "updated_at must not precede created_at"});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spatial value types

void check_detection(const DetectedObject& obj) {
  if (obj.label.empty()) throw MalformedInput("detection label must be nonempty");
  if (!std::isfinite(obj.azimuth_deg) || obj.azimuth_deg < -180.0 || obj.azimuth_deg > 180.0) {
    throw MalformedInput("azimuth_deg must lie in [-180, 180]");
  }
  if (!std::isfinite(obj.distance_m) || obj.distance_m <= 0.0) {
    throw MalformedInput("distance_m must be positive");
  }
  if (obj.characteristic_length_m &&
      (!std::isfinite(*obj.characteristic_length_m) || *obj.characteristic_length_m <= 0.0)) {
    throw MalformedInput("characteristic_length_m must be positive");
  }
  if (!(obj.confidence >= 0.0 && obj.confidence <= 1.0)) {
    throw MalformedInput("confidence must lie in [0, 1]");
  }
}

SpatialContext::SpatialContext(std::vector<DetectedObject> objects, Timestamp captured_at,
                               bool frozen)
    : objects_(std::move(objects)), captured_at_(captured_at), frozen_(frozen) {
  for (const auto& o : objects_) check_detection(o);
}

SpatialContext SpatialContext::frozen_copy() const {
  SpatialContext copy = *this;
  copy.frozen_ = true;
  return copy;
}

// ---------------------------------------------------------------------------
// JSON

namespace {

template <typename T>
std::optional<T> optional_field(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

double probability_field(const Json& j, const char* key, bool allow_zero) {
  const double v = j.at(key).get<double>();
  if (!(v <= 1.0) || (allow_zero ? v < 0.0 : v <= 0.0)) {
    throw MalformedInput(std::string(key) + " out of range: " + std::to_string(v));
  }
  return v;
}

}  // namespace

void to_json(Json& j, const DetectedObject& o) {
  j = Json{{"label", o.label},
           {"azimuth_deg", o.azimuth_deg},
           {"distance_m", o.distance_m},
           {"confidence", o.confidence}};
  if (o.characteristic_length_m) j["characteristic_length_m"] = *o.characteristic_length_m;
}

void from_json(const Json& j, DetectedObject& o) {
  o.label = j.at("label").get<std::string>();
  o.azimuth_deg = j.at("azimuth_deg").get<double>();
  o.distance_m = j.at("distance_m").get<double>();
  o.characteristic_length_m = optional_field<double>(j, "characteristic_length_m");
  o.confidence = j.at("confidence").get<double>();
  check_detection(o);
}

void to_json(Json& j, const SpatialContext& c) {
  j = Json{{"objects", c.objects()},
           {"captured_at", format_timestamp(c.captured_at())},
           {"frozen", c.frozen()}};
}

void from_json(const Json& j, SpatialContext& c) {
  c = SpatialContext(j.at("objects").get<std::vector<DetectedObject>>(),
                     parse_timestamp(j.at("captured_at").get<std::string>()),
                     j.at("frozen").get<bool>());
}

void to_json(Json& j, SimplificationTechnique t) { j = std::string(to_string(t)); }
void from_json(const Json& j, SimplificationTechnique& t) {
  t = technique_from_string(j.get<std::string>());
}
void to_json(Json& j, DesignGuideline g) { j = std::string(to_string(g)); }
void from_json(const Json& j, DesignGuideline& g) {
  g = guideline_from_string(j.get<std::string>());
}
void to_json(Json& j, ErrorClass e) { j = std::string(to_string(e)); }
void from_json(const Json& j, ErrorClass& e) { e = error_class_from_string(j.get<std::string>()); }
void to_json(Json& j, StepStatus s) { j = std::string(to_string(s)); }
void from_json(const Json& j, StepStatus& s) { s = step_status_from_string(j.get<std::string>()); }

void to_json(Json& j, const ErrorProbabilities& e) {
  j = Json{{"probs", e.probs}, {"classifier_id", e.classifier_id}};
}

void from_json(const Json& j, ErrorProbabilities& e) {
  e.probs = j.at("probs").get<std::vector<double>>();
  e.classifier_id = j.at("classifier_id").get<std::string>();
  for (double v : e.probs) {
    if (!(v >= 0.0 && v <= 1.0)) throw MalformedInput("error probability outside [0, 1]");
  }
}

void to_json(Json& j, const ManualStep& s) {
  j = Json{{"step_id", s.step_id}, {"original_text", s.original_text}, {"status", s.status}};
  if (s.simplified_text) j["simplified_text"] = *s.simplified_text;
  if (s.spatial_snapshot) j["spatial_snapshot"] = *s.spatial_snapshot;
}

void from_json(const Json& j, ManualStep& s) {
  s.step_id = j.at("step_id").get<int>();
  s.original_text = j.at("original_text").get<std::string>();
  s.simplified_text = optional_field<std::string>(j, "simplified_text");
  s.status = j.contains("status") ? j.at("status").get<StepStatus>() : StepStatus::Draft;
  s.spatial_snapshot = optional_field<SpatialContext>(j, "spatial_snapshot");
}

void to_json(Json& j, const ManualDocument& d) {
  j = Json{{"manual_id", d.manual_id},
           {"title", d.title},
           {"steps", d.steps},
           {"tags", d.tags},
           {"version", d.version},
           {"created_at", format_timestamp(d.created_at)},
           {"updated_at", format_timestamp(d.updated_at)}};
}

void from_json(const Json& j, ManualDocument& d) {
  d.manual_id = j.value("manual_id", std::string{});
  d.title = j.at("title").get<std::string>();
  d.steps = j.at("steps").get<std::vector<ManualStep>>();
  d.tags = j.contains("tags") ? j.at("tags").get<std::set<std::string>>() : std::set<std::string>{};
  d.version = j.value("version", 1);
  d.created_at = j.contains("created_at")
                     ? parse_timestamp(j.at("created_at").get<std::string>())
                     : Timestamp{};
  d.updated_at = j.contains("updated_at")
                     ? parse_timestamp(j.at("updated_at").get<std::string>())
                     : d.created_at;
}

void to_json(Json& j, const ManualViolation& v) {
  j = Json{{"field", v.field}, {"rule", v.rule}};
}

void to_json(Json& j, const PlanAction& a) {
  j = Json{{"technique", a.technique}, {"description", a.description}};
}

void from_json(const Json& j, PlanAction& a) {
  a.technique = j.at("technique").get<SimplificationTechnique>();
  a.description = j.at("description").get<std::string>();
}

void to_json(Json& j, const SimplificationPlan& p) {
  j = Json{{"thoughts", p.thoughts}, {"actions", p.actions}};
}

void from_json(const Json& j, SimplificationPlan& p) {
  p.thoughts = j.at("thoughts").get<std::string>();
  p.actions = j.at("actions").get<std::vector<PlanAction>>();
}

void to_json(Json& j, const CandidateSimplification& c) {
  j = Json{{"text", c.text},
           {"raw_probability", c.raw_probability},
           {"candidate_index", c.candidate_index}};
  if (c.error_probs) j["error_probs"] = *c.error_probs;
  if (c.calibrated_probability) j["calibrated_probability"] = *c.calibrated_probability;
}

void from_json(const Json& j, CandidateSimplification& c) {
  c.text = j.at("text").get<std::string>();
  c.raw_probability = probability_field(j, "raw_probability", false);
  c.error_probs = optional_field<ErrorProbabilities>(j, "error_probs");
  c.calibrated_probability = std::nullopt;
  if (j.contains("calibrated_probability") && !j.at("calibrated_probability").is_null()) {
    c.calibrated_probability = probability_field(j, "calibrated_probability", true);
  }
  c.candidate_index = j.at("candidate_index").get<int>();
  if (c.candidate_index < 0) throw MalformedInput("candidate_index must be >= 0");
}

void to_json(Json& j, const CandidateSet& s) {
  j = Json{{"original_text", s.original_text}, {"candidates", s.candidates}, {"n", s.n}};
}

void from_json(const Json& j, CandidateSet& s) {
  s.original_text = j.at("original_text").get<std::string>();
  s.candidates = j.at("candidates").get<std::vector<CandidateSimplification>>();
  s.n = j.at("n").get<int>();
  if (static_cast<int>(s.candidates.size()) != s.n) {
    throw MalformedInput("candidate count does not match n");
  }
  std::set<int> seen;
  for (const auto& c : s.candidates) {
    if (!seen.insert(c.candidate_index).second) {
      throw MalformedInput("duplicate candidate_index " + std::to_string(c.candidate_index));
    }
  }
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput(e.what());
  }
}

}  // namespace artist
