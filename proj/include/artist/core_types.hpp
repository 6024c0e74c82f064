#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "artist/spatial_types.hpp"

namespace artist {

// A1..A4.
enum class SimplificationTechnique {
  ContentReduction,
  SyntacticSimplification,
  LexicalSimplification,
  ElaborativeSimplification,
};

inline constexpr std::array<SimplificationTechnique, 4> kAllTechniques = {
    SimplificationTechnique::ContentReduction,
    SimplificationTechnique::SyntacticSimplification,
    SimplificationTechnique::LexicalSimplification,
    SimplificationTechnique::ElaborativeSimplification,
};

// Wire name, e.g. "syntactic_simplification".
std::string_view to_string(SimplificationTechnique t);
// Prompt name, e.g. "syntactic simplification".
std::string_view display_name(SimplificationTechnique t);
// "A1".."A4".
std::string_view technique_code(SimplificationTechnique t);
SimplificationTechnique technique_from_string(std::string_view s);

// DG1..DG3.
enum class DesignGuideline { MeaningPreservation, ARConstraints, LengthOverGrammar };

inline constexpr std::array<DesignGuideline, 3> kAllGuidelines = {
    DesignGuideline::MeaningPreservation,
    DesignGuideline::ARConstraints,
    DesignGuideline::LengthOverGrammar,
};

std::string_view to_string(DesignGuideline g);
DesignGuideline guideline_from_string(std::string_view s);

enum class ErrorClass { MeaningAltered, SyntacticallyComplex, TooLong };

std::string_view to_string(ErrorClass e);
ErrorClass error_class_from_string(std::string_view s);

// Ordered list of error classes. The position of a class is its index into
// every error-probability vector and into the calibration weights after p.
class ErrorRegistry {
 public:
  ErrorRegistry();  // MeaningAltered, SyntacticallyComplex, TooLong
  explicit ErrorRegistry(std::vector<ErrorClass> order);

  static const ErrorRegistry& standard();

  std::size_t size() const noexcept { return order_.size(); }
  std::size_t index_of(ErrorClass e) const;
  ErrorClass at(std::size_t i) const { return order_.at(i); }
  std::span<const ErrorClass> classes() const noexcept { return order_; }

  // Stable fingerprint of the ordering (FNV-1a 64 over the wire names).
  std::string hash() const;

  bool operator==(const ErrorRegistry&) const = default;

 private:
  std::vector<ErrorClass> order_;
};

struct ErrorProbabilities {
  std::vector<double> probs;  // indexed by ErrorRegistry position
  std::string classifier_id;

  bool operator==(const ErrorProbabilities&) const = default;
};

enum class StepStatus { Draft, Simplified, Reviewed, Published };

std::string_view to_string(StepStatus s);
StepStatus step_status_from_string(std::string_view s);

struct ManualStep {
  int step_id = 1;
  std::string original_text;
  std::optional<std::string> simplified_text;
  StepStatus status = StepStatus::Draft;
  std::optional<SpatialContext> spatial_snapshot;

  bool operator==(const ManualStep&) const = default;
};

struct ManualDocument {
  std::string manual_id;
  std::string title;
  std::vector<ManualStep> steps;
  std::set<std::string> tags;
  int version = 1;
  Timestamp created_at{};
  Timestamp updated_at{};

  bool operator==(const ManualDocument&) const = default;

  // Checked construction: throws InvalidManual unless validate_manual()
  // reports no violations.
  static ManualDocument make(std::string manual_id, std::string title,
                             std::vector<ManualStep> steps, std::set<std::string> tags,
                             int version, Timestamp created_at, Timestamp updated_at);
};

// Tags of the form "term:<word>" name protected task terms for the manual.
inline constexpr std::string_view kGlossaryTagPrefix = "term:";
std::set<std::string> glossary_of(const ManualDocument& doc);

struct ManualViolation {
  std::string field;
  std::string rule;

  bool operator==(const ManualViolation&) const = default;
};

std::vector<ManualViolation> validate_manual(const ManualDocument& doc);

struct PlanAction {
  SimplificationTechnique technique = SimplificationTechnique::ContentReduction;
  std::string description;

  bool operator==(const PlanAction&) const = default;
};

struct SimplificationPlan {
  std::string thoughts;
  std::vector<PlanAction> actions;  // may be empty: input already conforms

  bool operator==(const SimplificationPlan&) const = default;
};

struct CandidateSimplification {
  std::string text;
  double raw_probability = 1.0;  // p, in (0, 1]
  std::optional<ErrorProbabilities> error_probs;
  std::optional<double> calibrated_probability;  // q, in [0, 1]
  int candidate_index = 0;

  bool operator==(const CandidateSimplification&) const = default;
};

inline constexpr int kDefaultCandidateCount = 5;

struct CandidateSet {
  std::string original_text;
  std::vector<CandidateSimplification> candidates;
  int n = kDefaultCandidateCount;

  bool operator==(const CandidateSet&) const = default;
};

// Canonical JSON encoding. Decoders reject out-of-range values and unknown
// enumeration names with MalformedInput.
void to_json(Json& j, SimplificationTechnique t);
void from_json(const Json& j, SimplificationTechnique& t);
void to_json(Json& j, DesignGuideline g);
void from_json(const Json& j, DesignGuideline& g);
void to_json(Json& j, ErrorClass e);
void from_json(const Json& j, ErrorClass& e);
void to_json(Json& j, StepStatus s);
void from_json(const Json& j, StepStatus& s);
void to_json(Json& j, const ErrorProbabilities& e);
void from_json(const Json& j, ErrorProbabilities& e);
void to_json(Json& j, const ManualStep& s);
void from_json(const Json& j, ManualStep& s);
void to_json(Json& j, const ManualDocument& d);
void from_json(const Json& j, ManualDocument& d);
void to_json(Json& j, const ManualViolation& v);
void to_json(Json& j, const PlanAction& a);
void from_json(const Json& j, PlanAction& a);
void to_json(Json& j, const SimplificationPlan& p);
void from_json(const Json& j, SimplificationPlan& p);
void to_json(Json& j, const CandidateSimplification& c);
void from_json(const Json& j, CandidateSimplification& c);
void to_json(Json& j, const CandidateSet& s);
void from_json(const Json& j, CandidateSet& s);

// Decodes with nlohmann's type errors rethrown as MalformedInput.
template <typename T>
T decode(const Json& j);

Json parse_json(std::string_view text);

}  // namespace artist

#include "artist/detail/decode.hpp"
