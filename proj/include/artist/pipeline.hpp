#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "artist/calibration.hpp"
#include "artist/core_types.hpp"
#include "artist/error_classifier.hpp"
#include "artist/llm_backend.hpp"
#include "artist/prompt_engine.hpp"
#include "artist/validators.hpp"

// plan -> candidates -> classify -> calibrate -> validate -> select -> spatial
// elaboration, for one step or a whole manual.
namespace artist::pipeline {

struct Settings {
  validate::DisplayProfile profile;
  double meaning_threshold = validate::kDefaultMeaningThreshold;
  int n = kDefaultCandidateCount;
  prompt::SamplingConfig sampling;
};

struct Components {
  const prompt::PromptTemplate& tmpl;
  LlmBackend& backend;
  const ErrorClassifier& classifier;
  const calib::CalibrationModel& model;
};

struct StepOutcome {
  int step_id = 0;
  SimplificationPlan plan;
  CandidateSet candidates;  // with p^e and q filled
  std::vector<bool> eligible;
  std::vector<validate::ValidationReport> reports;
  std::optional<int> chosen_index;  // empty when falling back to the original
  std::string chosen_text;          // after spatial elaboration

  bool fallback_to_original() const { return !chosen_index.has_value(); }
};

struct ManualOutcome {
  std::string manual_id;
  int model_version = 0;
  std::vector<StepOutcome> steps;
};

void to_json(Json& j, const StepOutcome& s);
void to_json(Json& j, const ManualOutcome& m);

// Applies location phrases and measure substitutions for a frozen context.
std::string elaborate(std::string_view text, const std::optional<SpatialContext>& context);

StepOutcome simplify_step(const ManualStep& step, const std::set<std::string>& glossary,
                          const std::optional<SpatialContext>& context, const Components& parts,
                          const Settings& settings);

// Each step uses its own frozen snapshot when it has one, `context` otherwise.
ManualOutcome simplify_manual(const ManualDocument& doc, const std::optional<SpatialContext>& context,
                              const Components& parts, const Settings& settings);

// Copy of `doc` with the chosen candidates (before elaboration) written back as
// simplified texts, statuses set to Simplified and contexts frozen.
ManualDocument apply(ManualDocument doc, const ManualOutcome& outcome,
                     const std::optional<SpatialContext>& context);

}  // namespace artist::pipeline
