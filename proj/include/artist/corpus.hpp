#pragma once

#include <string>
#include <vector>

#include "artist/calibration.hpp"
#include "artist/core_types.hpp"
#include "artist/llm_backend.hpp"
#include "artist/prompt_engine.hpp"

// Bundled example data: the coffee and meeting-room step pairs, the dumbbell
// worked example, seed manuals, mock backend fixtures and seeded gold samples.
namespace artist::corpus {

struct StepPair {
  std::string task;  // "coffee" or "meeting"
  int step = 0;
  std::string original;
  std::string simplified;
};

// 9 coffee steps followed by 7 meeting-room steps.
const std::vector<StepPair>& step_pairs();

const std::string& dumbbell_original();
const std::string& dumbbell_simplified();
prompt::Exemplar dumbbell_exemplar();

// One exemplar per step pair, then the dumbbell exemplar.
std::vector<prompt::Exemplar> exemplars();

// Preamble + dumbbell + meeting-room exemplars.
prompt::PromptTemplate default_template();

ManualDocument coffee_manual();
ManualDocument meeting_manual();

// Scripted responses for simplifying `doc` step by step with n candidates:
// for each step one plan completion followed by n candidate completions.
std::vector<LlmCompletion> fixture_for_manual(const ManualDocument& doc, int n = 5);

// 64 samples: each pair as a correct simplification plus one meaning-altering,
// one over-long and one syntactically complex rewrite.
calib::GoldDataset seed_gold();

// Drops filler words ("the", "please", "carefully", ...) from a text.
std::string drop_filler_words(const std::string& text);

}  // namespace artist::corpus
