#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "artist/core_types.hpp"
#include "artist/llm_backend.hpp"

namespace artist::prompt {

// A worked few-shot example: input, reasoning, technique plan, result.
struct Exemplar {
  std::string input_text;
  std::optional<std::string> spatial_context_summary;
  std::string thoughts;
  SimplificationPlan plan;  // only the actions are rendered; thoughts come from above
  std::string output_text;

  bool operator==(const Exemplar&) const = default;
};

struct PromptTemplate {
  std::string system_preamble;
  std::vector<Exemplar> exemplars;
  std::uint64_t exemplar_order_seed = 0;

  bool operator==(const PromptTemplate&) const = default;
};

struct SamplingConfig {
  double plan_temperature = 0.0;
  double candidate_temperature = 0.7;
  int max_output_length = 256;
};

// Separator placed between the preamble, each exemplar and the query.
inline constexpr std::string_view kBlockSeparator = "\n\n---\n\n";

std::string default_preamble();

// Throws MalformedInput if the exemplar breaks its invariants.
void check_exemplar(const Exemplar& ex);

// Exemplar order for a template: a Fisher-Yates shuffle driven by
// mt19937_64(exemplar_order_seed).
std::vector<std::size_t> exemplar_order(const PromptTemplate& tmpl);

// "THOUGHTS: ...\nPLAN:\n1. <technique>: <description>\n..." ; an empty plan
// renders as "no changes needed".
std::string render_plan(const SimplificationPlan& plan);
std::string render_exemplar(const Exemplar& ex);

std::string build_plan_prompt(std::string_view original, const std::optional<SpatialContext>& spatial,
                              const PromptTemplate& tmpl);
std::string build_execution_prompt(std::string_view original,
                                   const std::optional<SpatialContext>& spatial,
                                   const SimplificationPlan& plan, const PromptTemplate& tmpl);

// Throws MalformedPlan when no PLAN section exists or a plan line cannot be
// read, UnknownTechnique when a line names something other than A1-A4.
SimplificationPlan parse_plan(std::string_view raw_llm_text);

// Candidate text from an execution completion.
std::string parse_output(std::string_view raw_llm_text);

// exp(mean token log-probability), or 1/n when the backend gave none.
double raw_probability(const LlmCompletion& completion, int n);

CandidateSet generate_candidates(std::string_view original, const SimplificationPlan& plan,
                                 const std::optional<SpatialContext>& spatial,
                                 const PromptTemplate& tmpl, LlmBackend& backend, int n,
                                 const SamplingConfig& sampling = {});

// Plan call, then execution call with the parsed plan embedded.
std::pair<SimplificationPlan, CandidateSet> simplify_plan_then_execute(
    std::string_view original, const std::optional<SpatialContext>& spatial,
    const PromptTemplate& tmpl, LlmBackend& backend, int n, const SamplingConfig& sampling = {});

// Plain-text template file with "=== preamble ===", "=== seed ===" and
// "=== exemplar ===" block markers.
std::string serialize_template(const PromptTemplate& tmpl);
PromptTemplate parse_template(std::string_view text);
PromptTemplate load_template(const std::filesystem::path& path);
void save_template(const PromptTemplate& tmpl, const std::filesystem::path& path);

}  // namespace artist::prompt
