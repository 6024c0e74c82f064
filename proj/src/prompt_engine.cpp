#include "artist/prompt_engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <regex>
#include <sstream>

#include "artist/errors.hpp"
#include "artist/spatial.hpp"
#include "artist/text_util.hpp"

namespace artist::prompt {

namespace {

constexpr std::string_view kInput = "INPUT:";
constexpr std::string_view kSpatial = "SPATIAL:";
constexpr std::string_view kThoughts = "THOUGHTS:";
constexpr std::string_view kPlan = "PLAN:";
constexpr std::string_view kOutput = "OUTPUT:";
constexpr std::string_view kNoChanges = "no changes needed";

constexpr std::string_view kPreambleMarker = "=== preamble ===";
constexpr std::string_view kSeedMarker = "=== seed ===";
constexpr std::string_view kExemplarMarker = "=== exemplar ===";

bool starts_with_label(std::string_view line, std::string_view label) {
  return text::trim(line).starts_with(label);
}

std::string_view after_label(std::string_view line, std::string_view label) {
  line = text::trim(line);
  return text::trim(line.substr(label.size()));
}

std::string spatial_line(const SpatialContext& context) {
  const auto summary = spatial::summarize(context);
  return std::string(kSpatial) + " " + (summary.empty() ? std::string("none") : summary);
}

std::string query_head(std::string_view original, const std::optional<SpatialContext>& spatial) {
  std::string out = std::string(kInput) + " " + std::string(original);
  if (spatial) out += "\n" + spatial_line(*spatial);
  return out;
}

std::string with_exemplars(const PromptTemplate& tmpl, const std::string& query) {
  if (tmpl.exemplars.empty()) {
    throw std::invalid_argument("prompt template needs at least one exemplar");
  }
  std::string out = tmpl.system_preamble;
  for (std::size_t idx : exemplar_order(tmpl)) {
    out += kBlockSeparator;
    out += render_exemplar(tmpl.exemplars[idx]);
  }
  out += kBlockSeparator;
  out += query;
  return out;
}

std::string normalize_technique_name(std::string_view raw) {
  std::string name = text::to_lower(text::trim(raw));
  std::replace(name.begin(), name.end(), '_', ' ');
  // "syntactic simplification (a2)" -> "syntactic simplification"
  if (const auto paren = name.find('('); paren != std::string::npos && name.back() == ')') {
    name = std::string(text::trim(std::string_view(name).substr(0, paren)));
  }
  return name;
}

SimplificationTechnique technique_from_plan_name(std::string_view raw) {
  const std::string name = normalize_technique_name(raw);
  for (auto t : kAllTechniques) {
    if (name == display_name(t) || name == text::to_lower(technique_code(t))) return t;
  }
  throw UnknownTechnique(std::string(text::trim(raw)));
}

// "1. name: description", "2) name: description" or "- name: description".
PlanAction parse_action_line(std::string_view line) {
  std::string_view rest = line;
  if (!rest.empty() && std::isdigit(static_cast<unsigned char>(rest.front()))) {
    std::size_t i = 0;
    while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
    if (i >= rest.size() || (rest[i] != '.' && rest[i] != ')')) {
      throw MalformedPlan("plan line is not numbered: '" + std::string(line) + "'");
    }
    rest.remove_prefix(i + 1);
  } else if (!rest.empty() && (rest.front() == '-' || rest.front() == '*')) {
    rest.remove_prefix(1);
  } else {
    throw MalformedPlan("plan line is not numbered: '" + std::string(line) + "'");
  }
  const auto colon = rest.find(':');
  if (colon == std::string_view::npos) {
    throw MalformedPlan("plan line lacks '<technique>: <description>': '" + std::string(line) +
                        "'");
  }
  PlanAction action;
  action.technique = technique_from_plan_name(rest.substr(0, colon));
  action.description = std::string(text::trim(rest.substr(colon + 1)));
  return action;
}

bool names_technique(std::string_view raw) {
  const std::string name = normalize_technique_name(raw);
  for (auto t : kAllTechniques) {
    if (name == display_name(t) || name == text::to_lower(technique_code(t))) return true;
  }
  return false;
}

// "1. a: x 2. b: y" written on one line -> "1. a: x", "2. b: y".
std::vector<std::string_view> split_inline_items(std::string_view line) {
  static const std::regex item(R"(\s(\d+[.)])\s+([^:]{1,60}):)");
  std::vector<std::string_view> out;
  std::size_t start = 0;
  const std::string copy(line);
  for (auto it = std::sregex_iterator(copy.begin(), copy.end(), item); it != std::sregex_iterator();
       ++it) {
    if (!names_technique((*it)[2].str())) continue;
    const auto cut = static_cast<std::size_t>(it->position(1));
    out.push_back(text::trim(line.substr(start, cut - start)));
    start = cut;
  }
  out.push_back(text::trim(line.substr(start)));
  return out;
}

std::string join_lines(const std::vector<std::string_view>& lines, std::size_t from,
                       std::size_t to) {
  std::string out;
  for (std::size_t i = from; i < to; ++i) {
    if (i > from) out += '\n';
    out += lines[i];
  }
  return out;
}

}  // namespace

std::string default_preamble() {
  return "You simplify step-by-step task instructions that are displayed as text in an "
         "augmented-reality headset.\n"
         "Guidelines:\n"
         "DG1 meaning preservation: keep every action, object, quantity and task term of the "
         "original; never change what the user has to do.\n"
         "DG2 AR constraints: the display is small and the user is busy with a physical task; "
         "keep the text short and its structure simple.\n"
         "DG3 length over grammar: a shorter text is preferred over a grammatically complete "
         "one.\n"
         "Techniques:\n"
         "A1 content reduction: drop non-essential words and clauses; prepositions and pronouns "
         "may be cut.\n"
         "A2 syntactic simplification: split or rephrase complex structures, only if the text "
         "does not take more display lines.\n"
         "A3 lexical simplification: use simpler words, never change task terms, never add "
         "display lines.\n"
         "A4 elaborative simplification: add only where detected objects are or a detected "
         "object of comparable size; no background explanations.\n"
         "Write THOUGHTS about the input, then a numbered PLAN with one '<technique name>: "
         "<description>' per line, then the OUTPUT obtained by applying the plan in order.";
}

void check_exemplar(const Exemplar& ex) {
  if (ex.input_text.empty()) throw MalformedInput("exemplar input_text must be nonempty");
  if (ex.output_text.empty()) throw MalformedInput("exemplar output_text must be nonempty");
}

std::vector<std::size_t> exemplar_order(const PromptTemplate& tmpl) {
  std::vector<std::size_t> order(tmpl.exemplars.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(tmpl.exemplar_order_seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  return order;
}

std::string render_plan(const SimplificationPlan& plan) {
  std::string out = std::string(kThoughts) + " " + plan.thoughts + "\n" + std::string(kPlan);
  if (plan.actions.empty()) {
    out += "\n";
    out += kNoChanges;
    return out;
  }
  for (std::size_t i = 0; i < plan.actions.size(); ++i) {
    out += "\n" + std::to_string(i + 1) + ". " + std::string(display_name(plan.actions[i].technique)) +
           ": " + plan.actions[i].description;
  }
  return out;
}

std::string render_exemplar(const Exemplar& ex) {
  std::string out = std::string(kInput) + " " + ex.input_text;
  if (ex.spatial_context_summary) {
    out += "\n" + std::string(kSpatial) + " " + *ex.spatial_context_summary;
  }
  out += "\n" + render_plan(SimplificationPlan{ex.thoughts, ex.plan.actions});
  out += "\n" + std::string(kOutput) + " " + ex.output_text;
  return out;
}

std::string build_plan_prompt(std::string_view original, const std::optional<SpatialContext>& spatial,
                              const PromptTemplate& tmpl) {
  if (original.empty()) throw std::invalid_argument("original text must be nonempty");
  return with_exemplars(tmpl, query_head(original, spatial) + "\n" + std::string(kThoughts));
}

std::string build_execution_prompt(std::string_view original,
                                   const std::optional<SpatialContext>& spatial,
                                   const SimplificationPlan& plan, const PromptTemplate& tmpl) {
  if (original.empty()) throw std::invalid_argument("original text must be nonempty");
  return with_exemplars(tmpl, query_head(original, spatial) + "\n" + render_plan(plan) + "\n" +
                                  std::string(kOutput));
}

SimplificationPlan parse_plan(std::string_view raw_llm_text) {
  const auto lines = text::split_lines(raw_llm_text);
  std::optional<std::size_t> plan_line;
  std::optional<std::size_t> thoughts_line;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!thoughts_line && !plan_line && starts_with_label(lines[i], kThoughts)) thoughts_line = i;
    if (starts_with_label(lines[i], kPlan)) {
      plan_line = i;
      break;
    }
  }
  if (!plan_line) throw MalformedPlan("no PLAN section in model output");

  SimplificationPlan plan;
  {
    std::string thoughts;
    if (thoughts_line) {
      thoughts = std::string(after_label(lines[*thoughts_line], kThoughts));
      const auto rest = join_lines(lines, *thoughts_line + 1, *plan_line);
      if (!text::trim(rest).empty()) thoughts += "\n" + rest;
    } else {
      thoughts = join_lines(lines, 0, *plan_line);
    }
    plan.thoughts = std::string(text::trim(thoughts));
  }

  std::vector<std::string_view> body;
  if (const auto inline_part = after_label(lines[*plan_line], kPlan); !inline_part.empty()) {
    body.push_back(inline_part);
  }
  for (std::size_t i = *plan_line + 1; i < lines.size(); ++i) {
    if (starts_with_label(lines[i], kOutput) || starts_with_label(lines[i], kInput) ||
        text::trim(lines[i]) == "---") {
      break;
    }
    if (const auto t = text::trim(lines[i]); !t.empty()) body.push_back(t);
  }

  if (body.empty()) return plan;
  if (body.size() == 1) {
    std::string only = text::to_lower(body[0]);
    while (!only.empty() && (only.back() == '.' || only.back() == '!')) only.pop_back();
    if (only == kNoChanges || only == "none") return plan;
  }
  for (const auto line : body) {
    for (const auto item : split_inline_items(line)) plan.actions.push_back(parse_action_line(item));
  }
  return plan;
}

std::string parse_output(std::string_view raw_llm_text) {
  std::string_view t = text::trim(raw_llm_text);
  if (const auto label = t.find(kOutput); label != std::string_view::npos) {
    t = t.substr(label + kOutput.size());
  }
  for (std::string_view stop : {std::string_view("\n---"), std::string_view("\nINPUT:")}) {
    if (const auto cut = t.find(stop); cut != std::string_view::npos) t = t.substr(0, cut);
  }
  return std::string(text::trim(t));
}

double raw_probability(const LlmCompletion& completion, int n) {
  if (!completion.token_logprobs || completion.token_logprobs->empty()) {
    return 1.0 / static_cast<double>(n);
  }
  const auto& lp = *completion.token_logprobs;
  const double mean = std::accumulate(lp.begin(), lp.end(), 0.0) / static_cast<double>(lp.size());
  return std::clamp(std::exp(mean), std::numeric_limits<double>::min(), 1.0);
}

CandidateSet generate_candidates(std::string_view original, const SimplificationPlan& plan,
                                 const std::optional<SpatialContext>& spatial,
                                 const PromptTemplate& tmpl, LlmBackend& backend, int n,
                                 const SamplingConfig& sampling) {
  if (n < 1) throw std::invalid_argument("candidate count n must be >= 1");
  LlmRequest request;
  request.prompt = build_execution_prompt(original, spatial, plan, tmpl);
  request.sample_count = n;
  request.temperature = sampling.candidate_temperature;
  request.max_output_length = sampling.max_output_length;

  const auto response = backend.complete(request);
  if (response.size() != static_cast<std::size_t>(n)) {
    throw BackendReturnedWrongCount(static_cast<std::size_t>(n), response.size());
  }

  CandidateSet set;
  set.original_text = std::string(original);
  set.n = n;
  set.candidates.reserve(response.size());
  for (std::size_t i = 0; i < response.size(); ++i) {
    CandidateSimplification c;
    c.text = parse_output(response[i].text);
    c.raw_probability = raw_probability(response[i], n);
    c.candidate_index = static_cast<int>(i);
    set.candidates.push_back(std::move(c));
  }
  return set;
}

std::pair<SimplificationPlan, CandidateSet> simplify_plan_then_execute(
    std::string_view original, const std::optional<SpatialContext>& spatial,
    const PromptTemplate& tmpl, LlmBackend& backend, int n, const SamplingConfig& sampling) {
  LlmRequest request;
  request.prompt = build_plan_prompt(original, spatial, tmpl);
  request.sample_count = 1;
  request.temperature = sampling.plan_temperature;
  request.max_output_length = sampling.max_output_length;
  const auto response = backend.complete(request);
  if (response.size() != 1) throw BackendReturnedWrongCount(1, response.size());

  auto plan = parse_plan(response.front().text);
  auto candidates = generate_candidates(original, plan, spatial, tmpl, backend, n, sampling);
  return {std::move(plan), std::move(candidates)};
}

// ---------------------------------------------------------------------------
// Template files

std::string serialize_template(const PromptTemplate& tmpl) {
  std::string out;
  out += kPreambleMarker;
  out += "\n" + tmpl.system_preamble + "\n";
  out += kSeedMarker;
  out += "\n" + std::to_string(tmpl.exemplar_order_seed) + "\n";
  for (const auto& ex : tmpl.exemplars) {
    out += kExemplarMarker;
    out += "\n" + render_exemplar(ex) + "\n";
  }
  return out;
}

namespace {

Exemplar parse_exemplar_block(const std::vector<std::string_view>& lines) {
  std::optional<std::size_t> input, spatial_at, output;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (!input && starts_with_label(lines[i], kInput)) input = i;
    if (!spatial_at && starts_with_label(lines[i], kSpatial)) spatial_at = i;
    if (starts_with_label(lines[i], kOutput)) output = i;
  }
  if (!input || !output) throw MalformedInput("exemplar block needs INPUT: and OUTPUT: lines");

  Exemplar ex;
  ex.input_text = std::string(after_label(lines[*input], kInput));
  if (spatial_at) ex.spatial_context_summary = std::string(after_label(lines[*spatial_at], kSpatial));
  const std::size_t plan_from = spatial_at ? *spatial_at + 1 : *input + 1;
  const auto plan = parse_plan(join_lines(lines, plan_from, *output));
  ex.thoughts = plan.thoughts;
  ex.plan = plan;
  ex.output_text = std::string(after_label(lines[*output], kOutput));
  check_exemplar(ex);
  return ex;
}

}  // namespace

PromptTemplate parse_template(std::string_view text) {
  const auto lines = text::split_lines(text);
  enum class Section { None, Preamble, Seed, Exemplar } section = Section::None;
  PromptTemplate tmpl;
  std::vector<std::string_view> preamble;
  std::vector<std::string_view> block;
  bool seed_seen = false;

  auto flush_block = [&] {
    if (section == Section::Exemplar) tmpl.exemplars.push_back(parse_exemplar_block(block));
    block.clear();
  };

  for (const auto line : lines) {
    const auto t = text::trim(line);
    if (t == kPreambleMarker || t == kSeedMarker || t == kExemplarMarker) {
      flush_block();
      section = t == kPreambleMarker ? Section::Preamble
                : t == kSeedMarker   ? Section::Seed
                                     : Section::Exemplar;
      continue;
    }
    switch (section) {
      case Section::None:
        if (!t.empty()) throw MalformedInput("template text before the first block marker");
        break;
      case Section::Preamble: preamble.push_back(line); break;
      case Section::Seed:
        if (!t.empty()) {
          try {
            tmpl.exemplar_order_seed = std::stoull(std::string(t));
          } catch (const std::exception&) {
            throw MalformedInput("template seed is not an unsigned integer");
          }
          seed_seen = true;
        }
        break;
      case Section::Exemplar: block.push_back(line); break;
    }
  }
  flush_block();

  while (!preamble.empty() && text::trim(preamble.back()).empty()) preamble.pop_back();
  tmpl.system_preamble = join_lines(preamble, 0, preamble.size());
  if (!seed_seen) throw MalformedInput("template has no seed block");
  if (tmpl.exemplars.empty()) throw MalformedInput("template has no exemplars");
  return tmpl;
}

PromptTemplate load_template(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("template file not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_template(buf.str());
}

void save_template(const PromptTemplate& tmpl, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  out << serialize_template(tmpl);
  if (!out) throw Error("cannot write template file " + path.string());
}

}  // namespace artist::prompt
