#include "artist/validators.hpp"

#include <cstdio>

#include "artist/errors.hpp"
#include "artist/text_util.hpp"

namespace artist::validate {

void to_json(Json& j, const DisplayProfile& p) {
  j = Json{{"chars_per_line", p.chars_per_line}};
  if (p.max_lines) j["max_lines"] = *p.max_lines;
}

void from_json(const Json& j, DisplayProfile& p) {
  p.chars_per_line = j.value("chars_per_line", 40);
  if (p.chars_per_line <= 0) throw MalformedInput("chars_per_line must be positive");
  p.max_lines.reset();
  if (j.contains("max_lines") && !j.at("max_lines").is_null()) {
    p.max_lines = j.at("max_lines").get<int>();
    if (*p.max_lines <= 0) throw MalformedInput("max_lines must be positive");
  }
}

bool ValidationReport::passed() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

void to_json(Json& j, const CheckResult& c) {
  j = Json{{"rule_id", c.rule_id}, {"passed", c.passed}, {"detail", c.detail}};
}

void to_json(Json& j, const ValidationReport& r) {
  j = Json{{"pair_id", r.pair_id}, {"checks", r.checks}, {"passed", r.passed()}};
}

int display_lines(std::string_view text, const DisplayProfile& profile) {
  if (profile.chars_per_line <= 0) throw std::invalid_argument("chars_per_line must be positive");
  const auto len = text::char_length(text);
  const auto width = static_cast<std::size_t>(profile.chars_per_line);
  return static_cast<int>((len + width - 1) / width);
}

CheckResult check_line_count(std::string_view original, std::string_view candidate,
                             const DisplayProfile& profile) {
  const int before = display_lines(original, profile);
  const int after = display_lines(candidate, profile);
  CheckResult r{std::string(kRuleLineCount), after <= before,
                std::to_string(before) + " -> " + std::to_string(after) + " lines at " +
                    std::to_string(profile.chars_per_line) + " chars/line"};
  if (profile.max_lines && after > *profile.max_lines) {
    r.detail += " (exceeds display max of " + std::to_string(*profile.max_lines) + ")";
  }
  return r;
}

CheckResult check_task_terms(std::string_view original, std::string_view candidate,
                             const std::set<std::string>& glossary) {
  std::string missing;
  for (const auto& term : glossary) {
    if (!text::find_whole_word(original, term)) continue;
    if (!text::find_whole_word(candidate, term)) {
      if (!missing.empty()) missing += ", ";
      missing += term;
    }
  }
  if (missing.empty()) return {std::string(kRuleTaskTerms), true, "all task terms kept"};
  return {std::string(kRuleTaskTerms), false, "missing task terms: " + missing};
}

CheckResult check_length_reduction(std::string_view original, std::string_view candidate) {
  const auto before = text::char_length(original);
  const auto after = text::char_length(candidate);
  return {std::string(kRuleLengthReduction), after <= before,
          std::to_string(before) + " -> " + std::to_string(after) + " chars"};
}

CheckResult check_meaning_proxy(std::string_view original, std::string_view candidate,
                                const ErrorClassifier& classifier, double threshold) {
  double altered = 1.0;
  if (!candidate.empty() && !original.empty()) {
    const auto probs = classifier.classify(original, candidate);
    altered = probs.probs.at(classifier.registry().index_of(ErrorClass::MeaningAltered));
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "meaning_altered %.3f (threshold %.3f)", altered, threshold);
  return {std::string(kRuleMeaningProxy), altered < threshold, buf};
}

ValidationReport validate(std::string_view original, std::string_view candidate,
                          const DisplayProfile& profile, const std::set<std::string>& glossary,
                          const ErrorClassifier& classifier, std::string pair_id,
                          double meaning_threshold) {
  ValidationReport report;
  report.pair_id = std::move(pair_id);
  report.checks.push_back(check_line_count(original, candidate, profile));
  report.checks.push_back(check_task_terms(original, candidate, glossary));
  report.checks.push_back(check_length_reduction(original, candidate));
  report.checks.push_back(check_meaning_proxy(original, candidate, classifier, meaning_threshold));
  return report;
}

}  // namespace artist::validate
