#pragma once

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "artist/core_types.hpp"
#include "artist/error_classifier.hpp"

namespace artist::validate {

struct DisplayProfile {
  int chars_per_line = 40;
  std::optional<int> max_lines;

  bool operator==(const DisplayProfile&) const = default;
};

void to_json(Json& j, const DisplayProfile& p);
void from_json(const Json& j, DisplayProfile& p);

struct CheckResult {
  std::string rule_id;
  bool passed = true;
  std::string detail;

  bool operator==(const CheckResult&) const = default;
};

struct ValidationReport {
  std::string pair_id;
  std::vector<CheckResult> checks;

  bool passed() const;
  bool operator==(const ValidationReport&) const = default;
};

void to_json(Json& j, const CheckResult& c);
void to_json(Json& j, const ValidationReport& r);

inline constexpr std::string_view kRuleLineCount = "line_count";
inline constexpr std::string_view kRuleTaskTerms = "task_terms";
inline constexpr std::string_view kRuleLengthReduction = "length_reduction";
inline constexpr std::string_view kRuleMeaningProxy = "meaning_proxy";

// Every report carries exactly these rules, in this order.
inline constexpr std::array<std::string_view, 4> kRuleRegistry = {
    kRuleLineCount, kRuleTaskTerms, kRuleLengthReduction, kRuleMeaningProxy};

inline constexpr double kDefaultMeaningThreshold = 0.5;

// Hard-wrapped line count: ceil(chars / chars_per_line); empty text has 0.
int display_lines(std::string_view text, const DisplayProfile& profile);

CheckResult check_line_count(std::string_view original, std::string_view candidate,
                             const DisplayProfile& profile);
// `glossary` holds lowercase protected terms.
CheckResult check_task_terms(std::string_view original, std::string_view candidate,
                             const std::set<std::string>& glossary);
CheckResult check_length_reduction(std::string_view original, std::string_view candidate);
CheckResult check_meaning_proxy(std::string_view original, std::string_view candidate,
                                const ErrorClassifier& classifier,
                                double threshold = kDefaultMeaningThreshold);

ValidationReport validate(std::string_view original, std::string_view candidate,
                          const DisplayProfile& profile, const std::set<std::string>& glossary,
                          const ErrorClassifier& classifier, std::string pair_id = {},
                          double meaning_threshold = kDefaultMeaningThreshold);

}  // namespace artist::validate
