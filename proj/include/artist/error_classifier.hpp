#pragma once

#include <chrono>
#include <set>
#include <string>
#include <string_view>

#include "artist/core_types.hpp"

namespace artist {

// Scores an (original, candidate) pair with one probability per registered
// error class.
class ErrorClassifier {
 public:
  virtual ~ErrorClassifier() = default;
  virtual ErrorProbabilities classify(std::string_view original,
                                      std::string_view candidate) const = 0;
  virtual const ErrorRegistry& registry() const = 0;
};

// Transparent proxies for the three guideline errors:
//   meaning_altered       = 1 - recall of the original's content words
//   syntactically_complex = min(1, clause markers / 4)
//   too_long              = 1 if the candidate has more characters
class RuleBasedClassifier final : public ErrorClassifier {
 public:
  static constexpr std::string_view kId = "rule-based-v1";
  static constexpr double kClauseMarkersForMax = 4.0;

  explicit RuleBasedClassifier(ErrorRegistry registry = ErrorRegistry::standard());

  ErrorProbabilities classify(std::string_view original,
                              std::string_view candidate) const override;
  const ErrorRegistry& registry() const override { return registry_; }

  static double meaning_altered(std::string_view original, std::string_view candidate);
  static double syntactic_complexity(std::string_view candidate);
  static double too_long(std::string_view original, std::string_view candidate);

  static std::set<std::string> content_words(std::string_view text);
  static std::size_t clause_markers(std::string_view text);
  static const std::set<std::string>& stopwords();
  static const std::set<std::string>& clause_marker_words();

 private:
  ErrorRegistry registry_;
};

// Forwards to an external scorer: POST {original, candidate} ->
// {probs: [m reals], classifier_id}.
class RemoteClassifier final : public ErrorClassifier {
 public:
  RemoteClassifier(std::string base_url, std::string path,
                   ErrorRegistry registry = ErrorRegistry::standard(),
                   std::chrono::seconds timeout = std::chrono::seconds{30});

  ErrorProbabilities classify(std::string_view original,
                              std::string_view candidate) const override;
  const ErrorRegistry& registry() const override { return registry_; }

 private:
  std::string base_url_;
  std::string path_;
  ErrorRegistry registry_;
  std::chrono::seconds timeout_;
};

}  // namespace artist
