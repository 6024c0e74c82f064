#include "artist/error_classifier.hpp"

#include <algorithm>
#include <stdexcept>

#include <httplib.h>

#include "artist/errors.hpp"
#include "artist/text_util.hpp"

namespace artist {

// Function words that carry no task content: articles, conjunctions, pronouns,
// auxiliaries and politeness fillers. Prepositions are kept as content since
// they carry the spatial relations of an instruction.
const std::set<std::string>& RuleBasedClassifier::stopwords() {
  static const std::set<std::string> words = {
      "a",      "an",    "the",   "and",    "or",    "but",   "nor",   "so",    "yet",
      "i",      "me",    "my",    "you",    "your",  "yours", "he",    "him",   "his",
      "she",    "her",   "it",    "its",    "we",    "us",    "our",   "they",  "them",
      "their",  "this",  "that",  "these",  "those", "is",    "are",   "was",   "were",
      "be",     "been",  "being", "am",     "do",    "does",  "did",   "have",  "has",
      "had",    "will",  "would", "shall",  "should", "can",  "could", "may",   "might",
      "must",   "please", "then", "just",   "very",  "really", "also", "there", "here",
      "which",  "who",   "whom",  "whose",  "what",  "if",    "as",    "s",     "let",
  };
  return words;
}

const std::set<std::string>& RuleBasedClassifier::clause_marker_words() {
  static const std::set<std::string> words = {
      "and",   "but",    "or",     "because", "although", "though", "while",
      "when",  "whenever", "which", "that",    "who",      "whom",   "whose",
      "if",    "unless", "until",  "since",   "whereas",  "after",  "before",
      "once",  "so",     "where",  "whether",
  };
  return words;
}

RuleBasedClassifier::RuleBasedClassifier(ErrorRegistry registry) : registry_(std::move(registry)) {}

std::set<std::string> RuleBasedClassifier::content_words(std::string_view text) {
  std::set<std::string> out;
  for (auto& w : text::words(text)) {
    if (!stopwords().contains(w)) out.insert(std::move(w));
  }
  return out;
}

std::size_t RuleBasedClassifier::clause_markers(std::string_view text) {
  std::size_t n = 0;
  for (const auto& w : text::words(text)) {
    if (clause_marker_words().contains(w)) ++n;
  }
  return n;
}

double RuleBasedClassifier::meaning_altered(std::string_view original,
                                            std::string_view candidate) {
  const auto wanted = content_words(original);
  if (wanted.empty()) return 0.0;
  const auto have = content_words(candidate);
  std::size_t kept = 0;
  for (const auto& w : wanted) {
    if (have.contains(w)) ++kept;
  }
  const double recall = static_cast<double>(kept) / static_cast<double>(wanted.size());
  return std::clamp(1.0 - recall, 0.0, 1.0);
}

double RuleBasedClassifier::syntactic_complexity(std::string_view candidate) {
  return std::min(1.0, static_cast<double>(clause_markers(candidate)) / kClauseMarkersForMax);
}

double RuleBasedClassifier::too_long(std::string_view original, std::string_view candidate) {
  return text::char_length(candidate) > text::char_length(original) ? 1.0 : 0.0;
}

ErrorProbabilities RuleBasedClassifier::classify(std::string_view original,
                                                 std::string_view candidate) const {
  if (original.empty()) throw std::invalid_argument("classify: original text is empty");
  ErrorProbabilities out;
  out.classifier_id = std::string(kId);
  out.probs.reserve(registry_.size());
  for (ErrorClass e : registry_.classes()) {
    switch (e) {
      case ErrorClass::MeaningAltered: out.probs.push_back(meaning_altered(original, candidate)); break;
      case ErrorClass::SyntacticallyComplex: out.probs.push_back(syntactic_complexity(candidate)); break;
      case ErrorClass::TooLong: out.probs.push_back(too_long(original, candidate)); break;
    }
  }
  return out;
}

RemoteClassifier::RemoteClassifier(std::string base_url, std::string path, ErrorRegistry registry,
                                   std::chrono::seconds timeout)
    : base_url_(std::move(base_url)),
      path_(std::move(path)),
      registry_(std::move(registry)),
      timeout_(timeout) {}

ErrorProbabilities RemoteClassifier::classify(std::string_view original,
                                              std::string_view candidate) const {
  // httplib clients are not shareable across threads; one per call keeps
  // concurrent in-flight requests independent.
  httplib::Client client(base_url_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  const Json body{{"original", original}, {"candidate", candidate}};
  auto res = client.Post(path_, body.dump(), "application/json");
  if (!res) {
    throw ClassifierUnavailable("classifier request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw ClassifierUnavailable("classifier returned HTTP " + std::to_string(res->status));
  }
  ErrorProbabilities probs;
  try {
    probs = decode<ErrorProbabilities>(parse_json(res->body));
  } catch (const MalformedInput& e) {
    throw ClassifierUnavailable(std::string("classifier sent a malformed reply: ") + e.what());
  }
  if (probs.probs.size() != registry_.size()) {
    throw DimensionMismatch("classifier returned " + std::to_string(probs.probs.size()) +
                            " probabilities, registry has " + std::to_string(registry_.size()));
  }
  return probs;
}

}  // namespace artist
