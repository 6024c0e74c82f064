#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "artist/calibration_kernels.hpp"
#include "artist/core_types.hpp"
#include "artist/error_classifier.hpp"

namespace artist::calib {

// Diagonal affine calibration. A candidate with features f = [p; p^e] scores
// z = sum_j w_diag[j] * f[j] + b; calibrated probabilities are the softmax of
// z across the candidate set.
struct CalibrationModel {
  std::vector<double> w_diag;  // length 1 + m
  double b = 0.0;
  std::string error_registry_hash;
  int trained_on = 0;
  int version = 0;

  bool operator==(const CalibrationModel&) const = default;

  std::size_t dimension() const noexcept { return w_diag.size(); }
};

// Untrained starting point: raw probability helps, every error hurts.
CalibrationModel initial_model(const ErrorRegistry& registry = ErrorRegistry::standard());

void to_json(Json& j, const CalibrationModel& m);
void from_json(const Json& j, CalibrationModel& m);

// Decodes and checks the model against the active registry; a model trained
// under another registry raises RegistryMismatch.
CalibrationModel load_model(const Json& j,
                            const ErrorRegistry& registry = ErrorRegistry::standard());
CalibrationModel load_model_file(const std::filesystem::path& path,
                                 const ErrorRegistry& registry = ErrorRegistry::standard());
void save_model_file(const CalibrationModel& model, const std::filesystem::path& path);

enum class GoldSource { ExpertReview, Seeded };

struct GoldSample {
  std::string original_text;
  std::string simplified_text;
  int verdict = 1;  // 1 = correctly simplified, 0 = erroneous
  std::optional<ErrorClass> error_label;
  GoldSource source = GoldSource::Seeded;
  // p of the candidate when the sample came from a generated candidate.
  std::optional<double> raw_probability;

  bool operator==(const GoldSample&) const = default;
};

// Throws MalformedInput when the verdict/error_label invariant is broken.
void check_gold(const GoldSample& s);

struct GoldDataset {
  std::vector<GoldSample> samples;

  std::size_t k() const noexcept { return samples.size(); }
};

void to_json(Json& j, const GoldSample& s);
void from_json(const Json& j, GoldSample& s);

std::string to_jsonl(const GoldDataset& d);
GoldDataset gold_from_jsonl(std::string_view text);
GoldDataset load_gold_file(const std::filesystem::path& path);

// [p, p^e_1, ..., p^e_m]; throws MissingErrorProbs when p^e is absent.
std::vector<double> feature_vector(const CandidateSimplification& candidate);

// Fills calibrated_probability for every candidate.
CandidateSet calibrate(CandidateSet set, const CalibrationModel& model);

// Candidate with the largest q, lowest candidate_index on ties.
CandidateSimplification select(const CandidateSet& set);

// As select(), restricted to candidates whose flag is set. Empty when none is.
std::optional<CandidateSimplification> select_eligible(const CandidateSet& set,
                                                       const std::vector<bool>& eligible);

struct TrainConfig {
  explicit TrainConfig(std::uint64_t seed_) : seed(seed_) {}

  double learning_rate = 0.1;
  int epochs = 500;
  std::uint64_t seed;
  // Uniform jitter added to the initial weights, drawn from `seed`.
  double init_noise = 0.0;
  bool parallel = true;
  // p used for gold samples that carry no raw probability.
  double default_raw_probability = 1.0;
};

struct TrainResult {
  CalibrationModel model;
  bool degenerate = false;  // only one verdict class present
  std::vector<double> loss_history;  // loss before epoch 1, then after every epoch
};

// Features for every gold sample, p^e from the classifier (computed in
// parallel; classifiers are reentrant).
FeatureMatrix featurize(const GoldDataset& dataset, const ErrorClassifier& classifier,
                        double default_raw_probability = 1.0);

TrainResult train_features(const FeatureMatrix& features, std::span<const double> labels,
                           const TrainConfig& config,
                           const ErrorRegistry& registry = ErrorRegistry::standard());

TrainResult train(const GoldDataset& dataset, const ErrorClassifier& classifier,
                  const TrainConfig& config);

// Fraction of samples whose sign of z agrees with the verdict.
double verdict_accuracy(const CalibrationModel& model, const FeatureMatrix& features,
                        std::span<const double> labels);

}  // namespace artist::calib
