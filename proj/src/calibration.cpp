#include "artist/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "artist/errors.hpp"
#include "artist/text_util.hpp"

namespace artist::calib {

CalibrationModel initial_model(const ErrorRegistry& registry) {
  CalibrationModel m;
  m.w_diag.assign(1 + registry.size(), -1.0);
  m.w_diag[0] = 1.0;
  m.b = 0.0;
  m.error_registry_hash = registry.hash();
  return m;
}

void to_json(Json& j, const CalibrationModel& m) {
  j = Json{{"w_diag", m.w_diag},
           {"b", m.b},
           {"error_registry_hash", m.error_registry_hash},
           {"trained_on", m.trained_on},
           {"version", m.version}};
}

void from_json(const Json& j, CalibrationModel& m) {
  m.w_diag = j.at("w_diag").get<std::vector<double>>();
  m.b = j.at("b").get<double>();
  m.error_registry_hash = j.at("error_registry_hash").get<std::string>();
  m.trained_on = j.at("trained_on").get<int>();
  m.version = j.at("version").get<int>();
}

CalibrationModel load_model(const Json& j, const ErrorRegistry& registry) {
  auto m = decode<CalibrationModel>(j);
  if (m.error_registry_hash != registry.hash()) {
    throw RegistryMismatch("model was trained under error registry " + m.error_registry_hash +
                           ", active registry is " + registry.hash());
  }
  if (m.w_diag.size() != 1 + registry.size()) {
    throw DimensionMismatch("model has " + std::to_string(m.w_diag.size()) +
                            " weights, expected " + std::to_string(1 + registry.size()));
  }
  if (!std::all_of(m.w_diag.begin(), m.w_diag.end(), [](double w) { return std::isfinite(w); }) ||
      !std::isfinite(m.b)) {
    throw MalformedInput("model parameters must be finite");
  }
  return m;
}

CalibrationModel load_model_file(const std::filesystem::path& path,
                                 const ErrorRegistry& registry) {
  std::ifstream in(path);
  if (!in) throw NotFound("model file not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return load_model(parse_json(buf.str()), registry);
}

void save_model_file(const CalibrationModel& model, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << Json(model).dump(2) << '\n';
    if (!out) throw Error("cannot write model file " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

// ---------------------------------------------------------------------------
// Gold samples

void check_gold(const GoldSample& s) {
  if (s.verdict != 0 && s.verdict != 1) throw MalformedInput("verdict must be 0 or 1");
  if (s.verdict == 0 && !s.error_label) {
    throw MalformedInput("an erroneous sample (verdict 0) needs an error_label");
  }
  if (s.verdict == 1 && s.error_label) {
    throw MalformedInput("a correct sample (verdict 1) must not carry an error_label");
  }
  if (s.raw_probability && !(*s.raw_probability > 0.0 && *s.raw_probability <= 1.0)) {
    throw MalformedInput("raw_probability must lie in (0, 1]");
  }
}

void to_json(Json& j, const GoldSample& s) {
  j = Json{{"original_text", s.original_text},
           {"simplified_text", s.simplified_text},
           {"verdict", s.verdict},
           {"source", s.source == GoldSource::ExpertReview ? "expert_review" : "seeded"}};
  if (s.error_label) j["error_label"] = *s.error_label;
  if (s.raw_probability) j["raw_probability"] = *s.raw_probability;
}

void from_json(const Json& j, GoldSample& s) {
  s.original_text = j.at("original_text").get<std::string>();
  s.simplified_text = j.at("simplified_text").get<std::string>();
  s.verdict = j.at("verdict").get<int>();
  s.error_label.reset();
  if (j.contains("error_label") && !j.at("error_label").is_null()) {
    s.error_label = j.at("error_label").get<ErrorClass>();
  }
  const auto source = j.at("source").get<std::string>();
  if (source == "expert_review") {
    s.source = GoldSource::ExpertReview;
  } else if (source == "seeded") {
    s.source = GoldSource::Seeded;
  } else {
    throw MalformedInput("unknown gold sample source: '" + source + "'");
  }
  s.raw_probability.reset();
  if (j.contains("raw_probability") && !j.at("raw_probability").is_null()) {
    s.raw_probability = j.at("raw_probability").get<double>();
  }
  check_gold(s);
}

std::string to_jsonl(const GoldDataset& d) {
  std::string out;
  for (const auto& s : d.samples) {
    out += Json(s).dump();
    out += '\n';
  }
  return out;
}

GoldDataset gold_from_jsonl(std::string_view text) {
  GoldDataset d;
  for (const auto line : text::split_lines(text)) {
    if (text::trim(line).empty()) continue;
    d.samples.push_back(decode<GoldSample>(parse_json(line)));
  }
  return d;
}

GoldDataset load_gold_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("gold file not found: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return gold_from_jsonl(buf.str());
}

// ---------------------------------------------------------------------------
// Inference

std::vector<double> feature_vector(const CandidateSimplification& candidate) {
  if (!candidate.error_probs) {
    throw MissingErrorProbs("candidate " + std::to_string(candidate.candidate_index) +
                            " has no error probabilities");
  }
  std::vector<double> f;
  f.reserve(1 + candidate.error_probs->probs.size());
  f.push_back(candidate.raw_probability);
  f.insert(f.end(), candidate.error_probs->probs.begin(), candidate.error_probs->probs.end());
  return f;
}

CandidateSet calibrate(CandidateSet set, const CalibrationModel& model) {
  std::vector<double> logits;
  logits.reserve(set.candidates.size());
  for (const auto& c : set.candidates) {
    logits.push_back(kernels::logit(model.w_diag, model.b, feature_vector(c)));
  }
  const auto q = kernels::softmax(logits);
  for (std::size_t i = 0; i < q.size(); ++i) set.candidates[i].calibrated_probability = q[i];
  return set;
}

namespace {

// True when a should be preferred over b.
bool better(const CandidateSimplification& a, const CandidateSimplification& b) {
  if (*a.calibrated_probability != *b.calibrated_probability) {
    return *a.calibrated_probability > *b.calibrated_probability;
  }
  return a.candidate_index < b.candidate_index;
}

}  // namespace

CandidateSimplification select(const CandidateSet& set) {
  const std::vector<bool> all(set.candidates.size(), true);
  auto chosen = select_eligible(set, all);
  if (!chosen) throw UncalibratedSet("cannot select from an empty candidate set");
  return *chosen;
}

std::optional<CandidateSimplification> select_eligible(const CandidateSet& set,
                                                       const std::vector<bool>& eligible) {
  if (eligible.size() != set.candidates.size()) {
    throw DimensionMismatch("eligibility mask length does not match candidate count");
  }
  for (const auto& c : set.candidates) {
    if (!c.calibrated_probability) {
      throw UncalibratedSet("candidate " + std::to_string(c.candidate_index) +
                            " has no calibrated probability");
    }
  }
  const CandidateSimplification* best = nullptr;
  for (std::size_t i = 0; i < set.candidates.size(); ++i) {
    if (!eligible[i]) continue;
    if (!best || better(set.candidates[i], *best)) best = &set.candidates[i];
  }
  if (!best) return std::nullopt;
  return *best;
}

// ---------------------------------------------------------------------------
// Training

FeatureMatrix featurize(const GoldDataset& dataset, const ErrorClassifier& classifier,
                        double default_raw_probability) {
  const std::size_t m = classifier.registry().size();
  FeatureMatrix x(dataset.k(), 1 + m);
  const auto rows = static_cast<std::ptrdiff_t>(dataset.k());
  // Exceptions may not cross the parallel region; keep the first one.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < rows; ++i) {
    const auto k = static_cast<std::size_t>(i);
    try {
      const auto& s = dataset.samples[k];
      const auto probs = classifier.classify(s.original_text, s.simplified_text);
      if (probs.probs.size() != m) throw DimensionMismatch("classifier output length != m");
      auto row = x.row(k);
      row[0] = s.raw_probability.value_or(default_raw_probability);
      std::copy(probs.probs.begin(), probs.probs.end(), row.begin() + 1);
    } catch (...) {
#pragma omp critical(artist_featurize_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return x;
}

TrainResult train_features(const FeatureMatrix& features, std::span<const double> labels,
                           const TrainConfig& config, const ErrorRegistry& registry) {
  if (features.rows == 0) throw EmptyDataset("training needs at least one gold sample");
  if (features.cols != 1 + registry.size()) {
    throw DimensionMismatch("feature length " + std::to_string(features.cols) +
                            " does not match 1 + m = " + std::to_string(1 + registry.size()));
  }
  if (labels.size() != features.rows) throw DimensionMismatch("one label per sample expected");

  TrainResult result;
  result.model = initial_model(registry);
  auto& w = result.model.w_diag;
  double& b = result.model.b;

  if (config.init_noise != 0.0) {
    std::mt19937_64 rng(config.seed);
    auto jitter = [&] {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      return config.init_noise * (2.0 * u - 1.0);
    };
    for (auto& wj : w) wj += jitter();
    b += jitter();
  }

  const bool has_pos = std::any_of(labels.begin(), labels.end(), [](double y) { return y > 0.5; });
  const bool has_neg = std::any_of(labels.begin(), labels.end(), [](double y) { return y < 0.5; });
  result.degenerate = !(has_pos && has_neg);

  const auto step = config.parallel ? kernels::parallel::loss_and_gradient
                                    : kernels::serial::loss_and_gradient;
  result.loss_history.reserve(static_cast<std::size_t>(config.epochs) + 1);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto lg = step(features, labels, w, b);
    result.loss_history.push_back(lg.loss);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= config.learning_rate * lg.grad_w[j];
    b -= config.learning_rate * lg.grad_b;
  }
  result.loss_history.push_back(step(features, labels, w, b).loss);
  result.model.trained_on = static_cast<int>(features.rows);
  result.model.version = 1;
  return result;
}

TrainResult train(const GoldDataset& dataset, const ErrorClassifier& classifier,
                  const TrainConfig& config) {
  if (dataset.k() == 0) throw EmptyDataset("training needs at least one gold sample");
  const auto x = featurize(dataset, classifier, config.default_raw_probability);
  std::vector<double> labels;
  labels.reserve(dataset.k());
  for (const auto& s : dataset.samples) labels.push_back(static_cast<double>(s.verdict));
  return train_features(x, labels, config, classifier.registry());
}

double verdict_accuracy(const CalibrationModel& model, const FeatureMatrix& features,
                        std::span<const double> labels) {
  if (features.rows == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < features.rows; ++i) {
    const bool predicted = kernels::logit(model.w_diag, model.b, features.row(i)) >= 0.0;
    if (predicted == (labels[i] > 0.5)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(features.rows);
}

}  // namespace artist::calib
