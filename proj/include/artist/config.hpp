#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "artist/calibration.hpp"
#include "artist/error_classifier.hpp"
#include "artist/llm_backend.hpp"
#include "artist/prompt_engine.hpp"
#include "artist/validators.hpp"

namespace artist {

struct BackendSettings {
  std::string kind = "mock";  // "mock" or "http"
  std::string endpoint = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  std::string api_key;
  int timeout_s = 30;
  bool batch_samples = true;
  std::optional<std::filesystem::path> fixture;
};

struct ClassifierSettings {
  std::string mode = "rule";  // "rule" or "remote"
  std::string endpoint;
  std::string path = "/classify";
  int timeout_s = 30;
};

struct TrainingSettings {
  double learning_rate = 0.1;
  int epochs = 500;
  std::uint64_t seed = 42;
};

struct ServiceConfig {
  BackendSettings backend;
  ClassifierSettings classifier;
  validate::DisplayProfile display_profile;
  double meaning_threshold = validate::kDefaultMeaningThreshold;
  std::filesystem::path store_dir = "artist-store";
  int n = kDefaultCandidateCount;
  prompt::SamplingConfig sampling;
  TrainingSettings training;
  std::optional<std::filesystem::path> template_path;
  std::optional<std::filesystem::path> model_path;
  std::string api_token;
  std::string host = "127.0.0.1";
  int port = 8080;

  calib::TrainConfig train_config() const;
};

void to_json(Json& j, const ServiceConfig& c);
void from_json(const Json& j, ServiceConfig& c);

// Relative paths inside the file are resolved against the file's directory.
ServiceConfig load_config(const std::filesystem::path& path);

std::unique_ptr<LlmBackend> make_backend(const BackendSettings& settings);
std::unique_ptr<ErrorClassifier> make_classifier(const ClassifierSettings& settings);
prompt::PromptTemplate load_template_or_default(const ServiceConfig& config);

}  // namespace artist
