#include "artist/config.hpp"

#include <fstream>
#include <sstream>

#include "artist/corpus.hpp"
#include "artist/errors.hpp"

namespace fs = std::filesystem;

namespace artist {

namespace {

template <typename T>
void read_opt(const Json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

void read_path(const Json& j, const char* key, std::optional<fs::path>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = fs::path(j.at(key).get<std::string>());
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  return p.is_absolute() ? p : base / p;
}

}  // namespace

calib::TrainConfig ServiceConfig::train_config() const {
  calib::TrainConfig tc(training.seed);
  tc.learning_rate = training.learning_rate;
  tc.epochs = training.epochs;
  return tc;
}

void to_json(Json& j, const ServiceConfig& c) {
  Json backend{{"kind", c.backend.kind},
               {"endpoint", c.backend.endpoint},
               {"path", c.backend.path},
               {"model", c.backend.model},
               {"timeout_s", c.backend.timeout_s},
               {"batch_samples", c.backend.batch_samples}};
  if (c.backend.fixture) backend["fixture"] = c.backend.fixture->string();
  j = Json{{"backend", backend},
           {"classifier",
            {{"mode", c.classifier.mode},
             {"endpoint", c.classifier.endpoint},
             {"path", c.classifier.path},
             {"timeout_s", c.classifier.timeout_s}}},
           {"display_profile", c.display_profile},
           {"thresholds", {{"meaning", c.meaning_threshold}}},
           {"store_dir", c.store_dir.string()},
           {"n", c.n},
           {"temperatures",
            {{"plan", c.sampling.plan_temperature}, {"candidates", c.sampling.candidate_temperature}}},
           {"max_output_length", c.sampling.max_output_length},
           {"training",
            {{"learning_rate", c.training.learning_rate},
             {"epochs", c.training.epochs},
             {"seed", c.training.seed}}},
           {"host", c.host},
           {"port", c.port}};
  if (c.template_path) j["template"] = c.template_path->string();
  if (c.model_path) j["model"] = c.model_path->string();
}

void from_json(const Json& j, ServiceConfig& c) {
  c = ServiceConfig{};
  if (j.contains("backend")) {
    const auto& b = j.at("backend");
    read_opt(b, "kind", c.backend.kind);
    read_opt(b, "endpoint", c.backend.endpoint);
    read_opt(b, "path", c.backend.path);
    read_opt(b, "model", c.backend.model);
    read_opt(b, "api_key", c.backend.api_key);
    read_opt(b, "timeout_s", c.backend.timeout_s);
    read_opt(b, "batch_samples", c.backend.batch_samples);
    read_path(b, "fixture", c.backend.fixture);
  }
  if (c.backend.kind != "mock" && c.backend.kind != "http") {
    throw MalformedInput("backend.kind must be \"mock\" or \"http\"");
  }
  if (j.contains("classifier")) {
    const auto& cl = j.at("classifier");
    read_opt(cl, "mode", c.classifier.mode);
    read_opt(cl, "endpoint", c.classifier.endpoint);
    read_opt(cl, "path", c.classifier.path);
    read_opt(cl, "timeout_s", c.classifier.timeout_s);
  }
  if (c.classifier.mode != "rule" && c.classifier.mode != "remote") {
    throw MalformedInput("classifier.mode must be \"rule\" or \"remote\"");
  }
  if (j.contains("display_profile")) c.display_profile = j.at("display_profile").get<validate::DisplayProfile>();
  if (j.contains("thresholds")) read_opt(j.at("thresholds"), "meaning", c.meaning_threshold);
  if (j.contains("store_dir")) c.store_dir = j.at("store_dir").get<std::string>();
  read_opt(j, "n", c.n);
  if (c.n < 1) throw MalformedInput("n must be at least 1");
  if (j.contains("temperatures")) {
    read_opt(j.at("temperatures"), "plan", c.sampling.plan_temperature);
    read_opt(j.at("temperatures"), "candidates", c.sampling.candidate_temperature);
  }
  read_opt(j, "max_output_length", c.sampling.max_output_length);
  if (j.contains("training")) {
    const auto& t = j.at("training");
    read_opt(t, "learning_rate", c.training.learning_rate);
    read_opt(t, "epochs", c.training.epochs);
    read_opt(t, "seed", c.training.seed);
  }
  read_path(j, "template", c.template_path);
  read_path(j, "model", c.model_path);
  read_opt(j, "api_token", c.api_token);
  read_opt(j, "host", c.host);
  read_opt(j, "port", c.port);
}

ServiceConfig load_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto config = decode<ServiceConfig>(parse_json(buf.str()));
  const fs::path base = path.parent_path().empty() ? fs::path(".") : path.parent_path();
  config.store_dir = resolve(base, config.store_dir);
  if (config.backend.fixture) config.backend.fixture = resolve(base, *config.backend.fixture);
  if (config.template_path) config.template_path = resolve(base, *config.template_path);
  if (config.model_path) config.model_path = resolve(base, *config.model_path);
  return config;
}

std::unique_ptr<LlmBackend> make_backend(const BackendSettings& settings) {
  if (settings.kind == "http") {
    HttpBackendConfig hc;
    hc.base_url = settings.endpoint;
    hc.path = settings.path;
    hc.model = settings.model;
    hc.api_key = settings.api_key;
    hc.timeout = std::chrono::seconds(settings.timeout_s);
    hc.batch_samples = settings.batch_samples;
    return std::make_unique<HttpBackend>(std::move(hc));
  }
  if (!settings.fixture) throw MalformedInput("mock backend needs a fixture file");
  std::ifstream in(*settings.fixture, std::ios::binary);
  if (!in) throw NotFound("cannot open fixture " + settings.fixture->string());
  std::stringstream buf;
  buf << in.rdbuf();
  return std::make_unique<ScriptedBackend>(
      decode<std::vector<LlmCompletion>>(parse_json(buf.str())));
}

std::unique_ptr<ErrorClassifier> make_classifier(const ClassifierSettings& settings) {
  if (settings.mode == "remote") {
    return std::make_unique<RemoteClassifier>(settings.endpoint, settings.path,
                                              ErrorRegistry::standard(),
                                              std::chrono::seconds(settings.timeout_s));
  }
  return std::make_unique<RuleBasedClassifier>();
}

prompt::PromptTemplate load_template_or_default(const ServiceConfig& config) {
  if (config.template_path) return prompt::load_template(*config.template_path);
  return corpus::default_template();
}

}  // namespace artist
