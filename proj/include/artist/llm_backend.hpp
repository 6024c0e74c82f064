#pragma once

#include <chrono>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "artist/core_types.hpp"

namespace artist {

struct LlmRequest {
  std::string prompt;
  int sample_count = 1;
  double temperature = 0.0;
  int max_output_length = 256;
};

struct LlmCompletion {
  std::string text;
  std::optional<std::vector<double>> token_logprobs;

  bool operator==(const LlmCompletion&) const = default;
};

using LlmResponse = std::vector<LlmCompletion>;

void to_json(Json& j, const LlmCompletion& c);
void from_json(const Json& j, LlmCompletion& c);

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  // Throws BackendUnavailable when the model cannot be reached.
  virtual LlmResponse complete(const LlmRequest& request) = 0;
};

// Replays a fixture (JSON list of {text, token_logprobs}) in order, wrapping
// around at the end; every request consumes sample_count entries. Prompts are
// recorded so tests can inspect what each stage sent.
class ScriptedBackend final : public LlmBackend {
 public:
  explicit ScriptedBackend(std::vector<LlmCompletion> script);
  static ScriptedBackend from_file(const std::filesystem::path& fixture);
  static ScriptedBackend from_json(const Json& fixture);

  LlmResponse complete(const LlmRequest& request) override;

  std::vector<LlmRequest> requests() const;
  std::size_t call_count() const;
  void reset();
  // Makes the next complete() return one fewer sample than requested.
  void short_next_response() { short_next_ = true; }
  // Makes every call fail with BackendUnavailable.
  void set_unavailable(bool down) { unavailable_ = down; }

 private:
  std::vector<LlmCompletion> script_;
  mutable std::mutex mutex_;
  std::size_t cursor_ = 0;
  std::vector<LlmRequest> requests_;
  bool short_next_ = false;
  bool unavailable_ = false;
};

struct HttpBackendConfig {
  std::string base_url = "https://api.openai.com";
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-3.5-turbo";
  std::string api_key;
  std::chrono::seconds timeout{30};
  // Ask for all samples in one call (`n`), or issue one call per sample for
  // servers that ignore `n`.
  bool batch_samples = true;
};

// OpenAI-compatible chat/completions client. Token log-probabilities are
// requested and returned when the server provides them.
class HttpBackend final : public LlmBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  LlmResponse complete(const LlmRequest& request) override;

 private:
  LlmResponse call(const LlmRequest& request, int n) const;
  HttpBackendConfig config_;
};

}  // namespace artist
