#include "artist/llm_backend.hpp"

#include <fstream>
#include <sstream>

#include <httplib.h>

#include "artist/errors.hpp"

namespace artist {

void to_json(Json& j, const LlmCompletion& c) {
  j = Json{{"text", c.text}};
  j["token_logprobs"] = c.token_logprobs ? Json(*c.token_logprobs) : Json(nullptr);
}

void from_json(const Json& j, LlmCompletion& c) {
  c.text = j.at("text").get<std::string>();
  c.token_logprobs.reset();
  if (j.contains("token_logprobs") && !j.at("token_logprobs").is_null()) {
    c.token_logprobs = j.at("token_logprobs").get<std::vector<double>>();
  }
}

// ---------------------------------------------------------------------------
// ScriptedBackend

ScriptedBackend::ScriptedBackend(std::vector<LlmCompletion> script) : script_(std::move(script)) {
  if (script_.empty()) throw MalformedInput("scripted backend needs at least one response");
}

ScriptedBackend ScriptedBackend::from_json(const Json& fixture) {
  if (!fixture.is_array()) throw MalformedInput("fixture must be a JSON list");
  return ScriptedBackend(decode<std::vector<LlmCompletion>>(fixture));
}

ScriptedBackend ScriptedBackend::from_file(const std::filesystem::path& fixture) {
  std::ifstream in(fixture);
  if (!in) throw NotFound("fixture file not found: " + fixture.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return from_json(parse_json(buf.str()));
}

LlmResponse ScriptedBackend::complete(const LlmRequest& request) {
  std::lock_guard lock(mutex_);
  if (unavailable_) throw BackendUnavailable("scripted backend marked unavailable");
  requests_.push_back(request);
  int count = request.sample_count;
  if (short_next_) {
    short_next_ = false;
    count = std::max(0, count - 1);
  }
  LlmResponse out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    out.push_back(script_[cursor_]);
    cursor_ = (cursor_ + 1) % script_.size();
  }
  return out;
}

std::vector<LlmRequest> ScriptedBackend::requests() const {
  std::lock_guard lock(mutex_);
  return requests_;
}

std::size_t ScriptedBackend::call_count() const {
  std::lock_guard lock(mutex_);
  return requests_.size();
}

void ScriptedBackend::reset() {
  std::lock_guard lock(mutex_);
  cursor_ = 0;
  requests_.clear();
}

// ---------------------------------------------------------------------------
// HttpBackend

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {}

LlmResponse HttpBackend::call(const LlmRequest& request, int n) const {
  httplib::Client client(config_.base_url);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);

  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  const Json body{{"model", config_.model},
                  {"messages", Json::array({Json{{"role", "user"}, {"content", request.prompt}}})},
                  {"n", n},
                  {"temperature", request.temperature},
                  {"max_tokens", request.max_output_length},
                  {"logprobs", true}};
  auto res = client.Post(config_.path, headers, body.dump(), "application/json");
  if (!res) {
    throw BackendUnavailable("LLM request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw BackendUnavailable("LLM backend returned HTTP " + std::to_string(res->status));
  }

  LlmResponse out;
  try {
    const auto reply = Json::parse(res->body);
    for (const auto& choice : reply.at("choices")) {
      LlmCompletion c;
      c.text = choice.at("message").at("content").get<std::string>();
      const auto lp = choice.find("logprobs");
      if (lp != choice.end() && lp->is_object() && lp->contains("content") &&
          lp->at("content").is_array()) {
        std::vector<double> values;
        for (const auto& tok : lp->at("content")) values.push_back(tok.at("logprob").get<double>());
        c.token_logprobs = std::move(values);
      }
      out.push_back(std::move(c));
    }
  } catch (const nlohmann::json::exception& e) {
    throw BackendUnavailable(std::string("LLM backend sent a malformed reply: ") + e.what());
  }
  return out;
}

LlmResponse HttpBackend::complete(const LlmRequest& request) {
  if (config_.batch_samples) return call(request, request.sample_count);
  LlmResponse out;
  for (int i = 0; i < request.sample_count; ++i) {
    auto part = call(request, 1);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

}  // namespace artist
