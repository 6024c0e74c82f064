#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "artist/calibration.hpp"
#include "artist/config.hpp"
#include "artist/manual_store.hpp"
#include "artist/pipeline.hpp"
#include "artist/spatial.hpp"

namespace httplib {
class Server;
}

namespace artist {

inline constexpr const char* kApiTokenHeader = "X-Api-Token";
inline constexpr const char* kManualVersionHeader = "X-Manual-Version";

struct SimplifyResult {
  pipeline::ManualOutcome outcome;
  int manual_version = 0;
};

struct Verdict {
  enum class Kind { Accept, Reject, Edit };
  Kind kind = Kind::Accept;
  std::optional<ErrorClass> error_class;  // reject
  std::optional<std::string> text;        // edit
};

struct VerdictResult {
  int manual_version = 0;
  calib::GoldSample gold;
  std::optional<validate::ValidationReport> report;  // edit
};

// Raised when an edited text fails server-side validation.
class EditRejected : public MalformedInput {
 public:
  explicit EditRejected(validate::ValidationReport report)
      : MalformedInput("edited text failed validation"), report_(std::move(report)) {}
  const validate::ValidationReport& report() const noexcept { return report_; }

 private:
  validate::ValidationReport report_;
};

class Service {
 public:
  Service(ServiceConfig config, std::unique_ptr<LlmBackend> backend,
          std::unique_ptr<ErrorClassifier> classifier, prompt::PromptTemplate tmpl,
          store::ManualStore::Clock clock = now_utc);
  explicit Service(const ServiceConfig& config);

  // Registers every endpoint (and the token check when a token is configured).
  void mount(httplib::Server& server);
  // Blocks serving on config host/port.
  bool run();

  SimplifyResult simplify(const std::string& manual_id);
  int advance(const std::string& manual_id, int step_id);
  VerdictResult record_verdict(const std::string& manual_id, int step_id, const Verdict& verdict);
  calib::TrainResult retrain();

  std::shared_ptr<const calib::CalibrationModel> model() const;
  store::ManualStore& store() { return store_; }
  spatial::DetectionFeed& feed() { return feed_; }
  const ServiceConfig& config() const { return config_; }

 private:
  struct Choice {
    std::string text;
    double raw_probability = 1.0;
  };

  std::filesystem::path model_file() const;
  pipeline::Settings settings() const;

  ServiceConfig config_;
  store::ManualStore store_;
  spatial::DetectionFeed feed_;
  std::unique_ptr<LlmBackend> backend_;
  std::unique_ptr<ErrorClassifier> classifier_;
  prompt::PromptTemplate template_;

  // Scripted backends replay their fixture from the start for every run so
  // that identical requests give identical results.
  std::mutex backend_mutex_;

  mutable std::mutex model_mutex_;
  std::shared_ptr<const calib::CalibrationModel> model_;
  std::mutex train_mutex_;

  std::mutex choices_mutex_;
  std::map<std::pair<std::string, int>, Choice> last_choices_;
};

}  // namespace artist
