#include "artist/service.hpp"

#include <httplib.h>

#include "artist/errors.hpp"

namespace artist {

namespace {

using httplib::Request;
using httplib::Response;

void send_json(Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(Response& res, int status, std::string_view kind, std::string_view message) {
  send_json(res, Json{{"error", kind}, {"message", message}}, status);
}

// Maps the library's error families onto status codes.
void send_exception(Response& res, std::exception_ptr ep) {
  try {
    std::rethrow_exception(ep);
  } catch (const EditRejected& e) {
    send_json(res, Json{{"error", "validation_failed"}, {"message", e.what()}, {"report", e.report()}},
              422);
  } catch (const NotFound& e) {
    send_error(res, 404, "not_found", e.what());
  } catch (const ConcurrentUpdateConflict& e) {
    send_error(res, 409, "conflict", e.what());
  } catch (const MalformedInput& e) {
    send_error(res, 422, "malformed_input", e.what());
  } catch (const EmptyDataset& e) {
    send_error(res, 422, "empty_dataset", e.what());
  } catch (const Unavailable& e) {
    send_error(res, 503, "unavailable", e.what());
  } catch (const BackendReturnedWrongCount& e) {
    send_error(res, 503, "unavailable", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal", e.what());
  } catch (...) {
    send_error(res, 500, "internal", "unknown failure");
  }
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f = std::move(f)](const Request& req, Response& res) {
    try {
      f(req, res);
    } catch (...) {
      send_exception(res, std::current_exception());
    }
  };
}

int int_param(const std::string& raw, const char* what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(raw, &used);
    if (used == raw.size()) return v;
  } catch (const std::exception&) {
  }
  throw MalformedInput(std::string(what) + " must be an integer");
}

Json body_json(const Request& req) {
  if (req.body.empty()) return Json::object();
  return parse_json(req.body);
}

std::pair<std::string, int> parse_review_id(const std::string& rid) {
  const auto colon = rid.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw MalformedInput("review id must look like <manual_id>:<step_id>");
  }
  return {rid.substr(0, colon), int_param(rid.substr(colon + 1), "step id")};
}

ManualStep& find_step(ManualDocument& doc, int step_id) {
  for (auto& s : doc.steps) {
    if (s.step_id == step_id) return s;
  }
  throw NotFound("manual " + doc.manual_id + " has no step " + std::to_string(step_id));
}

Verdict verdict_from_json(const Json& j) {
  Verdict v;
  const auto kind = j.at("verdict").get<std::string>();
  if (kind == "accept") {
    v.kind = Verdict::Kind::Accept;
  } else if (kind == "reject") {
    v.kind = Verdict::Kind::Reject;
    if (!j.contains("error_class")) throw MalformedInput("reject needs an error_class");
    v.error_class = j.at("error_class").get<ErrorClass>();
  } else if (kind == "edit") {
    v.kind = Verdict::Kind::Edit;
    v.text = j.at("text").get<std::string>();
    if (v.text->empty()) throw MalformedInput("edit text must not be empty");
  } else {
    throw MalformedInput("verdict must be accept, reject or edit");
  }
  return v;
}

Json spatial_json(const std::optional<SpatialContext>& ctx) {
  Json out = Json::array();
  if (!ctx) return out;
  for (const auto& obj : ctx->objects()) {
    if (obj.confidence < spatial::kMinConfidence) continue;
    out.push_back({{"label", obj.label}, {"relation", spatial::to_string(spatial::relation_of(obj))}});
  }
  return out;
}

}  // namespace

Service::Service(ServiceConfig config, std::unique_ptr<LlmBackend> backend,
                 std::unique_ptr<ErrorClassifier> classifier, prompt::PromptTemplate tmpl,
                 store::ManualStore::Clock clock)
    : config_(std::move(config)),
      store_(config_.store_dir, std::move(clock)),
      backend_(std::move(backend)),
      classifier_(std::move(classifier)),
      template_(std::move(tmpl)) {
  const auto path = model_file();
  model_ = std::make_shared<const calib::CalibrationModel>(
      std::filesystem::exists(path) ? calib::load_model_file(path, classifier_->registry())
                                    : calib::initial_model(classifier_->registry()));
}

Service::Service(const ServiceConfig& config)
    : Service(config, make_backend(config.backend), make_classifier(config.classifier),
              load_template_or_default(config)) {}

std::filesystem::path Service::model_file() const {
  return config_.model_path.value_or(config_.store_dir / "models" / "calibration.json");
}

pipeline::Settings Service::settings() const {
  return {config_.display_profile, config_.meaning_threshold, config_.n, config_.sampling};
}

std::shared_ptr<const calib::CalibrationModel> Service::model() const {
  std::lock_guard lock(model_mutex_);
  return model_;
}

SimplifyResult Service::simplify(const std::string& manual_id) {
  const auto doc = store_.get_manual(manual_id);
  const auto model_in_use = model();
  const auto context = feed_.snapshot();

  pipeline::ManualOutcome outcome;
  {
    std::lock_guard lock(backend_mutex_);
    if (auto* scripted = dynamic_cast<ScriptedBackend*>(backend_.get())) scripted->reset();
    outcome = pipeline::simplify_manual(doc, context, {template_, *backend_, *classifier_, *model_in_use},
                                        settings());
  }

  const int version = store_.update_manual(manual_id, pipeline::apply(doc, outcome, context));
  {
    std::lock_guard lock(choices_mutex_);
    for (const auto& step : outcome.steps) {
      if (!step.chosen_index) {
        last_choices_.erase({manual_id, step.step_id});
        continue;
      }
      const auto& c = step.candidates.candidates.at(static_cast<std::size_t>(*step.chosen_index));
      last_choices_[{manual_id, step.step_id}] = {c.text, c.raw_probability};
    }
  }
  return {std::move(outcome), version};
}

int Service::advance(const std::string& manual_id, int step_id) {
  auto doc = store_.get_manual(manual_id);
  find_step(doc, step_id);
  ManualStep* next = nullptr;
  for (auto& s : doc.steps) {
    if (s.step_id == step_id + 1) next = &s;
  }
  if (!next) throw MalformedInput("step " + std::to_string(step_id) + " is the last step");
  next->spatial_snapshot = feed_.snapshot();
  return store_.update_manual(manual_id, std::move(doc));
}

VerdictResult Service::record_verdict(const std::string& manual_id, int step_id,
                                      const Verdict& verdict) {
  auto doc = store_.get_manual(manual_id);
  auto& step = find_step(doc, step_id);
  if (step.status == StepStatus::Draft || !step.simplified_text) {
    throw ConcurrentUpdateConflict("step " + std::to_string(step_id) + " has not been simplified");
  }

  VerdictResult result;
  calib::GoldSample& gold = result.gold;
  gold.original_text = step.original_text;
  gold.source = calib::GoldSource::ExpertReview;

  std::optional<Choice> choice;
  {
    std::lock_guard lock(choices_mutex_);
    const auto it = last_choices_.find({manual_id, step_id});
    if (it != last_choices_.end() && it->second.text == *step.simplified_text) choice = it->second;
  }

  switch (verdict.kind) {
    case Verdict::Kind::Accept:
      gold.simplified_text = *step.simplified_text;
      gold.verdict = 1;
      if (choice) gold.raw_probability = choice->raw_probability;
      break;
    case Verdict::Kind::Reject:
      gold.simplified_text = *step.simplified_text;
      gold.verdict = 0;
      gold.error_label = verdict.error_class;
      if (choice) gold.raw_probability = choice->raw_probability;
      step.simplified_text = step.original_text;
      break;
    case Verdict::Kind::Edit: {
      auto report = validate::validate(step.original_text, *verdict.text, config_.display_profile,
                                       glossary_of(doc), *classifier_,
                                       manual_id + ":" + std::to_string(step_id),
                                       config_.meaning_threshold);
      if (!report.passed()) throw EditRejected(std::move(report));
      gold.simplified_text = *verdict.text;
      gold.verdict = 1;
      step.simplified_text = *verdict.text;
      result.report = std::move(report);
      break;
    }
  }
  calib::check_gold(gold);
  step.status = StepStatus::Reviewed;
  result.manual_version = store_.update_manual(manual_id, std::move(doc));
  store_.append_gold(gold);
  {
    std::lock_guard lock(choices_mutex_);
    last_choices_.erase({manual_id, step_id});
  }
  return result;
}

calib::TrainResult Service::retrain() {
  std::lock_guard train_lock(train_mutex_);
  const auto gold = store_.load_gold();
  if (gold.k() == 0) throw EmptyDataset("the gold store is empty");
  auto result = calib::train(gold, *classifier_, config_.train_config());
  result.model.version = model()->version + 1;
  calib::save_model_file(result.model, model_file());
  {
    std::lock_guard lock(model_mutex_);
    model_ = std::make_shared<const calib::CalibrationModel>(result.model);
  }
  return result;
}

void Service::mount(httplib::Server& server) {
  if (!config_.api_token.empty()) {
    server.set_pre_routing_handler([token = config_.api_token](const Request& req, Response& res) {
      if (req.get_header_value(kApiTokenHeader) == token) return httplib::Server::HandlerResponse::Unhandled;
      send_error(res, 401, "unauthorized", "missing or wrong API token");
      return httplib::Server::HandlerResponse::Handled;
    });
  }
  server.set_exception_handler(
      [](const Request&, Response& res, std::exception_ptr ep) { send_exception(res, ep); });

  server.Post("/manuals", guarded([this](const Request& req, Response& res) {
    const auto id = store_.create_manual(decode<ManualDocument>(body_json(req)));
    send_json(res, store_.get_manual(id), 201);
  }));

  server.Put("/manuals/:id", guarded([this](const Request& req, Response& res) {
    const auto& id = req.path_params.at("id");
    const auto body = body_json(req);
    if (!body.contains("version")) throw MalformedInput("update needs the base version");
    store_.update_manual(id, decode<ManualDocument>(body));
    send_json(res, store_.get_manual(id));
  }));

  server.Get("/manuals/:id", guarded([this](const Request& req, Response& res) {
    std::optional<int> version;
    if (req.has_param("version")) version = int_param(req.get_param_value("version"), "version");
    send_json(res, store_.get_manual(req.path_params.at("id"), version));
  }));

  server.Get("/manuals/:id/versions", guarded([this](const Request& req, Response& res) {
    send_json(res, Json{{"versions", store_.list_versions(req.path_params.at("id"))}});
  }));

  server.Get("/manuals", guarded([this](const Request& req, Response& res) {
    std::set<std::string> tags;
    for (std::size_t i = 0; i < req.get_param_value_count("tag"); ++i) {
      tags.insert(req.get_param_value("tag", i));
    }
    send_json(res, Json{{"manuals", store_.search(req.get_param_value("query"), tags)}});
  }));

  server.Post("/manuals/:id/simplify", guarded([this](const Request& req, Response& res) {
    auto result = simplify(req.path_params.at("id"));
    res.set_header(kManualVersionHeader, std::to_string(result.manual_version));
    send_json(res, result.outcome);
  }));

  server.Post("/context/detections", guarded([this](const Request& req, Response& res) {
    const auto body = body_json(req);
    const Json& list = body.is_array() ? body : body.at("objects");
    auto objects = decode<std::vector<DetectedObject>>(list);
    const auto count = objects.size();
    feed_.publish(std::move(objects));
    send_json(res, Json{{"accepted", count}}, 202);
  }));

  server.Get("/context", guarded([this](const Request&, Response& res) {
    send_json(res, feed_.latest());
  }));

  server.Get("/manuals/:id/steps/:n/display", guarded([this](const Request& req, Response& res) {
    auto doc = store_.get_manual(req.path_params.at("id"));
    const auto& step = find_step(doc, int_param(req.path_params.at("n"), "step"));
    if (step.status == StepStatus::Draft || !step.simplified_text) {
      throw NotFound("step " + std::to_string(step.step_id) + " has no simplified text yet");
    }
    send_json(res, Json{{"manual_id", doc.manual_id},
                        {"version", doc.version},
                        {"step_id", step.step_id},
                        {"step_count", doc.steps.size()},
                        {"status", step.status},
                        {"text", pipeline::elaborate(*step.simplified_text, step.spatial_snapshot)},
                        {"spatial", spatial_json(step.spatial_snapshot)}});
  }));

  server.Post("/manuals/:id/steps/:n/advance", guarded([this](const Request& req, Response& res) {
    const auto& id = req.path_params.at("id");
    const int n = int_param(req.path_params.at("n"), "step");
    const int version = advance(id, n);
    send_json(res, Json{{"manual_id", id}, {"version", version}, {"frozen_step_id", n + 1}});
  }));

  server.Get("/review/queue", guarded([this](const Request&, Response& res) {
    Json items = Json::array();
    for (const auto& id : store_.manual_ids()) {
      const auto doc = store_.get_manual(id);
      for (const auto& step : doc.steps) {
        if (step.status != StepStatus::Simplified) continue;
        items.push_back({{"review_id", id + ":" + std::to_string(step.step_id)},
                         {"manual_id", id},
                         {"version", doc.version},
                         {"step_id", step.step_id},
                         {"original_text", step.original_text},
                         {"simplified_text", step.simplified_text.value_or("")}});
      }
    }
    send_json(res, Json{{"items", items}});
  }));

  server.Post("/review/:rid/verdict", guarded([this](const Request& req, Response& res) {
    const auto [id, step_id] = parse_review_id(req.path_params.at("rid"));
    const auto verdict = [&] {
      try {
        return verdict_from_json(body_json(req));
      } catch (const nlohmann::json::exception& e) {
        throw MalformedInput(e.what());
      }
    }();
    const auto result = record_verdict(id, step_id, verdict);
    Json body{{"review_id", id + ":" + std::to_string(step_id)},
              {"version", result.manual_version},
              {"gold_sample", result.gold}};
    if (result.report) body["report"] = *result.report;
    send_json(res, body);
  }));

  server.Post("/calibration/train", guarded([this](const Request&, Response& res) {
    const auto result = retrain();
    send_json(res, Json{{"model", result.model},
                        {"degenerate", result.degenerate},
                        {"loss_history", result.loss_history}});
  }));

  server.Get("/calibration/model", guarded([this](const Request&, Response& res) {
    send_json(res, *model());
  }));
}

bool Service::run() {
  httplib::Server server;
  mount(server);
  return server.listen(config_.host, config_.port);
}

}  // namespace artist
