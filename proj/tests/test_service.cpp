#include <doctest.h>

#include <httplib.h>

#include <fstream>
#include <sstream>
#include <thread>

#include "artist/corpus.hpp"
#include "artist/errors.hpp"
#include "artist/service.hpp"
#include "test_support.hpp"

using namespace artist;

namespace {

struct Harness {
  testing::TempDir dir;
  ScriptedBackend* backend = nullptr;
  std::unique_ptr<Service> service;
  httplib::Server server;
  std::thread thread;
  int port = 0;

  explicit Harness(std::string token = {}, std::optional<ClassifierSettings> remote = std::nullopt) {
    ServiceConfig config;
    config.store_dir = dir.path() / "store";
    config.api_token = std::move(token);
    auto scripted = std::make_unique<ScriptedBackend>(corpus::fixture_for_manual(corpus::coffee_manual()));
    backend = scripted.get();
    std::unique_ptr<ErrorClassifier> classifier =
        remote ? make_classifier(*remote) : std::make_unique<RuleBasedClassifier>();
    service = std::make_unique<Service>(config, std::move(scripted), std::move(classifier),
                                        corpus::default_template());
    service->mount(server);
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~Harness() {
    server.stop();
    thread.join();
  }

  httplib::Client client(const std::string& token = {}) const {
    httplib::Client c("127.0.0.1", port);
    if (!token.empty()) c.set_default_headers({{kApiTokenHeader, token}});
    c.set_read_timeout(std::chrono::seconds(30));
    return c;
  }

  void seed_coffee() {
    auto c = client();
    const auto res = c.Post("/manuals", Json(corpus::coffee_manual()).dump(), "application/json");
    REQUIRE(res);
    REQUIRE(res->status == 201);
  }
};

Json body_of(const httplib::Result& res) {
  REQUIRE(res);
  return Json::parse(res->body);
}

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

TEST_CASE("manual CRUD over HTTP") {
  Harness h;
  auto c = h.client();

  auto res = c.Post("/manuals", Json(corpus::coffee_manual()).dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  auto doc = body_of(res);
  CHECK(doc["manual_id"] == "pour-over-coffee");
  CHECK(doc["version"] == 1);
  CHECK(doc["steps"].size() == 9);

  doc["title"] = "Coffee";
  res = c.Put("/manuals/pour-over-coffee", doc.dump(), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(body_of(res)["version"] == 2);

  res = c.Put("/manuals/pour-over-coffee", doc.dump(), "application/json");
  CHECK(res->status == 409);
  CHECK(body_of(res)["error"] == "conflict");

  CHECK(body_of(c.Get("/manuals/pour-over-coffee?version=1"))["title"] == "Pour-over coffee");
  CHECK(body_of(c.Get("/manuals/pour-over-coffee"))["title"] == "Coffee");
  CHECK(body_of(c.Get("/manuals/pour-over-coffee/versions"))["versions"].size() == 2);
  CHECK(c.Get("/manuals/pour-over-coffee?version=9")->status == 404);
  CHECK(c.Get("/manuals/pour-over-coffee?version=abc")->status == 422);
  CHECK(c.Get("/manuals/missing")->status == 404);

  CHECK(c.Post("/manuals", "{\"title\": 3}", "application/json")->status == 422);
  CHECK(c.Post("/manuals", "not json", "application/json")->status == 422);
  CHECK(c.Post("/manuals", R"({"title":"x","steps":[]})", "application/json")->status == 422);
  CHECK(c.Put("/manuals/pour-over-coffee", R"({"title":"x","steps":[]})", "application/json")->status == 422);

  c.Post("/manuals", Json(corpus::meeting_manual()).dump(), "application/json");
  CHECK(body_of(c.Get("/manuals?query=grinder"))["manuals"].size() == 1);
  CHECK(body_of(c.Get("/manuals?tag=office"))["manuals"][0]["manual_id"] == "meeting-room-setup");
  CHECK(body_of(c.Get("/manuals?tag=office&tag=coffee"))["manuals"].empty());
  CHECK(body_of(c.Get("/manuals"))["manuals"].size() == 2);
}

TEST_CASE("simplify runs the whole pipeline and is byte-stable") {
  Harness h;
  h.seed_coffee();
  auto c = h.client();

  const auto first = c.Post("/manuals/pour-over-coffee/simplify", "", "application/json");
  REQUIRE(first);
  REQUIRE(first->status == 200);
  CHECK(first->get_header_value(kManualVersionHeader) == "2");
  const auto body = Json::parse(first->body);
  CHECK(body["manual_id"] == "pour-over-coffee");
  CHECK(body["model_version"] == 0);
  REQUIRE(body["steps"].size() == 9);
  for (const auto& step : body["steps"]) {
    CHECK(step["candidates"]["candidates"].size() == 5);
    CHECK(step["reports"].size() == 5);
    CHECK(step["eligible"].size() == 5);
    CHECK_FALSE(step["chosen_text"].get<std::string>().empty());
    CHECK(step.contains("plan"));
    double total = 0;
    for (const auto& cand : step["candidates"]["candidates"]) total += cand["calibrated_probability"].get<double>();
    CHECK(total == doctest::Approx(1.0));
  }

  const auto second = c.Post("/manuals/pour-over-coffee/simplify", "", "application/json");
  REQUIRE(second);
  CHECK(second->get_header_value(kManualVersionHeader) == "3");
  CHECK(second->body == first->body);

  const auto stored = h.service->store().get_manual("pour-over-coffee");
  CHECK(stored.version == 3);
  for (const auto& step : stored.steps) {
    CHECK(step.status == StepStatus::Simplified);
    CHECK(step.simplified_text);
    CHECK(step.spatial_snapshot);
  }
  CHECK(h.service->store().get_manual("pour-over-coffee", 1).steps[0].status == StepStatus::Draft);
  CHECK(c.Post("/manuals/missing/simplify", "", "application/json")->status == 404);
}

TEST_CASE("backend and classifier outages map to 503") {
  SUBCASE("backend") {
    Harness h;
    h.seed_coffee();
    h.backend->set_unavailable(true);
    const auto res = h.client().Post("/manuals/pour-over-coffee/simplify", "", "application/json");
    CHECK(res->status == 503);
    CHECK(h.service->store().list_versions("pour-over-coffee").size() == 1);
  }
  SUBCASE("classifier") {
    ClassifierSettings remote;
    remote.mode = "remote";
    remote.endpoint = "http://127.0.0.1:1";
    remote.timeout_s = 1;
    Harness h({}, remote);
    h.seed_coffee();
    CHECK(h.client().Post("/manuals/pour-over-coffee/simplify", "", "application/json")->status == 503);
  }
}

TEST_CASE("display and advance") {
  Harness h;
  h.seed_coffee();
  auto c = h.client();

  CHECK(c.Get("/manuals/pour-over-coffee/steps/1/display")->status == 404);

  c.Post("/context/detections", R"([{"label":"dripper","azimuth_deg":45,"distance_m":0.5,"confidence":0.9}])",
         "application/json");
  REQUIRE(c.Post("/manuals/pour-over-coffee/simplify", "", "application/json")->status == 200);

  auto shown = body_of(c.Get("/manuals/pour-over-coffee/steps/2/display"));
  CHECK(shown["status"] == "simplified");
  CHECK(shown["step_count"] == 9);
  CHECK(shown["text"].get<std::string>().find("dripper on your right") != std::string::npos);

  // The user turns around; step 2 keeps its frozen context until advanced into.
  auto res = c.Post("/context/detections",
                    R"({"objects":[{"label":"dripper","azimuth_deg":-45,"distance_m":0.5,"confidence":0.9}]})",
                    "application/json");
  CHECK(res->status == 202);
  CHECK(body_of(c.Get("/manuals/pour-over-coffee/steps/2/display"))["text"] == shown["text"]);

  res = c.Post("/manuals/pour-over-coffee/steps/1/advance", "", "application/json");
  CHECK(res->status == 200);
  CHECK(body_of(res)["frozen_step_id"] == 2);
  const auto after = body_of(c.Get("/manuals/pour-over-coffee/steps/2/display"));
  CHECK(after["text"].get<std::string>().find("dripper on your left") != std::string::npos);
  CHECK(after["spatial"][0]["relation"] == "on_your_left");

  c.Post("/context/detections", R"([{"label":"dripper","azimuth_deg":45,"distance_m":0.5,"confidence":0.9}])",
         "application/json");
  CHECK(body_of(c.Get("/manuals/pour-over-coffee/steps/2/display"))["text"] == after["text"]);

  CHECK(c.Post("/manuals/pour-over-coffee/steps/9/advance", "", "application/json")->status == 422);
  CHECK(c.Post("/manuals/pour-over-coffee/steps/12/advance", "", "application/json")->status == 404);
  CHECK(c.Get("/manuals/pour-over-coffee/steps/12/display")->status == 404);
  CHECK(c.Get("/manuals/pour-over-coffee/steps/x/display")->status == 422);
  CHECK(c.Post("/context/detections", R"([{"label":"mug","azimuth_deg":400,"distance_m":1,"confidence":0.9}])",
               "application/json")->status == 422);
}

TEST_CASE("review verdicts become gold samples") {
  Harness h;
  h.seed_coffee();
  auto c = h.client();
  CHECK(c.Post("/review/pour-over-coffee:1/verdict", R"({"verdict":"accept"})", "application/json")->status == 409);
  REQUIRE(c.Post("/manuals/pour-over-coffee/simplify", "", "application/json")->status == 200);

  auto queue = body_of(c.Get("/review/queue"))["items"];
  CHECK(queue.size() == 9);
  CHECK(queue[0]["review_id"] == "pour-over-coffee:1");

  auto res = c.Post("/review/pour-over-coffee:1/verdict",
                    R"({"verdict":"reject","error_class":"meaning_altered"})", "application/json");
  REQUIRE(res->status == 200);
  auto gold = body_of(res)["gold_sample"];
  CHECK(gold["verdict"] == 0);
  CHECK(gold["error_label"] == "meaning_altered");
  CHECK(gold["source"] == "expert_review");

  const auto lines = read_text(h.service->store().root() / "gold" / "samples.jsonl");
  const auto on_disk = calib::gold_from_jsonl(lines);
  REQUIRE(on_disk.k() == 1);
  CHECK(on_disk.samples[0].verdict == 0);
  CHECK(on_disk.samples[0].error_label == ErrorClass::MeaningAltered);

  auto doc = h.service->store().get_manual("pour-over-coffee");
  CHECK(doc.steps[0].status == StepStatus::Reviewed);
  CHECK(doc.steps[0].simplified_text == doc.steps[0].original_text);

  res = c.Post("/review/pour-over-coffee:2/verdict", R"({"verdict":"accept"})", "application/json");
  REQUIRE(res->status == 200);
  gold = body_of(res)["gold_sample"];
  CHECK(gold["verdict"] == 1);
  CHECK(gold.contains("raw_probability"));

  res = c.Post("/review/pour-over-coffee:3/verdict", R"({"verdict":"edit","text":"Rinse."})", "application/json");
  CHECK(res->status == 422);
  CHECK(body_of(res)["report"]["passed"] == false);

  res = c.Post("/review/pour-over-coffee:6/verdict",
               R"({"verdict":"edit","text":"Grind beans to coarse sand consistency, about 20 seconds."})",
               "application/json");
  REQUIRE(res->status == 200);
  CHECK(body_of(res)["report"]["passed"] == true);

  CHECK(body_of(c.Get("/review/queue"))["items"].size() == 6);
  CHECK(calib::gold_from_jsonl(read_text(h.service->store().root() / "gold" / "samples.jsonl")).k() == 3);
  CHECK(h.service->store().list_versions("pour-over-coffee").size() == 5);

  CHECK(c.Post("/review/pour-over-coffee:4/verdict", R"({"verdict":"reject"})", "application/json")->status == 422);
  CHECK(c.Post("/review/pour-over-coffee:4/verdict", R"({"verdict":"maybe"})", "application/json")->status == 422);
  CHECK(c.Post("/review/pour-over-coffee:4/verdict", R"({"verdict":"reject","error_class":"rude"})",
               "application/json")->status == 422);
  CHECK(c.Post("/review/nostep/verdict", R"({"verdict":"accept"})", "application/json")->status == 422);
  CHECK(c.Post("/review/missing:1/verdict", R"({"verdict":"accept"})", "application/json")->status == 404);
  CHECK(c.Post("/review/pour-over-coffee:99/verdict", R"({"verdict":"accept"})", "application/json")->status == 404);
}

TEST_CASE("training hot-swaps the model") {
  Harness h;
  auto c = h.client();
  CHECK(c.Post("/calibration/train", "", "application/json")->status == 422);

  for (const auto& s : corpus::seed_gold().samples) h.service->store().append_gold(s);
  auto res = c.Post("/calibration/train", "", "application/json");
  REQUIRE(res->status == 200);
  auto body = body_of(res);
  CHECK(body["model"]["version"] == 1);
  CHECK(body["model"]["trained_on"] == 64);
  CHECK(body["loss_history"].size() == 501);
  CHECK(body_of(c.Get("/calibration/model"))["version"] == 1);
  CHECK(std::filesystem::exists(h.service->store().root() / "models" / "calibration.json"));

  CHECK(body_of(c.Post("/calibration/train", "", "application/json"))["model"]["version"] == 2);

  h.seed_coffee();
  CHECK(body_of(c.Post("/manuals/pour-over-coffee/simplify", "", "application/json"))["model_version"] == 2);
}

TEST_CASE("a restarted service picks up the persisted model") {
  testing::TempDir dir;
  ServiceConfig config;
  config.store_dir = dir.path();
  {
    Service s(config, std::make_unique<ScriptedBackend>(std::vector<LlmCompletion>{{"x", std::nullopt}}),
              std::make_unique<RuleBasedClassifier>(), corpus::default_template());
    for (const auto& g : corpus::seed_gold().samples) s.store().append_gold(g);
    s.retrain();
  }
  Service again(config, std::make_unique<ScriptedBackend>(std::vector<LlmCompletion>{{"x", std::nullopt}}),
                std::make_unique<RuleBasedClassifier>(), corpus::default_template());
  CHECK(again.model()->version == 1);
  CHECK(again.model()->trained_on == 64);
}

TEST_CASE("API token") {
  Harness h("s3cret");
  CHECK(h.client().Get("/manuals")->status == 401);
  CHECK(h.client("wrong").Get("/manuals")->status == 401);
  CHECK(h.client("s3cret").Get("/manuals")->status == 200);
}

TEST_CASE("concurrent requests") {
  Harness h;
  h.seed_coffee();
  std::vector<std::thread> readers;
  std::atomic<int> ok{0};
  for (int t = 0; t < 8; ++t) {
    readers.emplace_back([&] {
      auto c = h.client();
      for (int i = 0; i < 10; ++i) {
        if (auto r = c.Get("/manuals/pour-over-coffee"); r && r->status == 200) ++ok;
      }
    });
  }
  for (auto& r : readers) r.join();
  CHECK(ok == 80);
}

TEST_CASE("config file") {
  testing::TempDir dir;
  {
    std::ofstream out(dir.path() / "config.json");
    out << R"({"backend": {"kind": "mock", "fixture": "fixture.json"},
              "classifier": {"mode": "rule"},
              "display_profile": {"chars_per_line": 32},
              "thresholds": {"meaning": 0.4},
              "store_dir": "data", "n": 3,
              "temperatures": {"plan": 0.0, "candidates": 0.9},
              "training": {"learning_rate": 0.05, "epochs": 100, "seed": 7},
              "api_token": "t", "port": 9000})";
  }
  const auto config = load_config(dir.path() / "config.json");
  CHECK(config.backend.fixture == dir.path() / "fixture.json");
  CHECK(config.store_dir == dir.path() / "data");
  CHECK(config.display_profile.chars_per_line == 32);
  CHECK(config.meaning_threshold == 0.4);
  CHECK(config.n == 3);
  CHECK(config.sampling.candidate_temperature == 0.9);
  CHECK(config.train_config().epochs == 100);
  CHECK(config.train_config().seed == 7);
  CHECK(config.port == 9000);
  CHECK_THROWS_AS(decode<ServiceConfig>(Json{{"backend", {{"kind", "carrier-pigeon"}}}}), MalformedInput);
  CHECK_THROWS_AS(decode<ServiceConfig>(Json{{"n", 0}}), MalformedInput);
  CHECK_THROWS_AS(load_config(dir.path() / "missing.json"), NotFound);
}
