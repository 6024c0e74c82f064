#include <doctest.h>

#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <thread>

#include "artist/corpus.hpp"
#include "artist/errors.hpp"
#include "artist/prompt_engine.hpp"
#include "test_support.hpp"

using namespace artist;
using namespace artist::prompt;

namespace {

using T = SimplificationTechnique;

PromptTemplate two_exemplars(std::uint64_t seed) {
  const auto all = corpus::exemplars();
  return {default_preamble(), {all[0], all[9]}, seed};
}

std::vector<std::string> blocks(const std::string& prompt) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  for (;;) {
    const auto next = prompt.find(kBlockSeparator, pos);
    out.push_back(prompt.substr(pos, next == std::string::npos ? next : next - pos));
    if (next == std::string::npos) return out;
    pos = next + kBlockSeparator.size();
  }
}

const char* kDumbbellPlan =
    "The sentence joins several phrases and is too long for the display.\n"
    "PLAN:\n"
    "1. syntactic simplification: split at first 'and'\n"
    "2. syntactic simplification: split at second 'and'\n"
    "3. syntactic simplification: adjust passive voice\n";

// Minimal chat/completions server answering with canned choices.
struct FakeLlm {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  int status = 200;
  int extra_choices = 0;
  std::vector<Json> bodies;
  std::vector<std::string> auth;
  std::mutex mutex;
  int counter = 0;

  FakeLlm() {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      std::lock_guard lock(mutex);
      const auto body = Json::parse(req.body);
      bodies.push_back(body);
      auth.push_back(req.get_header_value("Authorization"));
      Json choices = Json::array();
      const int n = body.at("n").get<int>() + extra_choices;
      for (int i = 0; i < n; ++i) {
        const int k = counter++;
        choices.push_back({{"index", i},
                           {"message", {{"role", "assistant"}, {"content", "Pour water " + std::to_string(k)}}},
                           {"logprobs", {{"content", Json::array({{{"token", "a"}, {"logprob", -0.5}},
                                                                   {{"token", "b"}, {"logprob", -0.5}}})}}}});
      }
      res.status = status;
      res.set_content(Json{{"choices", choices}}.dump(), "application/json");
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeLlm() {
    server.stop();
    thread.join();
  }
  HttpBackendConfig config() const {
    HttpBackendConfig c;
    c.base_url = "http://127.0.0.1:" + std::to_string(port);
    c.model = "test-model";
    c.api_key = "sk-test";
    c.timeout = std::chrono::seconds(5);
    return c;
  }
};

}  // namespace

TEST_CASE("plan prompt layout") {
  const auto tmpl = two_exemplars(1);
  const auto prompt = build_plan_prompt(corpus::dumbbell_original(), std::nullopt, tmpl);
  const auto parts = blocks(prompt);
  REQUIRE(parts.size() == 4);
  CHECK(parts[0] == default_preamble());
  CHECK(parts.back() == "INPUT: " + corpus::dumbbell_original() + "\nTHOUGHTS:");
  for (std::size_t i = 1; i <= 2; ++i) {
    const auto& b = parts[i];
    const auto in = b.find("INPUT:"), th = b.find("THOUGHTS:"), pl = b.find("PLAN:"), out = b.find("OUTPUT:");
    CHECK(in < th);
    CHECK(th < pl);
    CHECK(pl < out);
  }
  CHECK(build_plan_prompt(corpus::dumbbell_original(), std::nullopt, tmpl) == prompt);
  CHECK_THROWS_AS(build_plan_prompt("", std::nullopt, tmpl), std::invalid_argument);
  CHECK_THROWS_AS(build_plan_prompt("x", std::nullopt, PromptTemplate{"p", {}, 0}), std::invalid_argument);
}

TEST_CASE("spatial summary goes into the query block") {
  const SpatialContext ctx({{"coffee mug", 45.0, 0.5, std::nullopt, 0.9}}, Timestamp{}, true);
  const auto prompt = build_plan_prompt("Fill the coffee mug.", ctx, two_exemplars(1));
  CHECK(blocks(prompt).back() ==
        "INPUT: Fill the coffee mug.\nSPATIAL: coffee mug: on your right\nTHOUGHTS:");
}

TEST_CASE("exemplar order depends only on the seed") {
  std::uint64_t other = 2;
  while (exemplar_order(two_exemplars(1)) == exemplar_order(two_exemplars(other))) ++other;
  const auto a = blocks(build_plan_prompt("Pour the water.", std::nullopt, two_exemplars(1)));
  const auto b = blocks(build_plan_prompt("Pour the water.", std::nullopt, two_exemplars(other)));
  CHECK(a != b);
  CHECK(a.front() == b.front());
  CHECK(a.back() == b.back());
  auto sa = a, sb = b;
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  CHECK(sa == sb);

  auto order = exemplar_order(corpus::default_template());
  std::sort(order.begin(), order.end());
  for (std::size_t i = 0; i < order.size(); ++i) CHECK(order[i] == i);
}

TEST_CASE("plan parsing") {
  SUBCASE("the dumbbell plan") {
    const auto plan = parse_plan(kDumbbellPlan);
    REQUIRE(plan.actions.size() == 3);
    for (const auto& a : plan.actions) CHECK(a.technique == T::SyntacticSimplification);
    CHECK(plan.actions[2].description == "adjust passive voice");
    CHECK(plan.thoughts.starts_with("The sentence joins"));
  }
  SUBCASE("actions written on one line") {
    const auto plan = parse_plan(
        "PLAN: 1. syntactic simplification: split at first 'and' 2. syntactic simplification: "
        "split at second 'and' 3. syntactic simplification: adjust passive voice");
    REQUIRE(plan.actions.size() == 3);
    CHECK(plan.actions[0].description == "split at first 'and'");
    CHECK(plan.actions[1].description == "split at second 'and'");
  }
  SUBCASE("no changes") {
    CHECK(parse_plan("THOUGHTS: fine as is\nPLAN:\nno changes needed").actions.empty());
    CHECK(parse_plan("PLAN: No changes needed.").actions.empty());
  }
  SUBCASE("technique spellings") {
    const auto plan = parse_plan(
        "PLAN:\n1. content reduction: a\n2) Lexical_Simplification: b\n- A4: c\n"
        "4. syntactic simplification (A2): d\nOUTPUT: ignored");
    REQUIRE(plan.actions.size() == 4);
    CHECK(plan.actions[0].technique == T::ContentReduction);
    CHECK(plan.actions[1].technique == T::LexicalSimplification);
    CHECK(plan.actions[2].technique == T::ElaborativeSimplification);
    CHECK(plan.actions[3].technique == T::SyntacticSimplification);
  }
  SUBCASE("unknown technique is an error, not dropped") {
    try {
      parse_plan("PLAN:\n1. content reduction: a\n2. summarization: b");
      FAIL("expected UnknownTechnique");
    } catch (const UnknownTechnique& e) {
      CHECK(e.name() == "summarization");
    }
  }
  SUBCASE("malformed") {
    CHECK_THROWS_AS(parse_plan("just some text"), MalformedPlan);
    CHECK_THROWS_AS(parse_plan("PLAN:\ncontent reduction without number"), MalformedPlan);
    CHECK_THROWS_AS(parse_plan("PLAN:\n1. content reduction"), MalformedPlan);
  }
}

TEST_CASE("output parsing and raw probability") {
  CHECK(parse_output("  Pour water.\n") == "Pour water.");
  CHECK(parse_output("OUTPUT: Pour water.\n---\nINPUT: more") == "Pour water.");
  CHECK(raw_probability({"x", std::vector<double>{-0.5, -0.5}}, 5) == doctest::Approx(0.6065).epsilon(1e-4));
  CHECK(raw_probability({"x", std::vector<double>{-0.2, -0.4}}, 5) == doctest::Approx(std::exp(-0.3)));
  CHECK(raw_probability({"x", std::nullopt}, 4) == doctest::Approx(0.25));
}

TEST_CASE("candidate generation") {
  const auto tmpl = two_exemplars(1);
  const SimplificationPlan plan{"t", {{T::ContentReduction, "drop words"}}};
  std::vector<LlmCompletion> script;
  for (int i = 0; i < 5; ++i) script.push_back({"cand " + std::to_string(i), std::vector<double>{-0.5, -0.5}});
  ScriptedBackend backend(script);

  const auto set = generate_candidates("Pour the water.", plan, std::nullopt, tmpl, backend, 5);
  REQUIRE(set.candidates.size() == 5);
  CHECK(set.n == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(set.candidates[i].candidate_index == i);
    CHECK(set.candidates[i].text == "cand " + std::to_string(i));
    CHECK(set.candidates[i].raw_probability == doctest::Approx(0.6065).epsilon(1e-4));
  }
  const auto req = backend.requests().at(0);
  CHECK(req.sample_count == 5);
  CHECK(req.temperature == 0.7);
  CHECK(req.prompt.find(render_plan(plan)) != std::string::npos);

  backend.reset();
  const auto one = generate_candidates("Pour the water.", plan, std::nullopt, tmpl, backend, 1);
  CHECK(one.candidates.size() == 1);

  backend.short_next_response();
  CHECK_THROWS_AS(generate_candidates("Pour the water.", plan, std::nullopt, tmpl, backend, 5),
                  BackendReturnedWrongCount);
  backend.set_unavailable(true);
  CHECK_THROWS_AS(generate_candidates("Pour the water.", plan, std::nullopt, tmpl, backend, 5),
                  BackendUnavailable);
}

TEST_CASE("plan then execute on the dumbbell example") {
  ScriptedBackend backend({{kDumbbellPlan, std::vector<double>{-0.1}},
                           {"OUTPUT: " + corpus::dumbbell_simplified(), std::vector<double>{-0.2, -0.2}}});
  const auto [plan, set] = simplify_plan_then_execute(corpus::dumbbell_original(), std::nullopt,
                                                      two_exemplars(3), backend, 1);
  CHECK(plan.actions.size() == 3);
  REQUIRE(set.candidates.size() == 1);
  CHECK(set.candidates[0].text ==
        "Grab a pair of 10 to 12 lb (4.5 to 5.4 kg) dumbbells. Lie on your back with your arms "
        "behind you. Extend your legs and raise them to a 45-degree angle.");

  const auto reqs = backend.requests();
  REQUIRE(reqs.size() == 2);
  CHECK(reqs[0].temperature == 0.0);
  CHECK(reqs[0].sample_count == 1);
  CHECK(reqs[0].prompt.ends_with("THOUGHTS:"));
  CHECK(reqs[1].prompt.find(render_plan(plan)) != std::string::npos);
  CHECK(reqs[1].prompt.ends_with("OUTPUT:"));
}

TEST_CASE("empty plan still runs the execution call") {
  ScriptedBackend backend({{"Already short.\nPLAN:\nno changes needed", std::nullopt},
                           {"Pour water.", std::nullopt}});
  const auto [plan, set] =
      simplify_plan_then_execute("Pour water.", std::nullopt, two_exemplars(3), backend, 1);
  CHECK(plan.actions.empty());
  CHECK(backend.call_count() == 2);
  CHECK(set.candidates[0].text == "Pour water.");
  CHECK(set.candidates[0].raw_probability == 1.0);
}

TEST_CASE("template files") {
  testing::TempDir dir;
  const auto tmpl = corpus::default_template();
  CHECK(parse_template(serialize_template(tmpl)) == tmpl);
  save_template(tmpl, dir.path() / "template.txt");
  CHECK(load_template(dir.path() / "template.txt") == tmpl);

  PromptTemplate all{default_preamble(), corpus::exemplars(), 99};
  CHECK(parse_template(serialize_template(all)) == all);
  CHECK_THROWS_AS(parse_template("=== seed ===\n1\n"), MalformedInput);
}

TEST_CASE("scripted backend fixture file") {
  testing::TempDir dir;
  const auto path = dir.path() / "fixture.json";
  {
    std::ofstream out(path);
    out << R"([{"text": "a", "token_logprobs": [-0.1]}, {"text": "b"}])";
  }
  auto backend = ScriptedBackend::from_file(path);
  const auto r = backend.complete({"p", 3, 0.7, 10});
  REQUIRE(r.size() == 3);
  CHECK(r[0].token_logprobs);
  CHECK_FALSE(r[1].token_logprobs);
  CHECK(r[2].text == "a");
}

TEST_CASE("OpenAI-compatible backend") {
  FakeLlm fake;
  HttpBackend backend(fake.config());
  const auto r = backend.complete({"hello", 3, 0.7, 64});
  REQUIRE(r.size() == 3);
  CHECK(r[0].text == "Pour water 0");
  CHECK(*r[0].token_logprobs == std::vector<double>{-0.5, -0.5});
  REQUIRE(fake.bodies.size() == 1);
  const auto& body = fake.bodies[0];
  CHECK(body["model"] == "test-model");
  CHECK(body["n"] == 3);
  CHECK(body["temperature"] == 0.7);
  CHECK(body["max_tokens"] == 64);
  CHECK(body["logprobs"] == true);
  CHECK(body["messages"][0]["content"] == "hello");
  CHECK(fake.auth[0] == "Bearer sk-test");

  SUBCASE("one call per sample gives the same shape") {
    auto cfg = fake.config();
    cfg.batch_samples = false;
    HttpBackend single(cfg);
    const auto s = single.complete({"hello", 3, 0.7, 64});
    CHECK(s.size() == 3);
    CHECK(fake.bodies.size() == 4);
    CHECK(fake.bodies.back()["n"] == 1);
  }
  SUBCASE("wrong sample count surfaces through generation") {
    fake.extra_choices = 1;
    CHECK_THROWS_AS(generate_candidates("Pour the water.", {}, std::nullopt, two_exemplars(1), backend, 2),
                    BackendReturnedWrongCount);
  }
  SUBCASE("server failure") {
    fake.status = 500;
    CHECK_THROWS_AS(backend.complete({"hello", 1, 0.0, 64}), BackendUnavailable);
  }
  SUBCASE("unreachable") {
    auto cfg = fake.config();
    cfg.base_url = "http://127.0.0.1:1";
    cfg.timeout = std::chrono::seconds(1);
    HttpBackend down(cfg);
    CHECK_THROWS_AS(down.complete({"hello", 1, 0.0, 64}), BackendUnavailable);
  }
}
