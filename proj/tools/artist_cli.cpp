#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "artist/config.hpp"
#include "artist/corpus.hpp"
#include "artist/errors.hpp"
#include "artist/pipeline.hpp"
#include "artist/service.hpp"

namespace fs = std::filesystem;
using namespace artist;

namespace {

constexpr int kOk = 0;
constexpr int kValidationFailed = 1;
constexpr int kOperationalError = 2;

Json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error("cannot write " + path.string());
}

ServiceConfig config_or_default(const std::string& path) {
  return path.empty() ? ServiceConfig{} : load_config(path);
}

int cmd_serve(const std::string& config_path) {
  const auto config = load_config(config_path);
  Service service(config);
  std::cerr << "listening on " << config.host << ":" << config.port << "\n";
  return service.run() ? kOk : kOperationalError;
}

int cmd_simplify(const std::string& manual_path, const std::string& backend_kind,
                 const std::string& out_path, const std::string& config_path,
                 const std::string& fixture_path) {
  auto config = config_or_default(config_path);
  const auto doc = decode<ManualDocument>(read_json_file(manual_path));
  config.backend.kind = backend_kind;
  if (!fixture_path.empty()) config.backend.fixture = fixture_path;

  std::unique_ptr<LlmBackend> backend;
  if (backend_kind == "mock" && !config.backend.fixture) {
    backend = std::make_unique<ScriptedBackend>(corpus::fixture_for_manual(doc, config.n));
  } else {
    backend = make_backend(config.backend);
  }
  const auto classifier = make_classifier(config.classifier);
  const auto tmpl = load_template_or_default(config);
  const auto model = config.model_path && fs::exists(*config.model_path)
                         ? calib::load_model_file(*config.model_path, classifier->registry())
                         : calib::initial_model(classifier->registry());

  const pipeline::Settings settings{config.display_profile, config.meaning_threshold, config.n,
                                    config.sampling};
  const auto outcome =
      pipeline::simplify_manual(doc, std::nullopt, {tmpl, *backend, *classifier, model}, settings);
  write_file(out_path, Json(outcome).dump(2) + "\n");

  int fallbacks = 0;
  for (const auto& step : outcome.steps) {
    std::cout << "step " << step.step_id << ": " << step.chosen_text
              << (step.fallback_to_original() ? "   [no candidate passed validation]" : "") << "\n";
    if (step.fallback_to_original()) ++fallbacks;
  }
  return fallbacks > 0 ? kValidationFailed : kOk;
}

int cmd_train(const std::string& gold_path, const std::string& out_path,
              const std::string& config_path) {
  const auto config = config_or_default(config_path);
  const auto gold = calib::load_gold_file(gold_path);
  const auto classifier = make_classifier(config.classifier);
  auto result = calib::train(gold, *classifier, config.train_config());
  if (fs::exists(out_path)) {
    try {
      result.model.version = calib::load_model_file(out_path, classifier->registry()).version + 1;
    } catch (const Error&) {
    }
  }
  calib::save_model_file(result.model, out_path);

  const auto features = calib::featurize(gold, *classifier);
  std::vector<double> labels;
  for (const auto& s : gold.samples) labels.push_back(s.verdict);
  std::cout << "trained on " << gold.k() << " samples, loss " << result.loss_history.front()
            << " -> " << result.loss_history.back() << ", verdict accuracy "
            << calib::verdict_accuracy(result.model, features, labels) << "\n";
  if (result.degenerate) std::cout << "warning: only one verdict class present\n";
  return kOk;
}

int cmd_validate(const std::string& manual_path, const std::string& profile_path,
                 const std::string& config_path) {
  const auto config = config_or_default(config_path);
  const auto doc = decode<ManualDocument>(read_json_file(manual_path));
  const auto profile = profile_path.empty()
                           ? config.display_profile
                           : decode<validate::DisplayProfile>(read_json_file(profile_path));
  const auto classifier = make_classifier(config.classifier);
  const auto glossary = glossary_of(doc);

  Json reports = Json::array();
  bool all_passed = true;
  for (const auto& step : doc.steps) {
    if (!step.simplified_text) continue;
    const auto report =
        validate::validate(step.original_text, *step.simplified_text, profile, glossary,
                           *classifier, std::to_string(step.step_id), config.meaning_threshold);
    all_passed = all_passed && report.passed();
    reports.push_back(report);
  }
  std::cout << Json{{"manual_id", doc.manual_id}, {"reports", reports}}.dump(2) << "\n";
  return all_passed ? kOk : kValidationFailed;
}

int cmd_seed(const std::string& store_dir) {
  const std::vector<ManualDocument> manuals = {corpus::coffee_manual(), corpus::meeting_manual()};
  if (store_dir.empty()) {
    Json out{{"manuals", manuals},
             {"gold", corpus::seed_gold().samples},
             {"template", prompt::serialize_template(corpus::default_template())}};
    std::cout << out.dump(2) << "\n";
    return kOk;
  }
  store::ManualStore store(store_dir);
  for (const auto& doc : manuals) {
    const auto ids = store.manual_ids();
    if (std::find(ids.begin(), ids.end(), doc.manual_id) == ids.end()) {
      store.create_manual(doc);
      std::cout << "created manual " << doc.manual_id << "\n";
    }
    write_file(fs::path(store_dir) / "fixtures" / (doc.manual_id + ".json"),
               Json(corpus::fixture_for_manual(doc)).dump(2) + "\n");
  }
  if (store.load_gold().k() == 0) {
    for (const auto& s : corpus::seed_gold().samples) store.append_gold(s);
    std::cout << "seeded " << corpus::seed_gold().k() << " gold samples\n";
  }
  prompt::save_template(corpus::default_template(), fs::path(store_dir) / "template.txt");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"artist: instruction simplification for AR task guidance"};
  app.require_subcommand(1);

  std::string config_path, manual_path, backend_kind = "mock", out_path, fixture_path, gold_path,
                                        profile_path, store_dir;

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", config_path, "Service config (JSON)")->required();

  auto* simplify = app.add_subcommand("simplify", "Simplify every step of a manual file");
  simplify->add_option("--manual", manual_path, "Manual document (JSON)")->required();
  simplify->add_option("--backend", backend_kind, "mock or http")
      ->check(CLI::IsMember({"mock", "http"}));
  simplify->add_option("--out", out_path, "Where to write the result")->required();
  simplify->add_option("--config", config_path, "Service config (JSON)");
  simplify->add_option("--fixture", fixture_path, "Mock response fixture");

  auto* train = app.add_subcommand("train", "Train the calibration model from gold samples");
  train->add_option("--gold", gold_path, "Gold samples (JSON lines)")->required();
  train->add_option("--out", out_path, "Model file to write")->required();
  train->add_option("--config", config_path, "Service config (JSON)");

  auto* validate_cmd = app.add_subcommand("validate", "Validate a manual's simplified steps");
  validate_cmd->add_option("--manual", manual_path, "Manual document (JSON)")->required();
  validate_cmd->add_option("--profile", profile_path, "Display profile (JSON)");
  validate_cmd->add_option("--config", config_path, "Service config (JSON)");

  auto* seed = app.add_subcommand("seed", "Load the bundled example corpus");
  bool examples = false;
  seed->add_flag("--examples", examples, "Use the bundled coffee and meeting-room corpus")
      ->required();
  seed->add_option("--store", store_dir, "Store directory to populate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kOperationalError;
  }

  try {
    if (*serve) return cmd_serve(config_path);
    if (*simplify) return cmd_simplify(manual_path, backend_kind, out_path, config_path, fixture_path);
    if (*train) return cmd_train(gold_path, out_path, config_path);
    if (*validate_cmd) return cmd_validate(manual_path, profile_path, config_path);
    if (*seed) return cmd_seed(store_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kOperationalError;
  }
  return kOperationalError;
}
