#include "artist/pipeline.hpp"

#include "artist/spatial.hpp"

namespace artist::pipeline {

void to_json(Json& j, const StepOutcome& s) {
  j = Json{{"step_id", s.step_id},
           {"plan", s.plan},
           {"candidates", s.candidates},
           {"eligible", s.eligible},
           {"reports", s.reports},
           {"chosen_text", s.chosen_text},
           {"fallback_to_original", s.fallback_to_original()}};
  if (s.chosen_index) j["chosen_index"] = *s.chosen_index;
}

void to_json(Json& j, const ManualOutcome& m) {
  j = Json{{"manual_id", m.manual_id}, {"model_version", m.model_version}, {"steps", m.steps}};
}

std::string elaborate(std::string_view text, const std::optional<SpatialContext>& context) {
  if (!context || context->objects().empty()) return std::string(text);
  return spatial::substitute_measures(spatial::elaborate_locations(text, *context), *context);
}

StepOutcome simplify_step(const ManualStep& step, const std::set<std::string>& glossary,
                          const std::optional<SpatialContext>& context, const Components& parts,
                          const Settings& settings) {
  StepOutcome out;
  out.step_id = step.step_id;
  auto [plan, set] = prompt::simplify_plan_then_execute(step.original_text, context, parts.tmpl,
                                                        parts.backend, settings.n,
                                                        settings.sampling);
  out.plan = std::move(plan);

  for (auto& c : set.candidates) {
    c.error_probs = parts.classifier.classify(step.original_text, c.text);
  }
  out.candidates = calib::calibrate(std::move(set), parts.model);

  for (const auto& c : out.candidates.candidates) {
    auto report = validate::validate(step.original_text, c.text, settings.profile, glossary,
                                     parts.classifier,
                                     std::to_string(step.step_id) + ":" +
                                         std::to_string(c.candidate_index),
                                     settings.meaning_threshold);
    out.eligible.push_back(report.passed());
    out.reports.push_back(std::move(report));
  }

  const auto chosen = calib::select_eligible(out.candidates, out.eligible);
  if (chosen) {
    out.chosen_index = chosen->candidate_index;
    out.chosen_text = elaborate(chosen->text, context);
  } else {
    out.chosen_text = elaborate(step.original_text, context);
  }
  return out;
}

ManualOutcome simplify_manual(const ManualDocument& doc, const std::optional<SpatialContext>& context,
                              const Components& parts, const Settings& settings) {
  ManualOutcome out;
  out.manual_id = doc.manual_id;
  out.model_version = parts.model.version;
  const auto glossary = glossary_of(doc);
  for (const auto& step : doc.steps) {
    const auto& ctx = step.spatial_snapshot ? step.spatial_snapshot : context;
    out.steps.push_back(simplify_step(step, glossary, ctx, parts, settings));
  }
  return out;
}

ManualDocument apply(ManualDocument doc, const ManualOutcome& outcome,
                     const std::optional<SpatialContext>& context) {
  for (std::size_t i = 0; i < doc.steps.size() && i < outcome.steps.size(); ++i) {
    auto& step = doc.steps[i];
    const auto& o = outcome.steps[i];
    step.simplified_text = o.chosen_index
                               ? o.candidates.candidates.at(static_cast<std::size_t>(*o.chosen_index)).text
                               : step.original_text;
    step.status = StepStatus::Simplified;
    if (!step.spatial_snapshot && context) step.spatial_snapshot = context->frozen_copy();
  }
  return doc;
}

}  // namespace artist::pipeline
