#include "artist/corpus.hpp"

#include <set>

#include "artist/text_util.hpp"

namespace artist::corpus {

namespace {

using T = SimplificationTechnique;

struct PlanSpec {
  std::string thoughts;
  std::vector<PlanAction> actions;
  std::optional<std::string> spatial;
};

// Reasoning and technique plan for each step pair, same order as step_pairs().
const std::vector<PlanSpec>& plan_specs() {
  static const std::vector<PlanSpec> specs = {
      // coffee
      {"The opening clause and the adverbs add nothing to the action. The dripper is "
       "detected on the left.",
       {{T::ContentReduction, "remove 'To create a coffee, first please carefully'"},
        {T::ContentReduction, "remove 'pour-over' and the articles"},
        {T::ElaborativeSimplification, "add the dripper's location"}},
       "dripper: on your left; coffee mug: in front of you"},
      {"Two sentences with repeated shape descriptions are too long for the display.",
       {{T::ContentReduction, "drop the semi-circle and quarter-circle explanations"},
        {T::SyntacticSimplification, "join the folding actions with 'then'"},
        {T::LexicalSimplification, "replace 'spread open to create a cone' with 'form cone shape'"}},
       std::nullopt},
      {"Four sentences repeat the rinsing goal; only the action and its purpose matter.",
       {{T::ContentReduction, "remove the moisture and taste explanations"},
        {T::SyntacticSimplification, "merge pouring and rinsing into one sentence"}},
       std::nullopt},
      {"The step chains three actions over two sentences.",
       {{T::LexicalSimplification, "replace 'lift up' with 'remove'"},
        {T::SyntacticSimplification, "list the three actions in one sentence"},
        {T::ContentReduction, "drop 'with the wet filter'"}},
       std::nullopt},
      {"The quantity is stated twice. The scale and the grinder are detected on the right.",
       {{T::ContentReduction, "state the 30 g measure once"},
        {T::ElaborativeSimplification, "add the locations of the scale and the grinder"}},
       "digital scale: on your right; grinder: on your right"},
      {"The duration is the key information and is buried at the end.",
       {{T::SyntacticSimplification, "move the duration next to the action"},
        {T::ContentReduction, "drop 'the coffee grounds are the consistency of'"}},
       std::nullopt},
      {"Two actions, each with extra articles.",
       {{T::LexicalSimplification, "replace 'transfer' with 'move'"},
        {T::ContentReduction, "remove articles and 'digital'"},
        {T::SyntacticSimplification, "turn 'set it to zero' into 'zero it'"}},
       std::nullopt},
      {"Three sentences; the stop condition can close the pouring sentence.",
       {{T::ContentReduction, "drop the overfill warning that the stop condition covers"},
        {T::SyntacticSimplification, "attach the 100 g stop condition to the pouring action"}},
       std::nullopt},
      {"The ending clause is wordy.",
       {{T::ContentReduction, "remove 'completely' and 'you can complete the task'"},
        {T::LexicalSimplification, "replace the closing clause with 'to end'"}},
       std::nullopt},
      // meeting room
      {"The opening clause only sets context.",
       {{T::ContentReduction, "remove 'Before arranging the meeting room, take a moment to'"},
        {T::LexicalSimplification, "replace 'anything that's not necessary' with 'the unnecessary items'"}},
       std::nullopt},
      {"The purpose clause at the end is not needed to act.",
       {{T::ContentReduction, "drop 'Once the desk is clear' and the purpose clause"},
        {T::LexicalSimplification, "refer to the power strip as 'it'"}},
       std::nullopt},
      {"Two actions joined by 'and' with a long position description.",
       {{T::ContentReduction, "drop 'the camera's charger' detail"},
        {T::SyntacticSimplification, "describe the position as 'facing opposite of TV'"}},
       std::nullopt},
      {"Counts and spacing are important; the spacing can be shown with a reference object.",
       {{T::SyntacticSimplification, "split the arrangement into short labelled parts"},
        {T::ElaborativeSimplification, "express the spacing with the length of A4 papers"},
        {T::ContentReduction, "drop 'Make sure that'"}},
       std::nullopt},
      {"The second sentence repeats the first.",
       {{T::ContentReduction, "remove the repeated per-person sentence"},
        {T::LexicalSimplification, "name the items as 'water, paper'"}},
       std::nullopt},
      {"The seating order is essential and must stay complete.",
       {{T::SyntacticSimplification, "use labelled lists for each side"},
        {T::ContentReduction, "drop the conditional wording"}},
       std::nullopt},
      {"The reason for the placement is not needed to act.",
       {{T::ContentReduction, "remove the VIP explanation"},
        {T::LexicalSimplification, "replace 'putting ... to' with 'place ... at'"}},
       std::nullopt},
  };
  return specs;
}

const std::set<std::string>& filler_words() {
  static const std::set<std::string> words = {"the", "a", "an", "please", "carefully", "first",
                                              "then", "just", "really", "very", "completely"};
  return words;
}

std::string first_words(const std::string& s, std::size_t count) {
  const auto spans = text::word_spans(s);
  if (spans.size() <= count) return s;
  return s.substr(spans.front().begin, spans[count - 1].end - spans.front().begin) + ".";
}

ManualDocument manual_from_pairs(const std::string& task, std::string id, std::string title,
                                 std::set<std::string> tags) {
  ManualDocument doc;
  doc.manual_id = std::move(id);
  doc.title = std::move(title);
  doc.tags = std::move(tags);
  for (const auto& p : step_pairs()) {
    if (p.task != task) continue;
    ManualStep step;
    step.step_id = p.step;
    step.original_text = p.original;
    doc.steps.push_back(std::move(step));
  }
  return doc;
}

}  // namespace

const std::vector<StepPair>& step_pairs() {
  static const std::vector<StepPair> pairs = {
      {"coffee", 1,
       "To create a coffee, first please carefully place the pour-over dripper over the coffee mug.",
       "Place dripper (on your left) on coffee mug."},
      {"coffee", 2,
       "Prepare the filter insert by folding the paper filter in half to create a semi-circle, and "
       "in half again to create a quarter-circle. Place the paper filter in the dripper and spread "
       "open to create a cone.",
       "Fold paper filter in half, then half again. Put filter in dripper, form cone shape."},
      {"coffee", 3,
       "Rinse the filter. Pour enough hot water into the filter to wet it. The entire paper filter "
       "should be moist. Rinsing the filter will remove any papery residue so your coffee doesn't "
       "have a woodsy taste.",
       "Wet filter with water to rinse away residue."},
      {"coffee", 4,
       "Lift up the dripper and pour out the water. Then set the dripper with the wet filter back "
       "on the coffee mug.",
       "Remove dripper, pour out water, and return dripper to coffee mug."},
      {"coffee", 5,
       "Get out a digital scale and measure out 3 tablespoons (about 30 g) of coffee beans. "
       "Measure out 30 g of whole beans and place them in your grinder.",
       "Measure 30g coffee beans on a digital scale (right side), place in grinder (right side)."},
      {"coffee", 6,
       "Grind the beans until the coffee grounds are the consistency of coarse sand, about 20 "
       "seconds.",
       "Grind beans for 20 seconds, until coarse sand consistency."},
      {"coffee", 7,
       "Transfer the coffee grounds to the filter cone. Then place the coffee mug with the dripper "
       "on a digital scale and set it to zero.",
       "Move grounds to filter cone. Set coffee mug with dripper on scale, zero it."},
      {"coffee", 8,
       "Slowly pour the water over the grounds in a circular motion. Do not overfill beyond the "
       "top of the paper filter. Your scale should read 100 g once you've poured enough water into "
       "the dripper.",
       "Slowly pour water in circles over grounds, stopping at 100g on scale."},
      {"coffee", 9,
       "Let the coffee drain completely into the mug and wait for 30 seconds and you can complete "
       "the task;",
       "Drain coffee into mug and wait for 30 seconds to end."},
      {"meeting", 1,
       "Before arranging the meeting room, take a moment to tidy up the desk and move anything "
       "that's not necessary to other desks;",
       "Tidy desk, move the unnecessary items to other desks."},
      {"meeting", 2,
       "Once the desk is clear, bring the power strip on the desk and connect the Charger to the "
       "power strip so the meeting attendants can use.",
       "Put power strip on desk, connect phone charger to it."},
      {"meeting", 3,
       "Connect the camera's charger to the power strip and position the camera at the opposite "
       "end of the desk from the TV.",
       "Connect camera to strip, facing opposite of TV."},
      {"meeting", 4,
       "Arrange the chairs in the meeting room. Make sure that there's enough space between each "
       "chair - roughly 1.5 feet should suffice. Position one chair on the window side, and place "
       "five chairs on the other side.",
       "Arrange chairs on two sides. Leave space of roughly two A4 papers' length apart. Window "
       "side: 1 chair. Other side: 5 chairs."},
      {"meeting", 5,
       "Next, place cups of water and papers on each chair. Each person should have one cup of "
       "water and paper;",
       "Place water, paper onto desk in front of chairs."},
      {"meeting", 6,
       "Put up the desk nameplates on on each chair. When Alice is on the side of the window, "
       "other desk nameplates should be put on the other side. The sequence is Bob, Amy, Andy, "
       "Dave and Luis.",
       "Place nameplates: Window side: Alice (window); sequence (left to right) on other side: "
       "Bob, Amy, Andy, Dave, Luis."},
      {"meeting", 7,
       "Since Alice is the VIP in the meeting, place make it clearly by putting the remote "
       "controller to Alice’s position.",
       "Place remote controller at Alice’s position on desk."},
  };
  return pairs;
}

const std::string& dumbbell_original() {
  static const std::string s =
      "Grab a pair of 10 to 12 lb (4.5 to 5.4 kg) dumbbells and lie on your back with your arms "
      "behind you and your legs extended and raised to a 45-degree angle";
  return s;
}

const std::string& dumbbell_simplified() {
  static const std::string s =
      "Grab a pair of 10 to 12 lb (4.5 to 5.4 kg) dumbbells. Lie on your back with your arms "
      "behind you. Extend your legs and raise them to a 45-degree angle.";
  return s;
}

prompt::Exemplar dumbbell_exemplar() {
  prompt::Exemplar ex;
  ex.input_text = dumbbell_original();
  ex.thoughts =
      "The sentence is too long to read at a glance in AR and joins more than three phrases, so "
      "it needs syntactic simplification.";
  ex.plan.thoughts = ex.thoughts;
  ex.plan.actions = {
      {T::SyntacticSimplification,
       "split the sentence at the first 'and' because the two joined clauses are too long"},
      {T::SyntacticSimplification, "split the sentence at the second 'and' for the same reason"},
      {T::SyntacticSimplification,
       "rewrite the passive 'your legs extended and raised' as an instruction"},
  };
  ex.output_text = dumbbell_simplified();
  return ex;
}

std::vector<prompt::Exemplar> exemplars() {
  std::vector<prompt::Exemplar> out;
  const auto& pairs = step_pairs();
  const auto& specs = plan_specs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    prompt::Exemplar ex;
    ex.input_text = pairs[i].original;
    ex.spatial_context_summary = specs[i].spatial;
    ex.thoughts = specs[i].thoughts;
    ex.plan = SimplificationPlan{specs[i].thoughts, specs[i].actions};
    ex.output_text = pairs[i].simplified;
    out.push_back(std::move(ex));
  }
  out.push_back(dumbbell_exemplar());
  return out;
}

prompt::PromptTemplate default_template() {
  prompt::PromptTemplate tmpl;
  tmpl.system_preamble = prompt::default_preamble();
  tmpl.exemplar_order_seed = 7;
  const auto all = exemplars();
  const auto& pairs = step_pairs();
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (pairs[i].task == "meeting") tmpl.exemplars.push_back(all[i]);
  }
  tmpl.exemplars.push_back(all.back());
  return tmpl;
}

ManualDocument coffee_manual() {
  return manual_from_pairs("coffee", "pour-over-coffee", "Pour-over coffee",
                           {"coffee", "kitchen", "term:grinder", "term:mug", "term:scale"});
}

ManualDocument meeting_manual() {
  return manual_from_pairs("meeting", "meeting-room-setup", "Meeting room setup",
                           {"meeting", "office", "term:alice", "term:camera", "term:nameplates"});
}

std::string drop_filler_words(const std::string& text) {
  std::string out;
  std::size_t pos = 0;
  for (const auto& span : text::word_spans(text)) {
    const std::string word = text.substr(span.begin, span.end - span.begin);
    if (!filler_words().contains(text::to_lower(word))) continue;
    out += text.substr(pos, span.begin - pos);
    pos = span.end;
    // swallow one following space so words do not end up double-spaced
    if (pos < text.size() && text[pos] == ' ') ++pos;
  }
  out += text.substr(pos);
  // a sentence that started with a dropped word: restore the capital
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (i == 0 || (i >= 2 && out[i - 1] == ' ' && out[i - 2] == '.')) {
      out[i] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[i])));
    }
  }
  return out;
}

std::vector<LlmCompletion> fixture_for_manual(const ManualDocument& doc, int n) {
  const auto all = exemplars();
  std::vector<LlmCompletion> out;
  for (const auto& step : doc.steps) {
    const prompt::Exemplar* ex = nullptr;
    for (const auto& e : all) {
      if (e.input_text == step.original_text) ex = &e;
    }

    SimplificationPlan plan;
    std::string reference;
    if (ex) {
      plan = SimplificationPlan{ex->thoughts, ex->plan.actions};
      reference = ex->output_text;
    } else {
      plan.thoughts = "Filler words can go without changing the action.";
      plan.actions = {{T::ContentReduction, "remove filler words"}};
      reference = drop_filler_words(step.original_text);
    }
    // The plan prompt ends with "THOUGHTS:", so the completion continues it.
    std::string plan_text = prompt::render_plan(plan);
    out.push_back({plan_text.substr(std::string("THOUGHTS: ").size()),
                   std::vector<double>{-0.05, -0.1}});

    const std::vector<LlmCompletion> variants = {
        {reference, std::vector<double>{-0.2, -0.3, -0.25}},
        {drop_filler_words(step.original_text), std::vector<double>{-0.4, -0.45}},
        {first_words(reference, 3), std::vector<double>{-0.9, -1.1}},
        {step.original_text + " Take your time.", std::vector<double>{-0.7, -0.6}},
        {step.original_text, std::vector<double>{-0.5, -0.55}},
    };
    for (int i = 0; i < n; ++i) {
      out.push_back(variants[static_cast<std::size_t>(i) % variants.size()]);
    }
  }
  return out;
}

calib::GoldDataset seed_gold() {
  calib::GoldDataset d;
  for (const auto& p : step_pairs()) {
    d.samples.push_back({p.original, p.simplified, 1, std::nullopt, calib::GoldSource::Seeded,
                         std::nullopt});
  }
  for (const auto& p : step_pairs()) {
    d.samples.push_back({p.original, first_words(p.simplified, 2), 0, ErrorClass::MeaningAltered,
                         calib::GoldSource::Seeded, std::nullopt});
  }
  for (const auto& p : step_pairs()) {
    d.samples.push_back({p.original, p.original + " Please make sure you do this carefully.", 0,
                         ErrorClass::TooLong, calib::GoldSource::Seeded, std::nullopt});
  }
  for (const auto& p : step_pairs()) {
    std::string tail = p.simplified;
    tail[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(tail[0])));
    d.samples.push_back({p.original,
                         "Once you are ready and if the area is clear, while you wait, " + tail, 0,
                         ErrorClass::SyntacticallyComplex, calib::GoldSource::Seeded,
                         std::nullopt});
  }
  return d;
}

}  // namespace artist::corpus
