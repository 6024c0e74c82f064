#include <doctest.h>

#include <thread>

#include "artist/core_types.hpp"
#include "artist/errors.hpp"
#include "artist/spatial.hpp"
#include "artist/text_util.hpp"
#include "test_support.hpp"

using namespace artist;
using namespace artist::spatial;

namespace {

DetectedObject obj(std::string label, double azimuth, std::optional<double> length = std::nullopt,
                   double confidence = 0.9) {
  return {std::move(label), azimuth, 1.0, length, confidence};
}

SpatialContext frozen(std::vector<DetectedObject> objects) {
  return SpatialContext(std::move(objects), parse_timestamp("2024-05-01T10:00:00Z"), true);
}

bool is_subsequence(const std::vector<std::string>& needle, const std::vector<std::string>& hay) {
  std::size_t i = 0;
  for (const auto& w : hay) {
    if (i < needle.size() && needle[i] == w) ++i;
  }
  return i == needle.size();
}

}  // namespace

TEST_CASE("character counting is per code point") {
  CHECK(text::char_length("Alice’s") == 7);
  CHECK(text::char_length("") == 0);
  CHECK(text::char_length("abc") == 3);
}

TEST_CASE("word helpers") {
  CHECK(text::words("Rinse the filter, doesn't it?") ==
        std::vector<std::string>{"rinse", "the", "filter", "doesn't", "it"});
  CHECK_FALSE(text::find_whole_word("two mugs here", "mug"));
  CHECK(text::find_whole_word("the Coffee Mug.", "coffee mug") == 4u);
  CHECK(text::find_whole_word("mug and mug", "mug", 1) == 8u);
  CHECK(text::split_lines("a\r\nb\nc").size() == 3);
}

TEST_CASE("relation boundaries") {
  CHECK(relation_of(obj("x", -20.0)) == SpatialRelation::InFrontOfYou);
  CHECK(relation_of(obj("x", 20.0)) == SpatialRelation::InFrontOfYou);
  CHECK(relation_of(obj("x", -20.001)) == SpatialRelation::OnYourLeft);
  CHECK(relation_of(obj("x", 20.001)) == SpatialRelation::OnYourRight);
  CHECK(relation_of(obj("x", -180.0)) == SpatialRelation::OnYourLeft);
  CHECK(relation_of(obj("x", 180.0)) == SpatialRelation::OnYourRight);
  CHECK(phrase(SpatialRelation::InFrontOfYou) == "in front of you");
}

TEST_CASE("location elaboration") {
  const auto ctx = frozen({obj("coffee mug", 45.0), obj("dripper", -60.0)});
  const std::string text = "Place the dripper on the coffee mug and fill the coffee mug.";
  const auto out = elaborate_locations(text, ctx);
  CHECK(out == "Place the dripper on your left on the coffee mug on your right and fill the coffee mug.");
  CHECK(elaborate_locations(out, ctx) == out);

  SUBCASE("labels absent from the text add nothing") {
    CHECK(elaborate_locations("Grind beans.", ctx) == "Grind beans.");
  }
  SUBCASE("low-confidence detections are ignored") {
    const auto weak = frozen({obj("coffee mug", 45.0, std::nullopt, 0.3)});
    CHECK(elaborate_locations("Fill the coffee mug.", weak) == "Fill the coffee mug.");
  }
  SUBCASE("unfrozen contexts are refused") {
    const SpatialContext live({obj("coffee mug", 45.0)}, Timestamp{}, false);
    CHECK_THROWS_AS(first_mentions("coffee mug", live), std::logic_error);
  }
  SUBCASE("whole words only") {
    const auto mug = frozen({obj("mug", 0.0)});
    CHECK(elaborate_locations("Wash the mugs.", mug) == "Wash the mugs.");
  }
}

TEST_CASE("elaboration never deletes words") {
  std::mt19937_64 rng(11);
  const auto ctx = frozen({obj("mug", 45.0, 0.1), obj("desk", -30.0), obj("scale", 5.0, 0.2)});
  for (int i = 0; i < 300; ++i) {
    const auto in = testing::random_words(rng, 1, 15);
    const auto out = substitute_measures(elaborate_locations(in, ctx), ctx);
    CHECK(is_subsequence(text::words(in), text::words(out)));
  }
}

TEST_CASE("measures") {
  const auto m = find_measures("Leave 1.5 feet between chairs and seven inches to the wall.");
  REQUIRE(m.size() == 2);
  CHECK(m[0].meters == doctest::Approx(1.5 * 0.3048));
  CHECK(m[1].meters == doctest::Approx(7 * 0.0254));
  CHECK(find_measures("about 30 g of beans").empty());
  CHECK(find_measures("20 cm")[0].meters == doctest::Approx(0.2));
}

TEST_CASE("measure substitution") {
  SUBCASE("the screwdriver example") {
    const auto ctx = frozen({obj("screwdriver", 0.0, 0.18)});
    CHECK(substitute_measures("Move the gear to seven inches left", ctx) ==
          "Move the gear to seven inches left, or the length of a screwdriver");
  }
  SUBCASE("nearest ratio wins") {
    // 10 cm against 11 cm (ratio 1.10) and 12 cm (ratio 1.20)
    const auto ctx = frozen({obj("spoon", 0.0, 0.12), obj("pen", 0.0, 0.11)});
    CHECK(substitute_measures("Cut 10 cm of tape.", ctx) == "Cut 10 cm of tape, or the length of a pen.");
  }
  SUBCASE("outside tolerance") {
    const auto ctx = frozen({obj("pen", 0.0, 0.13)});
    CHECK(substitute_measures("Cut 10 cm of tape.", ctx) == "Cut 10 cm of tape.");
  }
  SUBCASE("idempotent") {
    const auto ctx = frozen({obj("pen", 0.0, 0.1)});
    const auto once = substitute_measures("Cut 10 cm of tape.", ctx);
    CHECK(substitute_measures(once, ctx) == once);
  }
}

TEST_CASE("summary for prompts") {
  const auto ctx = frozen({obj("coffee mug", 45.0), obj("screwdriver", 0.0, 0.18)});
  const auto s = summarize(ctx);
  CHECK(s.find("coffee mug: on your right") != std::string::npos);
  CHECK(s.find("screwdriver: in front of you") != std::string::npos);
}

TEST_CASE("detection feed is last-write-wins and snapshots stay frozen") {
  DetectionFeed feed;
  feed.publish({obj("mug", 45.0)});
  const auto snap = feed.snapshot();
  CHECK(snap.frozen());
  feed.publish({obj("mug", -45.0)});
  CHECK(snap.objects().at(0).azimuth_deg == 45.0);
  CHECK(feed.latest().objects().at(0).azimuth_deg == -45.0);
  CHECK_FALSE(feed.latest().frozen());

  std::vector<std::thread> writers;
  for (int t = 0; t < 8; ++t) {
    writers.emplace_back([&feed, t] {
      for (int i = 0; i < 200; ++i) feed.publish({obj("mug", t)});
    });
  }
  for (auto& w : writers) w.join();
  const double az = feed.latest().objects().at(0).azimuth_deg;
  CHECK(az >= 0.0);
  CHECK(az <= 7.0);
}

TEST_CASE("detection validation") {
  CHECK_THROWS_AS(check_detection({"mug", 200.0, 1.0, std::nullopt, 0.9}), MalformedInput);
  CHECK_THROWS_AS(check_detection({"mug", 0.0, 1.0, std::nullopt, 1.5}), MalformedInput);
  CHECK_THROWS_AS(decode<DetectedObject>(Json{{"label", "mug"}}), MalformedInput);
}
