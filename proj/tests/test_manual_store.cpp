#include <doctest.h>

#include <latch>
#include <thread>

#include "artist/corpus.hpp"
#include "artist/errors.hpp"
#include "artist/manual_store.hpp"
#include "test_support.hpp"

using namespace artist;
using namespace artist::store;

namespace {

struct FakeClock {
  std::shared_ptr<std::atomic<long long>> seconds =
      std::make_shared<std::atomic<long long>>(1714557600);  // 2024-05-01T10:00:00Z
  Timestamp operator()() const { return Timestamp{std::chrono::seconds(seconds->fetch_add(60))}; }
};

}  // namespace

TEST_CASE("versions are immutable and survive a restart") {
  testing::TempDir dir;
  FakeClock clock;
  std::string id;
  {
    ManualStore store(dir.path(), clock);
    id = store.create_manual(corpus::coffee_manual());
    CHECK(id == "pour-over-coffee");

    auto doc = store.get_manual(id);
    CHECK(doc.version == 1);
    CHECK(doc.created_at == parse_timestamp("2024-05-01T10:00:00Z"));
    doc.steps[0].simplified_text = "Place dripper on coffee mug.";
    doc.steps[0].status = StepStatus::Simplified;
    CHECK(store.update_manual(id, doc) == 2);

    doc = store.get_manual(id);
    doc.title = "Pour-over coffee, revised";
    CHECK(store.update_manual(id, doc) == 3);
  }
  for (const auto& entry : std::filesystem::recursive_directory_iterator(dir.path())) {
    CHECK(entry.path().extension() != ".tmp");
  }

  ManualStore reopened(dir.path(), clock);
  const auto versions = reopened.list_versions(id);
  REQUIRE(versions.size() == 3);
  CHECK(versions[0].version == 1);
  CHECK(versions[2].version == 3);
  CHECK(versions[0].updated_at < versions[2].updated_at);

  const auto v1 = reopened.get_manual(id, 1);
  const auto v2 = reopened.get_manual(id, 2);
  const auto v3 = reopened.get_manual(id);
  CHECK_FALSE(v1.steps[0].simplified_text);
  CHECK(v2.steps[0].simplified_text == "Place dripper on coffee mug.");
  CHECK(v3.title == "Pour-over coffee, revised");
  CHECK(v3.version == 3);
  CHECK(v3.created_at == v1.created_at);
  auto expected_v1 = corpus::coffee_manual();
  CHECK(v1.steps == expected_v1.steps);
  CHECK(v1.tags == expected_v1.tags);
}

TEST_CASE("update conflicts and lookups") {
  testing::TempDir dir;
  ManualStore store(dir.path());
  const auto id = store.create_manual(corpus::meeting_manual());
  auto stale = store.get_manual(id);
  CHECK(store.update_manual(id, stale) == 2);
  CHECK_THROWS_AS(store.update_manual(id, stale), ConcurrentUpdateConflict);
  CHECK_THROWS_AS(store.get_manual(id, 7), NotFound);
  CHECK_THROWS_AS(store.get_manual("nope"), NotFound);
  CHECK_THROWS_AS(store.get_manual("../etc"), NotFound);
  CHECK_THROWS_AS(store.update_manual("nope", stale), NotFound);
  CHECK_THROWS_AS(store.create_manual(corpus::meeting_manual()), ConcurrentUpdateConflict);

  auto bad = corpus::meeting_manual();
  bad.manual_id = "bad id!";
  CHECK_THROWS_AS(store.create_manual(bad), MalformedInput);

  auto invalid = store.get_manual(id);
  invalid.steps[3].step_id = 9;
  CHECK_THROWS_AS(store.update_manual(id, invalid), InvalidManual);
  CHECK(store.list_versions(id).size() == 2);

  auto untitled = corpus::meeting_manual();
  untitled.manual_id.clear();
  CHECK(store.create_manual(untitled) == "meeting-room-setup-2");
}

TEST_CASE("concurrent updates from the same base: one wins, one conflicts") {
  testing::TempDir dir;
  ManualStore store(dir.path());
  const auto id = store.create_manual(corpus::coffee_manual());
  for (int round = 0; round < 20; ++round) {
    const auto base = store.get_manual(id);
    std::latch start(2);
    std::atomic<int> ok{0}, conflicts{0};
    auto writer = [&](std::string text) {
      auto doc = base;
      doc.steps[0].simplified_text = std::move(text);
      doc.steps[0].status = StepStatus::Simplified;
      start.arrive_and_wait();
      try {
        store.update_manual(id, doc);
        ++ok;
      } catch (const ConcurrentUpdateConflict&) {
        ++conflicts;
      }
    };
    std::thread a(writer, "A"), b(writer, "B");
    a.join();
    b.join();
    CHECK(ok == 1);
    CHECK(conflicts == 1);
    CHECK(store.get_manual(id).version == base.version + 1);
  }
}

TEST_CASE("search") {
  testing::TempDir dir;
  ManualStore store(dir.path());
  store.create_manual(corpus::coffee_manual());
  store.create_manual(corpus::meeting_manual());

  CHECK(store.search("").size() == 2);
  auto hits = store.search("GRINDER");
  REQUIRE(hits.size() == 1);
  CHECK(hits[0].manual_id == "pour-over-coffee");
  CHECK(hits[0].step_count == 9);
  CHECK(store.search("nameplates").at(0).manual_id == "meeting-room-setup");
  CHECK(store.search("office").size() == 1);
  CHECK(store.search("", {"coffee"}).size() == 1);
  CHECK(store.search("", {"coffee", "office"}).empty());
  CHECK(store.search("zebra").empty());
  CHECK(store.manual_ids() == std::vector<std::string>{"meeting-room-setup", "pour-over-coffee"});
}

TEST_CASE("gold samples append as JSON lines") {
  testing::TempDir dir;
  ManualStore store(dir.path());
  CHECK(store.load_gold().k() == 0);
  std::vector<std::thread> writers;
  for (int t = 0; t < 4; ++t) {
    writers.emplace_back([&store, t] {
      for (int i = 0; i < 25; ++i) {
        store.append_gold({"original " + std::to_string(t), "simplified " + std::to_string(i),
                           i % 2, i % 2 ? std::nullopt : std::optional(ErrorClass::TooLong),
                           calib::GoldSource::ExpertReview, std::nullopt});
      }
    });
  }
  for (auto& w : writers) w.join();
  CHECK(store.load_gold().k() == 100);
  CHECK_THROWS_AS(store.append_gold({"a", "b", 0, std::nullopt, calib::GoldSource::Seeded, std::nullopt}),
                  MalformedInput);
}
