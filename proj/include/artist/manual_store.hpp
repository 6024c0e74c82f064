#pragma once

#include <filesystem>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <vector>

#include "artist/calibration.hpp"
#include "artist/core_types.hpp"

namespace artist::store {

struct VersionInfo {
  int version = 0;
  Timestamp updated_at{};

  bool operator==(const VersionInfo&) const = default;
};

struct ManualSummary {
  std::string manual_id;
  std::string title;
  std::set<std::string> tags;
  int latest_version = 0;
  std::size_t step_count = 0;

  bool operator==(const ManualSummary&) const = default;
};

void to_json(Json& j, const VersionInfo& v);
void to_json(Json& j, const ManualSummary& s);

// Directory-backed, versioned manual repository:
//
//   <root>/manuals/<id>/v<N>.json   one immutable file per version
//   <root>/manuals/<id>/index.json  id, title, tags, version list
//   <root>/gold/samples.jsonl       gold samples, one per line
//
// Writes are serialized inside the store and land via write-then-rename, so
// readers only ever see committed versions.
class ManualStore {
 public:
  using Clock = std::function<Timestamp()>;

  explicit ManualStore(std::filesystem::path root, Clock clock = now_utc);

  // Stores `doc` as version 1. Uses doc.manual_id when set, otherwise derives
  // an id from the title. Returns the id.
  std::string create_manual(ManualDocument doc);

  // `doc.version` is the base version the caller edited; it must equal the
  // latest version or ConcurrentUpdateConflict is thrown. Returns the new
  // version number.
  int update_manual(const std::string& manual_id, ManualDocument doc);

  ManualDocument get_manual(const std::string& manual_id,
                            std::optional<int> version = std::nullopt) const;
  std::vector<VersionInfo> list_versions(const std::string& manual_id) const;

  // Case-insensitive substring match over title, step texts and tags of the
  // latest versions; every tag in `tags` must be present.
  std::vector<ManualSummary> search(std::string_view query,
                                    const std::set<std::string>& tags = {}) const;
  std::vector<std::string> manual_ids() const;

  void append_gold(const calib::GoldSample& sample);
  calib::GoldDataset load_gold() const;

  const std::filesystem::path& root() const noexcept { return root_; }

 private:
  struct Index {
    std::string manual_id;
    std::string title;
    std::set<std::string> tags;
    std::vector<VersionInfo> versions;
  };

  std::filesystem::path manual_dir(const std::string& id) const;
  std::optional<Index> read_index(const std::string& id) const;
  void write_version(const ManualDocument& doc);
  void write_index(const Index& index);
  std::string fresh_id(const std::string& title) const;

  std::filesystem::path root_;
  Clock clock_;
  mutable std::shared_mutex mutex_;
  mutable std::mutex gold_mutex_;
};

}  // namespace artist::store
