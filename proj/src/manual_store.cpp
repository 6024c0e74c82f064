#include "artist/manual_store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "artist/errors.hpp"
#include "artist/text_util.hpp"

namespace fs = std::filesystem;

namespace artist::store {

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("missing file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_atomically(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    out.flush();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

bool valid_id(std::string_view id) {
  return !id.empty() && id.size() <= 128 && std::all_of(id.begin(), id.end(), [](char c) {
           return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_';
         });
}

std::string slugify(std::string_view title) {
  std::string slug;
  for (char c : title) {
    const auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      slug += static_cast<char>(std::tolower(u));
    } else if (!slug.empty() && slug.back() != '-') {
      slug += '-';
    }
    if (slug.size() >= 48) break;
  }
  while (!slug.empty() && slug.back() == '-') slug.pop_back();
  return slug.empty() ? std::string("manual") : slug;
}

bool contains_ci(std::string_view haystack, const std::string& lowered_needle) {
  return text::to_lower(haystack).find(lowered_needle) != std::string::npos;
}

}  // namespace

void to_json(Json& j, const VersionInfo& v) {
  j = Json{{"version", v.version}, {"updated_at", format_timestamp(v.updated_at)}};
}

void to_json(Json& j, const ManualSummary& s) {
  j = Json{{"manual_id", s.manual_id},
           {"title", s.title},
           {"tags", s.tags},
           {"latest_version", s.latest_version},
           {"step_count", s.step_count}};
}

ManualStore::ManualStore(fs::path root, Clock clock) : root_(std::move(root)), clock_(std::move(clock)) {
  fs::create_directories(root_ / "manuals");
  fs::create_directories(root_ / "gold");
}

fs::path ManualStore::manual_dir(const std::string& id) const { return root_ / "manuals" / id; }

std::optional<ManualStore::Index> ManualStore::read_index(const std::string& id) const {
  if (!valid_id(id)) return std::nullopt;
  const fs::path path = manual_dir(id) / "index.json";
  if (!fs::exists(path)) return std::nullopt;
  const auto j = parse_json(read_file(path));
  Index index;
  try {
    index.manual_id = j.at("manual_id").get<std::string>();
    index.title = j.at("title").get<std::string>();
    index.tags = j.at("tags").get<std::set<std::string>>();
    for (const auto& v : j.at("versions")) {
      index.versions.push_back(
          {v.at("version").get<int>(), parse_timestamp(v.at("updated_at").get<std::string>())});
    }
  } catch (const nlohmann::json::exception& e) {
    throw MalformedInput("corrupt index for manual " + id + ": " + e.what());
  }
  return index;
}

void ManualStore::write_version(const ManualDocument& doc) {
  write_atomically(manual_dir(doc.manual_id) / ("v" + std::to_string(doc.version) + ".json"),
                   Json(doc).dump(2) + "\n");
}

void ManualStore::write_index(const Index& index) {
  const Json j{{"manual_id", index.manual_id},
               {"title", index.title},
               {"tags", index.tags},
               {"latest_version", index.versions.empty() ? 0 : index.versions.back().version},
               {"versions", index.versions}};
  write_atomically(manual_dir(index.manual_id) / "index.json", j.dump(2) + "\n");
}

std::string ManualStore::fresh_id(const std::string& title) const {
  const std::string base = slugify(title);
  std::string id = base;
  for (int suffix = 2; fs::exists(manual_dir(id)); ++suffix) {
    id = base + "-" + std::to_string(suffix);
  }
  return id;
}

std::string ManualStore::create_manual(ManualDocument doc) {
  std::unique_lock lock(mutex_);
  if (doc.manual_id.empty()) {
    doc.manual_id = fresh_id(doc.title);
  } else if (!valid_id(doc.manual_id)) {
    throw MalformedInput("manual_id may only contain letters, digits, '-' and '_'");
  } else if (fs::exists(manual_dir(doc.manual_id))) {
    throw ConcurrentUpdateConflict("manual " + doc.manual_id + " already exists");
  }
  doc.version = 1;
  doc.created_at = clock_();
  doc.updated_at = doc.created_at;
  doc = ManualDocument::make(std::move(doc.manual_id), std::move(doc.title), std::move(doc.steps),
                             std::move(doc.tags), doc.version, doc.created_at, doc.updated_at);

  write_version(doc);
  write_index({doc.manual_id, doc.title, doc.tags, {{doc.version, doc.updated_at}}});
  return doc.manual_id;
}

int ManualStore::update_manual(const std::string& manual_id, ManualDocument doc) {
  std::unique_lock lock(mutex_);
  auto index = read_index(manual_id);
  if (!index) throw NotFound("manual " + manual_id + " not found");
  if (!doc.manual_id.empty() && doc.manual_id != manual_id) {
    throw MalformedInput("manual_id in body does not match the target manual");
  }
  const int latest = index->versions.back().version;
  if (doc.version != latest) {
    throw ConcurrentUpdateConflict("manual " + manual_id + " is at version " +
                                   std::to_string(latest) + ", update was based on version " +
                                   std::to_string(doc.version));
  }
  const auto first = parse_json(read_file(manual_dir(manual_id) / "v1.json"));
  const Timestamp created = parse_timestamp(first.at("created_at").get<std::string>());
  const Timestamp now = std::max(clock_(), index->versions.back().updated_at);

  doc = ManualDocument::make(manual_id, std::move(doc.title), std::move(doc.steps),
                             std::move(doc.tags), latest + 1, created, now);
  write_version(doc);
  index->title = doc.title;
  index->tags = doc.tags;
  index->versions.push_back({doc.version, doc.updated_at});
  write_index(*index);
  return doc.version;
}

ManualDocument ManualStore::get_manual(const std::string& manual_id,
                                       std::optional<int> version) const {
  std::shared_lock lock(mutex_);
  const auto index = read_index(manual_id);
  if (!index) throw NotFound("manual " + manual_id + " not found");
  const int v = version.value_or(index->versions.back().version);
  const bool known = std::any_of(index->versions.begin(), index->versions.end(),
                                 [v](const VersionInfo& info) { return info.version == v; });
  if (!known) {
    throw NotFound("manual " + manual_id + " has no version " + std::to_string(v));
  }
  return decode<ManualDocument>(
      parse_json(read_file(manual_dir(manual_id) / ("v" + std::to_string(v) + ".json"))));
}

std::vector<VersionInfo> ManualStore::list_versions(const std::string& manual_id) const {
  std::shared_lock lock(mutex_);
  const auto index = read_index(manual_id);
  if (!index) throw NotFound("manual " + manual_id + " not found");
  return index->versions;
}

std::vector<std::string> ManualStore::manual_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(root_ / "manuals")) {
    if (entry.is_directory() && fs::exists(entry.path() / "index.json")) {
      ids.push_back(entry.path().filename().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<ManualSummary> ManualStore::search(std::string_view query,
                                               const std::set<std::string>& tags) const {
  const std::string needle = text::to_lower(query);
  std::vector<ManualSummary> out;
  for (const auto& id : manual_ids()) {
    const auto doc = get_manual(id);
    if (!std::all_of(tags.begin(), tags.end(),
                     [&](const std::string& t) { return doc.tags.contains(t); })) {
      continue;
    }
    bool hit = needle.empty() || contains_ci(doc.title, needle);
    for (const auto& tag : doc.tags) hit = hit || contains_ci(tag, needle);
    for (const auto& step : doc.steps) {
      hit = hit || contains_ci(step.original_text, needle) ||
            (step.simplified_text && contains_ci(*step.simplified_text, needle));
    }
    if (hit) out.push_back({doc.manual_id, doc.title, doc.tags, doc.version, doc.steps.size()});
  }
  return out;
}

void ManualStore::append_gold(const calib::GoldSample& sample) {
  calib::check_gold(sample);
  std::lock_guard lock(gold_mutex_);
  std::ofstream out(root_ / "gold" / "samples.jsonl", std::ios::app | std::ios::binary);
  out << Json(sample).dump() << '\n';
  out.flush();
  if (!out) throw Error("cannot append to gold store");
}

calib::GoldDataset ManualStore::load_gold() const {
  const fs::path path = root_ / "gold" / "samples.jsonl";
  std::string content;
  {
    std::lock_guard lock(gold_mutex_);
    if (!fs::exists(path)) return {};
    content = read_file(path);
  }
  return calib::gold_from_jsonl(content);
}

}  // namespace artist::store
