#include "cbrowse/snapshot.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <unordered_set>

#include "cbrowse/digest.hpp"
#include "cbrowse/error.hpp"
#include "cbrowse/term_index.hpp"
#include "cbrowse/text.hpp"

namespace cbrowse {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string errno_text() { return std::strerror(errno); }

class Fd {
 public:
  explicit Fd(int fd) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  int get() const { return fd_; }
  void close() {
    int fd = fd_;
    fd_ = -1;
    if (::close(fd) != 0) throw StorageError("close failed: " + errno_text());
  }

 private:
  int fd_;
};

void write_all(int fd, std::string_view bytes, const std::filesystem::path& path) {
  while (!bytes.empty()) {
    auto n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      throw StorageError("write " + path.string() + ": " + errno_text());
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

void notify(const PersistHook& hook, PersistStage stage) {
  if (hook) hook(stage);
}

// temp file -> fsync -> rename over `target`.
void write_atomically(const std::filesystem::path& target, std::string_view bytes, const PersistHook& hook,
                      std::optional<PersistStage> partial, PersistStage written) {
  auto tmp = target;
  tmp += ".tmp";
  Fd fd(::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644));
  if (fd.get() < 0) throw StorageError("open " + tmp.string() + ": " + errno_text());
  if (partial) {
    auto half = bytes.size() / 2;
    write_all(fd.get(), bytes.substr(0, half), tmp);
    notify(hook, *partial);
    write_all(fd.get(), bytes.substr(half), tmp);
  } else {
    write_all(fd.get(), bytes, tmp);
  }
  if (::fsync(fd.get()) != 0) throw StorageError("fsync " + tmp.string() + ": " + errno_text());
  fd.close();
  notify(hook, written);
  if (::rename(tmp.c_str(), target.c_str()) != 0) {
    throw StorageError("rename " + tmp.string() + ": " + errno_text());
  }
}

void sync_dir(const std::filesystem::path& dir) {
  Fd fd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC));
  if (fd.get() >= 0) ::fsync(fd.get());
}

std::string compact_timestamp(Timestamp t) {
  auto s = format_rfc3339(t);  // YYYY-MM-DDTHH:MM:SSZ
  std::string out;
  for (char c : s) {
    if (c != '-' && c != ':') out += c;
  }
  return out;
}

bool valid_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  for (char c : id) {
    bool ok = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

const Article* Snapshot::article(std::string_view article_id) const {
  for (const auto& a : corpus) {
    if (a.id == article_id) return &a;
  }
  return nullptr;
}

ordered_json Snapshot::to_json() const {
  ordered_json doc;
  doc["id"] = id;
  doc["created_at"] = format_rfc3339(created_at);
  doc["stats"] = {{"article_count", stats.article_count},
                  {"dropped_count", stats.dropped_count},
                  {"concept_count", stats.concept_count},
                  {"build_ms", stats.build_ms}};
  doc["corpus"] = ordered_json::array();
  for (const auto& a : corpus) doc["corpus"].push_back(article_to_json(a));
  doc["tree"] = tree.to_json();
  return doc;
}

std::string Snapshot::dump() const { return to_json().dump(2) + "\n"; }

Snapshot Snapshot::from_json(const json& doc) {
  Snapshot s;
  try {
    s.id = doc.at("id").get<std::string>();
    s.created_at = parse_rfc3339(doc.at("created_at").get<std::string>());
    const auto& st = doc.at("stats");
    s.stats = {st.at("article_count").get<std::size_t>(), st.at("dropped_count").get<std::size_t>(),
               st.at("concept_count").get<std::size_t>(), st.at("build_ms").get<std::int64_t>()};
    for (const auto& a : doc.at("corpus")) s.corpus.push_back(article_from_json(a));
    s.tree = ConceptTree::from_json(doc.at("tree"));
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("invalid snapshot: ") + e.what());
  }
  if (!valid_id(s.id)) throw InvalidArgument("invalid snapshot id '" + s.id + "'");
  std::unordered_set<std::string> ids;
  for (const auto& a : s.corpus) ids.insert(a.id);
  for (const auto& node : s.tree.nodes()) {
    for (const auto& aid : node.article_ids) {
      if (!ids.count(aid)) throw ConsistencyError("node " + node.id + " references unknown article " + aid);
    }
  }
  return s;
}

Snapshot Snapshot::parse(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(ParseError::from_json_byte(e.byte), "malformed snapshot JSON");
  }
  return from_json(doc);
}

std::string make_snapshot_id(Timestamp created_at, std::string_view content) {
  return compact_timestamp(created_at) + "-" + sha256_hex(content).substr(0, 8);
}

Snapshot snapshot_build(std::span<const Article> corpus, const SnapshotOptions& options, Timestamp created_at) {
  const auto start = std::chrono::steady_clock::now();
  if (options.arity < 2) throw InvalidArgument("arity must be at least 2");
  const Stoplist stop = options.stoplist_path.empty() ? Stoplist::bundled() : Stoplist::from_file(options.stoplist_path);

  Snapshot s;
  s.created_at = created_at;
  std::unordered_set<std::string> seen;
  for (const auto& a : corpus) {
    if (seen.insert(a.id).second) s.corpus.push_back(a);
  }

  std::vector<SentenceUnit> units;
  for (const auto& a : s.corpus) {
    const auto before = units.size();
    if (auto title = preprocess_title(a.title, stop, a.id)) units.push_back(std::move(*title));
    if (options.include_descriptions) {
      for (auto& u : preprocess(a.description, stop, a.id)) units.push_back(std::move(u));
    }
    if (units.size() == before) ++s.stats.dropped_count;
  }
  s.stats.article_count = s.corpus.size();

  if (units.empty()) {
    s.tree = ConceptTree(options.arity, {});
  } else {
    const auto index = build_index(units);
    const auto context = build_context(units);
    const auto concepts = extract_optimal_concepts(context);
    s.stats.concept_count = concepts.size();
    std::vector<LabeledConcept> labeled;
    labeled.reserve(concepts.size());
    for (const auto& c : concepts) labeled.push_back(label_concept(c, context, index, units));
    s.tree = build_tree(merge_duplicate_labels(std::move(labeled)), options.arity);
  }

  s.id = make_snapshot_id(created_at, s.tree.dump() + dump_corpus(s.corpus));
  s.stats.build_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
  return s;
}

std::filesystem::path persist_snapshot(const Snapshot& snapshot, const std::filesystem::path& dir,
                                       const PersistHook& hook) {
  if (!valid_id(snapshot.id)) throw InvalidArgument("invalid snapshot id '" + snapshot.id + "'");
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) throw StorageError("not a directory: " + dir.string());
  const auto path = dir / ("snapshot-" + snapshot.id + ".json");
  write_atomically(path, snapshot.dump(), hook, PersistStage::SnapshotPartial, PersistStage::SnapshotWritten);
  sync_dir(dir);
  notify(hook, PersistStage::SnapshotRenamed);
  write_atomically(dir / "latest", snapshot.id + "\n", hook, std::nullopt, PersistStage::LatestWritten);
  sync_dir(dir);
  return path;
}

std::optional<Snapshot> load_latest(const std::filesystem::path& dir) {
  const auto pointer = dir / "latest";
  std::error_code ec;
  if (!std::filesystem::exists(pointer, ec)) return std::nullopt;
  std::string id;
  try {
    id = read_text_file(pointer);
  } catch (const ConfigError& e) {
    throw StorageError(e.what());
  }
  while (!id.empty() && (id.back() == '\n' || id.back() == '\r' || id.back() == ' ')) id.pop_back();
  if (!valid_id(id)) throw StorageError("latest pointer is malformed");
  const auto path = dir / ("snapshot-" + id + ".json");
  try {
    auto s = Snapshot::parse(read_text_file(path));
    if (s.id != id) throw StorageError(path.string() + " holds snapshot " + s.id);
    return s;
  } catch (const StorageError&) {
    throw;
  } catch (const Error& e) {
    throw StorageError("cannot load " + path.string() + ": " + e.what());
  }
}

}  // namespace cbrowse
