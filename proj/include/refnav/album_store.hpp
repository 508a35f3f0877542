#pragma once

// Albums archive the outcome of a search so it can be reopened, shared, and
// used to seed a new one. The store is global and, when given a directory,
// keeps one canonical JSON file per album.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "refnav/error.hpp"
#include "refnav/thesaurus.hpp"

namespace refnav {

/// Timestamp source; injectable so session replays are reproducible.
using Clock = std::function<std::string()>;

/// ISO-8601 UTC with millisecond precision, e.g. 2026-10-16T08:30:00.125Z.
inline std::string utc_now() {
  using namespace std::chrono;
  auto now = system_clock::now();
  auto ms = duration_cast<milliseconds>(now.time_since_epoch()).count() % 1000;
  std::time_t t = system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[80];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

enum class Provenance { Groups, RankedList, Mosaic };

inline constexpr std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Groups: return "groups";
    case Provenance::RankedList: return "ranked";
    case Provenance::Mosaic: return "mosaic";
  }
  return "";
}

inline Provenance parse_provenance(std::string_view s) {
  if (s == "groups") return Provenance::Groups;
  if (s == "ranked") return Provenance::RankedList;
  if (s == "mosaic") return Provenance::Mosaic;
  throw Error(ErrorCode::InvalidArgument, "unknown provenance '" + std::string(s) + "'");
}

struct Album {
  std::string id;
  std::string name;
  std::string annotation;
  Provenance created_from = Provenance::Groups;
  std::string created_at;
  std::vector<std::string> images;  // non-empty, unique

  bool operator==(const Album&) const = default;
};

inline nlohmann::ordered_json to_json(const Album& a) {
  nlohmann::ordered_json obj;
  obj["id"] = a.id;
  obj["name"] = a.name;
  obj["annotation"] = a.annotation;
  obj["created_from"] = to_string(a.created_from);
  obj["created_at"] = a.created_at;
  obj["images"] = a.images;
  return obj;
}

inline Album album_from_json(const nlohmann::json& obj) {
  using namespace detail;
  if (!obj.is_object()) throw Error(ErrorCode::MalformedFile, "album must be an object");
  reject_unknown_keys(obj, {"id", "name", "annotation", "created_from", "created_at", "images"}, "album");
  Album a;
  a.id = require_string(obj, "id", "album");
  a.name = require_string(obj, "name", "album");
  a.annotation = require_string(obj, "annotation", "album");
  try {
    a.created_from = parse_provenance(require_string(obj, "created_from", "album"));
  } catch (const Error& e) {
    throw Error(ErrorCode::MalformedFile, "album: " + e.detail());
  }
  a.created_at = require_string(obj, "created_at", "album");
  const auto& imgs = require(obj, "images", "album");
  if (!imgs.is_array() || imgs.empty()) throw Error(ErrorCode::MalformedFile, "album: 'images' must be a non-empty array");
  std::set<std::string> seen;
  for (const auto& i : imgs) {
    if (!i.is_string()) throw Error(ErrorCode::MalformedFile, "album: image ids must be strings");
    if (!seen.insert(i.get<std::string>()).second) throw Error(ErrorCode::MalformedFile, "album: duplicate image id");
    a.images.push_back(i.get<std::string>());
  }
  return a;
}

inline std::string serialize_album(const Album& a) { return to_json(a).dump(2) + "\n"; }
inline Album parse_album(std::string_view text) { return album_from_json(detail::parse_json(text, "album")); }

class AlbumStore {
 public:
  /// In-memory store.
  AlbumStore() = default;

  /// Directory-backed store; existing `*.json` albums are loaded.
  explicit AlbumStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(*dir_);
    for (const auto& entry : std::filesystem::directory_iterator(*dir_)) {
      if (entry.path().extension() != ".json") continue;
      std::ifstream in(entry.path(), std::ios::binary);
      auto album = parse_album(detail::read_all(in));
      bump_sequence(album.id);
      albums_.push_back(std::move(album));
    }
    std::sort(albums_.begin(), albums_.end(), [](const Album& a, const Album& b) { return a.id < b.id; });
  }

  /// Assigns the next id, persists, and returns the stored album.
  Album create(Album album) {
    if (album.images.empty()) throw Error(ErrorCode::EmptySource, "an album needs at least one image");
    std::set<std::string> unique(album.images.begin(), album.images.end());
    if (unique.size() != album.images.size()) throw Error(ErrorCode::InvalidArgument, "album images must be unique");
    std::lock_guard lock(mutex_);
    char buf[24];
    std::snprintf(buf, sizeof buf, "album-%06llu", next_++);
    album.id = buf;
    if (dir_) {
      auto path = *dir_ / (album.id + ".json");
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out << serialize_album(album);
      if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
    }
    albums_.push_back(album);
    return album;
  }

  std::optional<Album> find(std::string_view id) const {
    std::lock_guard lock(mutex_);
    for (const auto& a : albums_) {
      if (a.id == id) return a;
    }
    return std::nullopt;
  }

  std::vector<Album> list() const {
    std::lock_guard lock(mutex_);
    return albums_;
  }

  const std::optional<std::filesystem::path>& directory() const noexcept { return dir_; }

 private:
  void bump_sequence(const std::string& id) {
    unsigned long long n = 0;
    if (std::sscanf(id.c_str(), "album-%llu", &n) == 1 && n >= next_) next_ = n + 1;
  }

  std::optional<std::filesystem::path> dir_;
  mutable std::mutex mutex_;
  std::vector<Album> albums_;
  unsigned long long next_ = 1;
};

}  // namespace refnav
