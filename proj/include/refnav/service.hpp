#pragma once

// Transport-independent request handling for the JSON API. The HTTP layer
// (http_server.hpp) only adapts cpp-httplib requests to Service::handle, so
// everything here can be driven directly from tests.

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "refnav/album_store.hpp"
#include "refnav/catalog.hpp"
#include "refnav/error.hpp"
#include "refnav/navigation.hpp"
#include "refnav/snapshot.hpp"
#include "refnav/thesaurus.hpp"

namespace refnav {

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> params;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  nlohmann::ordered_json body;
};

inline int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownImage:
    case ErrorCode::UnknownNode:
    case ErrorCode::UnknownAlbum:
    case ErrorCode::UnknownSession:
      return 404;
    case ErrorCode::NoGraph:
    case ErrorCode::NoMosaic:
    case ErrorCode::NoRankedList:
    case ErrorCode::NoSource:
    case ErrorCode::EmptySource:
    case ErrorCode::NoFeedback:
    case ErrorCode::AlbumFullyStale:
    case ErrorCode::DegenerateQuery:
    case ErrorCode::EmptyQuery:
    case ErrorCode::EmptyFeedback:
    case ErrorCode::EmptyVector:
      return 409;
    case ErrorCode::IoError:
      return 500;
    default:
      return 400;
  }
}

inline ApiResponse error_response(const Error& e) {
  nlohmann::ordered_json err;
  err["code"] = to_string(e.code());
  err["message"] = e.detail();
  if (!e.violations().empty()) {
    auto list = nlohmann::ordered_json::array();
    for (const auto& v : e.violations()) {
      list.push_back({{"code", to_string(v.code)}, {"record", v.record}, {"term", v.term}, {"weight", v.weight},
                      {"message", v.message}});
    }
    err["detail"] = {{"violations", std::move(list)}};
  }
  return {http_status(e.code()), {{"error", std::move(err)}}};
}

/// Live sessions; transitions on one session are serialized by its mutex,
/// distinct sessions proceed in parallel.
class SessionStore {
 public:
  struct Entry {
    std::mutex mutex;
    Session session;
  };

  std::shared_ptr<Entry> add(Session s) {
    auto entry = std::make_shared<Entry>();
    auto id = s.id;
    entry->session = std::move(s);
    std::unique_lock lock(mutex_);
    if (!sessions_.emplace(id, entry).second) throw Error(ErrorCode::InvalidArgument, "session id in use: " + id);
    return entry;
  }

  std::shared_ptr<Entry> find(std::string_view id) const {
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + std::string(id) + "'");
    return it->second;
  }

  std::size_t size() const {
    std::shared_lock lock(mutex_);
    return sessions_.size();
  }

 private:
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<Entry>, std::less<>> sessions_;
};

namespace detail {

inline Assignment assignment_from_json(const nlohmann::json& obj, const char* key) {
  Assignment out;
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_object()) throw Error(ErrorCode::InvalidArgument, std::string("'") + key + "' must be an object");
  for (auto j = it->begin(); j != it->end(); ++j) {
    if (!j->is_string()) throw Error(ErrorCode::InvalidArgument, "judgments must be strings");
    out[j.key()] = parse_judgment(j->get<std::string>());
  }
  return out;
}

inline std::string arg_string(const nlohmann::json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw Error(ErrorCode::InvalidArgument, std::string("missing string argument '") + key + "'");
  }
  return it->get<std::string>();
}

inline std::string arg_string_or(const nlohmann::json& obj, const char* key, std::string fallback) {
  return obj.contains(key) ? arg_string(obj, key) : fallback;
}

inline Origin parse_origin(std::string_view s) {
  if (s == "groups") return Origin::Groups;
  if (s == "ranked") return Origin::RankedList;
  if (s == "mosaic") return Origin::Mosaic;
  throw Error(ErrorCode::InvalidArgument, "origin must be groups, ranked or mosaic");
}

inline JudgeSource parse_judge_source(std::string_view s) {
  if (s == "graph") return JudgeSource::Graph;
  if (s == "ranked") return JudgeSource::RankedList;
  throw Error(ErrorCode::InvalidArgument, "source must be graph or ranked");
}

inline std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  while (!path.empty()) {
    auto start = path.find_first_not_of('/');
    if (start == std::string_view::npos) break;
    path.remove_prefix(start);
    auto end = path.find('/');
    parts.emplace_back(path.substr(0, end));
    path = end == std::string_view::npos ? std::string_view{} : path.substr(end);
  }
  return parts;
}

}  // namespace detail

struct TransitionResult {
  std::optional<Album> album;
  std::vector<std::string> warnings;
};

/// Applies one transition described by a JSON request body
/// (`{"letter": "a".."k", ...arguments}`) to a session.
inline TransitionResult apply_transition(const Navigator& nav, Session& s, const nlohmann::json& body) {
  using namespace detail;
  if (!body.is_object()) throw Error(ErrorCode::InvalidArgument, "transition body must be an object");
  auto letter = arg_string(body, "letter");
  if (letter.size() != 1) throw Error(ErrorCode::InvalidArgument, "letter must be a single character a..k");
  TransitionResult out;
  switch (letter[0]) {
    case 'a': nav.rank_from_image(s, arg_string(body, "image")); break;
    case 'b': nav.mosaic_from_image(s, arg_string(body, "image")); break;
    case 'c': nav.graph_from_image(s, arg_string(body, "image")); break;
    case 'd': nav.expand_node(s, arg_string(body, "node")); break;
    case 'e':
      nav.groups_from(s, parse_judge_source(arg_string(body, "source")), assignment_from_json(body, "assignment"));
      break;
    case 'f': nav.groups_from_mosaic(s, assignment_from_json(body, "judgments")); break;
    case 'g': nav.mosaic_from_ranked(s); break;
    case 'h': nav.graph_from(s, parse_origin(arg_string(body, "origin"))); break;
    case 'i':
      out.album = nav.album_from(s, parse_origin(arg_string(body, "origin")), arg_string_or(body, "name", ""),
                                 arg_string_or(body, "annotation", ""));
      break;
    case 'j': out.warnings = nav.search_from_album(s, arg_string(body, "album")); break;
    case 'k': nav.refresh_mosaic(s, assignment_from_json(body, "judgments")); break;
    default: throw Error(ErrorCode::InvalidArgument, "letter must be one of a..k");
  }
  return out;
}

class Service {
 public:
  /// `state_dir`, when set, receives a snapshot file per session after
  /// every transition. Sessions are not reloaded on restart; albums are.
  Service(std::shared_ptr<const Thesaurus> thesaurus, std::shared_ptr<const Corpus> corpus,
          std::shared_ptr<AlbumStore> albums, SessionConfig defaults = {}, Clock clock = utc_now,
          std::optional<std::filesystem::path> state_dir = std::nullopt)
      : nav_(std::move(thesaurus), std::move(corpus), std::move(albums), std::move(clock)),
        defaults_(std::move(defaults)),
        state_dir_(std::move(state_dir)) {
    nav_.new_session("probe", defaults_);  // validates defaults up front
    if (state_dir_) std::filesystem::create_directories(*state_dir_ / "sessions");
  }

  const Navigator& navigator() const noexcept { return nav_; }
  SessionStore& sessions() noexcept { return sessions_; }

  ApiResponse handle(const ApiRequest& req) {
    try {
      return route(req);
    } catch (const Error& e) {
      return error_response(e);
    } catch (const nlohmann::json::exception& e) {
      return error_response(Error(ErrorCode::InvalidArgument, e.what()));
    }
  }

 private:
  static nlohmann::json parse_body(const std::string& body) {
    if (body.find_first_not_of(" \t\r\n") == std::string::npos) return nlohmann::json::object();
    try {
      return nlohmann::json::parse(body);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::InvalidArgument, std::string("request body is not JSON: ") + e.what());
    }
  }

  static std::size_t param(const ApiRequest& req, const char* key, std::size_t fallback) {
    auto it = req.params.find(key);
    if (it == req.params.end()) return fallback;
    try {
      std::size_t pos = 0;
      auto v = std::stoull(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, std::string("query parameter '") + key + "' must be a count");
    }
  }

  static ApiResponse not_found(const ApiRequest& req) {
    return {404, {{"error", {{"code", "NotFound"}, {"message", "no route for " + req.method + " " + req.path}}}}};
  }

  ApiResponse route(const ApiRequest& req) {
    const auto parts = detail::split_path(req.path);
    const bool get = req.method == "GET";
    const bool post = req.method == "POST";
    const auto& corpus = nav_.corpus();

    if (parts.size() == 1 && parts[0] == "health" && get) {
      nlohmann::ordered_json body;
      body["status"] = "ok";
      body["corpus_size"] = corpus.size();
      body["thesaurus_version"] = nav_.thesaurus().version();
      body["corpus_checksum"] = nav_.checksum();
      return {200, body};
    }
    if (parts.size() == 1 && parts[0] == "thesaurus" && get) return {200, to_json(nav_.thesaurus())};
    if (!parts.empty() && parts[0] == "images" && get) {
      if (parts.size() == 1) {
        auto offset = param(req, "offset", 0);
        auto limit = param(req, "limit", 50);
        auto images = nlohmann::ordered_json::array();
        for (std::size_t i = offset; i < corpus.size() && i < offset + limit; ++i) images.push_back(to_json(corpus.records()[i]));
        nlohmann::ordered_json body;
        body["total"] = corpus.size();
        body["offset"] = offset;
        body["limit"] = limit;
        body["images"] = std::move(images);
        return {200, body};
      }
      if (parts.size() == 2) {
        const ImageRecord* r = corpus.find(parts[1]);
        if (r == nullptr) throw Error(ErrorCode::UnknownImage, "no image '" + parts[1] + "'");
        return {200, to_json(*r)};
      }
    }
    if (!parts.empty() && parts[0] == "sessions") {
      if (parts.size() == 1 && post) return create_session(parse_body(req.body));
      if (parts.size() == 2 && get) {
        auto entry = sessions_.find(parts[1]);
        std::lock_guard lock(entry->mutex);
        return {200, to_json(entry->session)};
      }
      if (parts.size() == 3 && parts[2] == "transitions" && post) return transition(parts[1], parse_body(req.body));
      if (parts.size() == 3 && get) {
        auto entry = sessions_.find(parts[1]);
        std::lock_guard lock(entry->mutex);
        const auto& s = entry->session;
        if (parts[2] == "ranked") return {200, s.ranked ? to_json(*s.ranked) : nullptr};
        if (parts[2] == "mosaic") return {200, s.mosaic ? to_json(*s.mosaic) : nullptr};
        if (parts[2] == "groups") return {200, to_json(s.groups)};
        if (parts[2] == "graph") return {200, s.graph ? to_json(*s.graph) : nullptr};
      }
    }
    if (!parts.empty() && parts[0] == "albums") {
      if (parts.size() == 1 && get) {
        auto list = nlohmann::ordered_json::array();
        for (const auto& a : nav_.albums().list()) list.push_back(to_json(a));
        return {200, list};
      }
      if (parts.size() == 1 && post) {
        // Album creation is transition i on the named session.
        auto body = parse_body(req.body);
        auto session_id = detail::arg_string(body, "session");
        body["letter"] = "i";
        body.erase("session");
        return transition(session_id, body, 201);
      }
      if (parts.size() == 2 && get) {
        auto album = nav_.albums().find(parts[1]);
        if (!album) throw Error(ErrorCode::UnknownAlbum, "no album '" + parts[1] + "'");
        return {200, to_json(*album)};
      }
    }
    return not_found(req);
  }

  ApiResponse create_session(const nlohmann::json& body) {
    if (!body.is_object()) throw Error(ErrorCode::InvalidArgument, "session body must be an object");
    SessionConfig config = defaults_;
    if (auto it = body.find("config"); it != body.end()) {
      try {
        config = session_config_from_json(*it, defaults_);
      } catch (const Error& e) {
        throw Error(e.code() == ErrorCode::MalformedFile ? ErrorCode::InvalidArgument : e.code(), e.detail());
      }
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "session-%06llu", next_session_.fetch_add(1));
    auto entry = sessions_.add(nav_.new_session(buf, std::move(config)));
    std::lock_guard lock(entry->mutex);
    persist(entry->session);
    return {201, to_json(entry->session)};
  }

  ApiResponse transition(const std::string& session_id, const nlohmann::json& body, int status = 200) {
    auto entry = sessions_.find(session_id);
    std::lock_guard lock(entry->mutex);
    auto result = apply_transition(nav_, entry->session, body);
    persist(entry->session);
    nlohmann::ordered_json out;
    out["session"] = to_json(entry->session);
    if (result.album) out["album"] = to_json(*result.album);
    out["warnings"] = result.warnings;
    return {status, out};
  }

  void persist(const Session& s) const {
    if (!state_dir_) return;
    auto path = *state_dir_ / "sessions" / (s.id + ".json");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << serialize_session(s);
    if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  }

  Navigator nav_;
  SessionConfig defaults_;
  std::optional<std::filesystem::path> state_dir_;
  SessionStore sessions_;
  std::atomic<unsigned long long> next_session_{1};
};

}  // namespace refnav
