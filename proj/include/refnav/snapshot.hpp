#pragma once

// Session snapshots: the full navigation state as canonical JSON (fixed
// key order, two-space indent, trailing newline), for replay and debugging.
// Parsing a snapshot and serializing it again is byte-identical.

#include <string>
#include <string_view>

#include <json.hpp>

#include "refnav/error.hpp"
#include "refnav/navigation.hpp"

namespace refnav {

inline nlohmann::ordered_json restriction_to_json(const Restriction& r) {
  if (r.is_all()) return nullptr;
  return nlohmann::ordered_json(std::vector<std::string>(r.categories().begin(), r.categories().end()));
}

inline nlohmann::ordered_json to_json(const TermVector& v) {
  nlohmann::ordered_json obj;
  obj["scope"] = restriction_to_json(v.scope());
  auto comps = nlohmann::ordered_json::object();
  for (const auto& [t, m] : v) comps[t] = m;
  obj["components"] = std::move(comps);
  return obj;
}

inline nlohmann::ordered_json to_json(const RankedList& r) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : r.entries) arr.push_back({{"image", e.image}, {"score", e.score}});
  return arr;
}

inline nlohmann::ordered_json to_json(const SimilarityGraph& g) {
  nlohmann::ordered_json obj;
  obj["nodes"] = std::vector<std::string>(g.nodes.begin(), g.nodes.end());
  auto edges = nlohmann::ordered_json::array();
  for (const auto& [key, score] : g.edges) edges.push_back({{"u", key.first}, {"v", key.second}, {"score", score}});
  obj["edges"] = std::move(edges);
  obj["frontier"] = std::vector<std::string>(g.frontier.begin(), g.frontier.end());
  return obj;
}

inline nlohmann::ordered_json to_json(const Mosaic& m) {
  nlohmann::ordered_json obj;
  obj["round"] = m.round;
  obj["tiles"] = m.tiles;
  auto judgments = nlohmann::ordered_json::object();
  for (const auto& [id, j] : m.judgments) judgments[id] = to_string(j);
  obj["judgments"] = std::move(judgments);
  return obj;
}

inline nlohmann::ordered_json to_json(const GroupSet& g) {
  nlohmann::ordered_json obj;
  obj["positive"] = std::vector<std::string>(g.positive.begin(), g.positive.end());
  obj["negative"] = std::vector<std::string>(g.negative.begin(), g.negative.end());
  obj["neutral"] = std::vector<std::string>(g.neutral.begin(), g.neutral.end());
  return obj;
}

inline std::string_view to_string(Weighting w) { return w == Weighting::Stars ? "stars" : "stars_idf"; }

inline nlohmann::ordered_json to_json(const SessionConfig& c) {
  nlohmann::ordered_json obj;
  obj["restriction"] = restriction_to_json(c.restriction);
  obj["mosaic_size"] = c.mosaic_size;
  obj["graph_k"] = c.graph_k;
  obj["edge_threshold"] = c.edge_threshold;
  obj["graph_seed_count"] = c.graph_seed_count;
  obj["alpha"] = c.rocchio.alpha;
  obj["beta"] = c.rocchio.beta;
  obj["gamma"] = c.rocchio.gamma;
  obj["weighting"] = to_string(c.weighting);
  return obj;
}

inline nlohmann::ordered_json to_json(const Session& s) {
  nlohmann::ordered_json obj;
  obj["id"] = s.id;
  obj["corpus_checksum"] = s.corpus_checksum;
  obj["thesaurus_version"] = s.thesaurus_version;
  obj["config"] = to_json(s.config);
  obj["current_query"] = s.current_query ? to_json(*s.current_query) : nullptr;
  obj["ranked"] = s.ranked ? to_json(*s.ranked) : nullptr;
  obj["mosaic"] = s.mosaic ? to_json(*s.mosaic) : nullptr;
  obj["groups"] = to_json(s.groups);
  obj["graph"] = s.graph ? to_json(*s.graph) : nullptr;
  obj["judged_history"] = std::vector<std::string>(s.judged_history.begin(), s.judged_history.end());
  auto log = nlohmann::ordered_json::array();
  for (const auto& t : s.transition_log) log.push_back({{"letter", std::string(1, t.letter)}, {"at", t.at}});
  obj["transition_log"] = std::move(log);
  return obj;
}

inline std::string serialize_session(const Session& s) { return to_json(s).dump(2) + "\n"; }

namespace detail {

inline double require_number(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number()) throw Error(ErrorCode::MalformedFile, where + ": '" + key + "' must be a number");
  return v.get<double>();
}

inline std::size_t require_count(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_number_unsigned()) throw Error(ErrorCode::MalformedFile, where + ": '" + key + "' must be a count");
  return v.get<std::size_t>();
}

inline std::vector<std::string> string_list(const nlohmann::json& v, const std::string& where) {
  if (!v.is_array()) throw Error(ErrorCode::MalformedFile, where + " must be an array");
  std::vector<std::string> out;
  for (const auto& s : v) {
    if (!s.is_string()) throw Error(ErrorCode::MalformedFile, where + " must contain strings");
    out.push_back(s.get<std::string>());
  }
  return out;
}

inline Restriction restriction_from_json(const nlohmann::json& v, const std::string& where) {
  if (v.is_null()) return Restriction::all();
  auto cats = string_list(v, where);
  return Restriction::only({cats.begin(), cats.end()});
}

inline TermVector vector_from_json(const nlohmann::json& v, const std::string& where) {
  if (!v.is_object()) throw Error(ErrorCode::MalformedFile, where + " must be an object");
  TermVector out(restriction_from_json(require(v, "scope", where), where + ".scope"));
  const auto& comps = require(v, "components", where);
  if (!comps.is_object()) throw Error(ErrorCode::MalformedFile, where + ".components must be an object");
  for (auto it = comps.begin(); it != comps.end(); ++it) {
    if (!it->is_number()) throw Error(ErrorCode::MalformedFile, where + ".components values must be numbers");
    out.set(it.key(), it->get<double>());
  }
  return out;
}

}  // namespace detail

inline SessionConfig session_config_from_json(const nlohmann::json& c, const SessionConfig& defaults = {}) {
  using namespace detail;
  const std::string where = "config";
  if (!c.is_object()) throw Error(ErrorCode::MalformedFile, "config must be an object");
  reject_unknown_keys(c, {"restriction", "mosaic_size", "graph_k", "edge_threshold", "graph_seed_count", "alpha",
                          "beta", "gamma", "weighting"},
                      where);
  SessionConfig out = defaults;
  if (c.contains("restriction")) out.restriction = restriction_from_json(c["restriction"], where + ".restriction");
  if (c.contains("mosaic_size")) out.mosaic_size = require_count(c, "mosaic_size", where);
  if (c.contains("graph_k")) out.graph_k = require_count(c, "graph_k", where);
  if (c.contains("edge_threshold")) out.edge_threshold = require_number(c, "edge_threshold", where);
  if (c.contains("graph_seed_count")) out.graph_seed_count = require_count(c, "graph_seed_count", where);
  if (c.contains("alpha")) out.rocchio.alpha = require_number(c, "alpha", where);
  if (c.contains("beta")) out.rocchio.beta = require_number(c, "beta", where);
  if (c.contains("gamma")) out.rocchio.gamma = require_number(c, "gamma", where);
  if (c.contains("weighting")) {
    auto w = require_string(c, "weighting", where);
    if (w == "stars") {
      out.weighting = Weighting::Stars;
    } else if (w == "stars_idf") {
      out.weighting = Weighting::StarsIdf;
    } else {
      throw Error(ErrorCode::MalformedFile, "config: unknown weighting '" + w + "'");
    }
  }
  return out;
}

inline Session session_from_json(const nlohmann::json& obj) {
  using namespace detail;
  const std::string where = "session";
  if (!obj.is_object()) throw Error(ErrorCode::MalformedFile, "session must be an object");
  reject_unknown_keys(obj, {"id", "corpus_checksum", "thesaurus_version", "config", "current_query", "ranked", "mosaic",
                            "groups", "graph", "judged_history", "transition_log"},
                      where);
  Session s;
  s.id = require_string(obj, "id", where);
  s.corpus_checksum = require_string(obj, "corpus_checksum", where);
  s.thesaurus_version = require_string(obj, "thesaurus_version", where);
  s.config = session_config_from_json(require(obj, "config", where));

  if (const auto& q = require(obj, "current_query", where); !q.is_null()) s.current_query = vector_from_json(q, "current_query");

  if (const auto& r = require(obj, "ranked", where); !r.is_null()) {
    if (!r.is_array()) throw Error(ErrorCode::MalformedFile, "ranked must be an array");
    RankedList list;
    for (const auto& e : r) {
      if (!e.is_object()) throw Error(ErrorCode::MalformedFile, "ranked entries must be objects");
      list.entries.push_back({require_string(e, "image", "ranked"), require_number(e, "score", "ranked")});
    }
    s.ranked = std::move(list);
  }

  if (const auto& m = require(obj, "mosaic", where); !m.is_null()) {
    if (!m.is_object()) throw Error(ErrorCode::MalformedFile, "mosaic must be an object");
    Mosaic mosaic;
    const auto& round = require(m, "round", "mosaic");
    if (!round.is_number_integer()) throw Error(ErrorCode::MalformedFile, "mosaic.round must be an integer");
    mosaic.round = round.get<int>();
    mosaic.tiles = string_list(require(m, "tiles", "mosaic"), "mosaic.tiles");
    const auto& js = require(m, "judgments", "mosaic");
    if (!js.is_object()) throw Error(ErrorCode::MalformedFile, "mosaic.judgments must be an object");
    for (auto it = js.begin(); it != js.end(); ++it) {
      if (!it->is_string()) throw Error(ErrorCode::MalformedFile, "mosaic.judgments values must be strings");
      try {
        mosaic.judgments[it.key()] = parse_judgment(it->get<std::string>());
      } catch (const Error& e) {
        throw Error(ErrorCode::MalformedFile, "mosaic: " + e.detail());
      }
    }
    s.mosaic = std::move(mosaic);
  }

  const auto& g = require(obj, "groups", where);
  if (!g.is_object()) throw Error(ErrorCode::MalformedFile, "groups must be an object");
  for (auto [key, set] : {std::pair{"positive", &s.groups.positive}, std::pair{"negative", &s.groups.negative},
                          std::pair{"neutral", &s.groups.neutral}}) {
    auto ids = string_list(require(g, key, "groups"), std::string("groups.") + key);
    set->insert(ids.begin(), ids.end());
  }

  if (const auto& gr = require(obj, "graph", where); !gr.is_null()) {
    if (!gr.is_object()) throw Error(ErrorCode::MalformedFile, "graph must be an object");
    SimilarityGraph graph;
    auto nodes = string_list(require(gr, "nodes", "graph"), "graph.nodes");
    graph.nodes.insert(nodes.begin(), nodes.end());
    const auto& edges = require(gr, "edges", "graph");
    if (!edges.is_array()) throw Error(ErrorCode::MalformedFile, "graph.edges must be an array");
    for (const auto& e : edges) {
      if (!e.is_object()) throw Error(ErrorCode::MalformedFile, "graph edges must be objects");
      graph.edges.emplace(EdgeKey(require_string(e, "u", "graph.edges"), require_string(e, "v", "graph.edges")),
                          require_number(e, "score", "graph.edges"));
    }
    auto frontier = string_list(require(gr, "frontier", "graph"), "graph.frontier");
    graph.frontier.insert(frontier.begin(), frontier.end());
    s.graph = std::move(graph);
  }

  auto history = string_list(require(obj, "judged_history", where), "judged_history");
  s.judged_history.insert(history.begin(), history.end());

  const auto& log = require(obj, "transition_log", where);
  if (!log.is_array()) throw Error(ErrorCode::MalformedFile, "transition_log must be an array");
  for (const auto& t : log) {
    if (!t.is_object()) throw Error(ErrorCode::MalformedFile, "transition_log entries must be objects");
    auto letter = require_string(t, "letter", "transition_log");
    if (letter.size() != 1 || letter[0] < 'a' || letter[0] > 'k') {
      throw Error(ErrorCode::MalformedFile, "transition_log: letter must be one of a..k");
    }
    s.transition_log.push_back({letter[0], require_string(t, "at", "transition_log")});
  }
  return s;
}

inline Session parse_session(std::string_view text) { return session_from_json(detail::parse_json(text, "session")); }

inline std::string serialize_graph(const SimilarityGraph& g) { return to_json(g).dump(2) + "\n"; }

}  // namespace refnav
