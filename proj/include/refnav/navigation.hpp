#pragma once

// Interactive navigation over the reference corpus. A Session is the state a
// designer steers; the Navigator applies the eleven transitions between
// query images, ranked lists, mosaics, judgment groups, similarity graphs
// and albums:
//
//   a  query image      -> ranked list
//   b  query image      -> mosaic          (a followed by g)
//   c  query image      -> graph
//   d  graph node       -> expanded graph
//   e  graph / ranked   -> groups
//   f  mosaic choices   -> groups
//   g  ranked list      -> mosaic
//   h  groups / ranked / mosaic -> graph
//   i  groups / ranked / mosaic -> album
//   j  album            -> query + ranked list
//   k  mosaic choices   -> next mosaic
//
// Every transition either succeeds and appends its letter to the session's
// transition log, or throws and leaves the session untouched.

#include <algorithm>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "refnav/album_store.hpp"
#include "refnav/catalog.hpp"
#include "refnav/error.hpp"
#include "refnav/graph.hpp"
#include "refnav/thesaurus.hpp"
#include "refnav/vsm.hpp"

namespace refnav {

enum class Judgment { Neutral, Positive, Negative };

inline constexpr std::string_view to_string(Judgment j) {
  switch (j) {
    case Judgment::Neutral: return "neutral";
    case Judgment::Positive: return "positive";
    case Judgment::Negative: return "negative";
  }
  return "";
}

inline Judgment parse_judgment(std::string_view s) {
  if (s == "neutral") return Judgment::Neutral;
  if (s == "positive") return Judgment::Positive;
  if (s == "negative") return Judgment::Negative;
  throw Error(ErrorCode::InvalidArgument, "unknown judgment '" + std::string(s) + "'");
}

struct Mosaic {
  int round = 1;
  std::vector<std::string> tiles;
  std::map<std::string, Judgment, std::less<>> judgments;  // one per tile

  bool has_tile(std::string_view id) const { return judgments.contains(id); }
  bool has_feedback() const {
    return std::any_of(judgments.begin(), judgments.end(),
                       [](const auto& kv) { return kv.second != Judgment::Neutral; });
  }

  bool operator==(const Mosaic&) const = default;
};

/// Positive, negative and neutral groups; an image sits in at most one.
struct GroupSet {
  ImageSet positive;
  ImageSet negative;
  ImageSet neutral;

  void assign(const std::string& id, Judgment j) {
    positive.erase(id);
    negative.erase(id);
    neutral.erase(id);
    switch (j) {
      case Judgment::Positive: positive.insert(id); break;
      case Judgment::Negative: negative.insert(id); break;
      case Judgment::Neutral: neutral.insert(id); break;
    }
  }

  bool empty() const { return positive.empty() && negative.empty() && neutral.empty(); }

  bool disjoint() const {
    for (const auto& id : positive) {
      if (negative.contains(id) || neutral.contains(id)) return false;
    }
    for (const auto& id : negative) {
      if (neutral.contains(id)) return false;
    }
    return true;
  }

  bool operator==(const GroupSet&) const = default;
};

struct SessionConfig {
  Restriction restriction;
  std::size_t mosaic_size = 12;
  std::size_t graph_k = 8;
  double edge_threshold = 0.3;
  std::size_t graph_seed_count = 10;
  RocchioParams rocchio;
  Weighting weighting = Weighting::Stars;

  bool operator==(const SessionConfig&) const = default;
};

struct TransitionRecord {
  char letter;
  std::string at;

  bool operator==(const TransitionRecord&) const = default;
};

struct Session {
  std::string id;
  std::string corpus_checksum;
  std::string thesaurus_version;
  SessionConfig config;
  std::optional<TermVector> current_query;
  std::optional<RankedList> ranked;
  std::optional<Mosaic> mosaic;
  GroupSet groups;
  std::optional<SimilarityGraph> graph;
  ImageSet judged_history;  // every image ever judged positive or negative
  std::vector<TransitionRecord> transition_log;

  bool operator==(const Session&) const = default;
};

/// Where groups are assigned from (transition e).
enum class JudgeSource { Graph, RankedList };
/// Where graphs and albums are built from (transitions h and i).
enum class Origin { Groups, RankedList, Mosaic };

using Assignment = std::map<std::string, Judgment, std::less<>>;

class Navigator {
 public:
  Navigator(std::shared_ptr<const Thesaurus> thesaurus, std::shared_ptr<const Corpus> corpus,
            std::shared_ptr<AlbumStore> albums, Clock clock = utc_now)
      : thesaurus_(std::move(thesaurus)),
        corpus_(std::move(corpus)),
        albums_(std::move(albums)),
        clock_(std::move(clock)),
        checksum_(corpus_checksum(*corpus_)) {}

  const Thesaurus& thesaurus() const noexcept { return *thesaurus_; }
  const Corpus& corpus() const noexcept { return *corpus_; }
  AlbumStore& albums() const noexcept { return *albums_; }
  const std::string& checksum() const noexcept { return checksum_; }

  Session new_session(std::string id, SessionConfig config = {}) const {
    config.restriction.check(*thesaurus_);
    if (config.mosaic_size == 0) throw Error(ErrorCode::InvalidArgument, "mosaic_size must be positive");
    Session s;
    s.id = std::move(id);
    s.corpus_checksum = checksum_;
    s.thesaurus_version = thesaurus_->version();
    s.config = std::move(config);
    return s;
  }

  Vectorizer vectorizer(const SessionConfig& config) const {
    if (config.weighting == Weighting::StarsIdf) return Vectorizer(*thesaurus_, config.restriction, *corpus_);
    return Vectorizer(*thesaurus_, config.restriction);
  }

  /// Sets one tile's judgment on the current mosaic. Not a transition.
  void judge_tile(Session& s, const std::string& image, Judgment j) const {
    if (!s.mosaic) throw Error(ErrorCode::NoMosaic, "session has no mosaic");
    if (!s.mosaic->has_tile(image)) throw Error(ErrorCode::UnknownImage, "'" + image + "' is not a mosaic tile");
    s.mosaic->judgments[image] = j;
  }

  // a
  void rank_from_image(Session& s, const std::string& image) const {
    transact(s, 'a', [&](Session& w) { do_rank_from_image(w, image); });
  }

  // b
  void mosaic_from_image(Session& s, const std::string& image) const {
    transact(s, 'b', [&](Session& w) {
      do_rank_from_image(w, image);
      do_mosaic_from_ranked(w);
    });
  }

  // c
  void graph_from_image(Session& s, const std::string& image) const {
    transact(s, 'c', [&](Session& w) {
      require_image(image);
      const auto vz = vectorizer(w.config);
      auto query = vz(*corpus_->find(image));
      if (query.empty()) throw Error(ErrorCode::EmptyQuery, "'" + image + "' has no terms under the restriction");
      SimilarityGraph g;
      g.nodes.insert(image);
      for (const auto& n : top_neighbors(query, *corpus_, vz, {image}, w.config.edge_threshold, w.config.graph_k).entries) {
        g.add_edge(image, n.image, n.score);
        g.frontier.insert(n.image);
      }
      w.graph = std::move(g);
    });
  }

  // d
  void expand_node(Session& s, const std::string& node) const {
    transact(s, 'd', [&](Session& w) {
      if (!w.graph) throw Error(ErrorCode::NoGraph, "session has no graph");
      auto& g = *w.graph;
      if (!g.nodes.contains(node)) throw Error(ErrorCode::UnknownNode, "'" + node + "' is not a graph node");
      const auto vz = vectorizer(w.config);
      auto query = vz(*corpus_->find(node));
      for (const auto& n : top_neighbors(query, *corpus_, vz, {node}, w.config.edge_threshold, w.config.graph_k).entries) {
        if (g.nodes.insert(n.image).second) g.frontier.insert(n.image);
        g.add_edge(node, n.image, n.score);
      }
      g.frontier.erase(node);
    });
  }

  // e
  void groups_from(Session& s, JudgeSource source, const Assignment& assignment) const {
    transact(s, 'e', [&](Session& w) {
      if (source == JudgeSource::Graph && !w.graph) throw Error(ErrorCode::NoSource, "session has no graph");
      if (source == JudgeSource::RankedList && !w.ranked) throw Error(ErrorCode::NoSource, "session has no ranked list");
      for (const auto& [id, _] : assignment) {
        bool member = source == JudgeSource::Graph ? w.graph->nodes.contains(id) : w.ranked->contains(id);
        if (!member) throw Error(ErrorCode::UnknownImage, "'" + id + "' is not part of the judged source");
      }
      for (const auto& [id, j] : assignment) assign(w, id, j);
    });
  }

  // f
  void groups_from_mosaic(Session& s, const Assignment& judgments = {}) const {
    transact(s, 'f', [&](Session& w) {
      apply_judgments(w, judgments);
      fold_mosaic(w);
    });
  }

  // g
  void mosaic_from_ranked(Session& s) const {
    transact(s, 'g', [&](Session& w) { do_mosaic_from_ranked(w); });
  }

  // h
  void graph_from(Session& s, Origin origin) const {
    transact(s, 'h', [&](Session& w) {
      std::vector<std::string> seeds;
      switch (origin) {
        case Origin::Groups:
          seeds.assign(w.groups.positive.begin(), w.groups.positive.end());
          break;
        case Origin::RankedList:
          if (!w.ranked) throw Error(ErrorCode::NoSource, "session has no ranked list");
          for (const auto& e : w.ranked->entries) {
            if (seeds.size() == w.config.graph_seed_count) break;
            seeds.push_back(e.image);
          }
          break;
        case Origin::Mosaic:
          if (!w.mosaic) throw Error(ErrorCode::NoSource, "session has no mosaic");
          seeds = w.mosaic->tiles;
          break;
      }
      if (seeds.empty()) throw Error(ErrorCode::EmptySource, "no images to seed the graph");
      const auto vz = vectorizer(w.config);
      std::vector<TermVector> vectors;
      for (const auto& id : seeds) vectors.push_back(vz(*corpus_->find(id)));
      SimilarityGraph g;
      g.nodes.insert(seeds.begin(), seeds.end());
      g.frontier = g.nodes;
      for (std::size_t i = 0; i < seeds.size(); ++i) {
        for (std::size_t j = i + 1; j < seeds.size(); ++j) {
          if (vectors[i].empty() || vectors[j].empty()) continue;
          double score = similarity(vectors[i], vectors[j]);
          if (qualifies_as_edge(score, w.config.edge_threshold)) g.add_edge(seeds[i], seeds[j], score);
        }
      }
      w.graph = std::move(g);
    });
  }

  // i
  Album album_from(Session& s, Origin origin, std::string name, std::string annotation) const {
    Album created;
    transact(s, 'i', [&](Session& w) {
      Album a;
      a.name = std::move(name);
      a.annotation = std::move(annotation);
      switch (origin) {
        case Origin::Groups:
          a.created_from = Provenance::Groups;
          a.images.assign(w.groups.positive.begin(), w.groups.positive.end());
          break;
        case Origin::RankedList:
          a.created_from = Provenance::RankedList;
          if (w.ranked) a.images = w.ranked->ids();
          break;
        case Origin::Mosaic:
          a.created_from = Provenance::Mosaic;
          if (w.mosaic) {
            for (const auto& t : w.mosaic->tiles) {
              if (w.mosaic->judgments.at(t) == Judgment::Positive) a.images.push_back(t);
            }
            if (a.images.empty()) a.images = w.mosaic->tiles;
          }
          break;
      }
      if (a.images.empty()) throw Error(ErrorCode::EmptySource, "nothing to put in the album");
      a.created_at = clock_();
      created = albums_->create(std::move(a));
    });
    return created;
  }

  // j
  /// Returns one warning per album image no longer in the corpus.
  std::vector<std::string> search_from_album(Session& s, const std::string& album_id) const {
    std::vector<std::string> warnings;
    transact(s, 'j', [&](Session& w) {
      auto album = albums_->find(album_id);
      if (!album) throw Error(ErrorCode::UnknownAlbum, "no album '" + album_id + "'");
      const auto vz = vectorizer(w.config);
      std::vector<TermVector> positives;
      ImageSet exclude;
      for (const auto& id : album->images) {
        const ImageRecord* r = corpus_->find(id);
        if (r == nullptr) {
          warnings.push_back("album image '" + id + "' is no longer in the corpus");
          continue;
        }
        exclude.insert(id);
        if (auto v = vz(*r); !v.empty()) positives.push_back(std::move(v));
      }
      if (exclude.empty()) throw Error(ErrorCode::AlbumFullyStale, "no image of '" + album_id + "' remains in the corpus");
      if (positives.empty()) throw Error(ErrorCode::EmptyQuery, "album images have no terms under the restriction");
      auto q = reformulate_query(std::nullopt, positives, {}, w.config.rocchio);
      if (q.degenerate) throw Error(ErrorCode::DegenerateQuery, "album produced an empty query");
      w.ranked = rank(q.query, *corpus_, vz, exclude);
      w.current_query = std::move(q.query);
    });
    return warnings;
  }

  // k
  void refresh_mosaic(Session& s, const Assignment& judgments = {}) const {
    transact(s, 'k', [&](Session& w) {
      if (!w.mosaic) throw Error(ErrorCode::NoMosaic, "session has no mosaic to refresh");
      apply_judgments(w, judgments);
      if (!w.mosaic->has_feedback() && w.groups.empty() && !w.current_query) {
        throw Error(ErrorCode::NoFeedback, "no judgments, no groups and no current query");
      }
      fold_mosaic(w);
      const auto vz = vectorizer(w.config);
      auto positives = vectors_of(w.groups.positive, vz);
      auto negatives = vectors_of(w.groups.negative, vz);
      if (!w.current_query && positives.empty()) {
        throw Error(ErrorCode::NoFeedback, "only negative feedback and no current query");
      }
      auto q = reformulate_query(w.current_query, positives, negatives, w.config.rocchio);
      if (!q.degenerate) {
        w.current_query = std::move(q.query);
      } else if (!w.current_query) {
        throw Error(ErrorCode::DegenerateQuery, "feedback cancelled every query term");
      }
      w.ranked = rank(*w.current_query, *corpus_, vz, w.judged_history);
      do_mosaic_from_ranked(w);
    });
  }

 private:
  template <class F>
  void transact(Session& s, char letter, F&& step) const {
    Session work = s;
    step(work);
    work.transition_log.push_back({letter, clock_()});
    s = std::move(work);
  }

  void require_image(const std::string& image) const {
    if (corpus_->find(image) == nullptr) throw Error(ErrorCode::UnknownImage, "no image '" + image + "' in the corpus");
  }

  void do_rank_from_image(Session& w, const std::string& image) const {
    require_image(image);
    const auto vz = vectorizer(w.config);
    auto query = vz(*corpus_->find(image));
    w.ranked = rank(query, *corpus_, vz, {image});
    w.current_query = std::move(query);
  }

  void do_mosaic_from_ranked(Session& w) const {
    if (!w.ranked) throw Error(ErrorCode::NoRankedList, "session has no ranked list");
    Mosaic m;
    m.round = w.mosaic ? w.mosaic->round + 1 : 1;
    for (const auto& e : w.ranked->entries) {
      if (m.tiles.size() == w.config.mosaic_size) break;
      if (w.judged_history.contains(e.image)) continue;
      m.tiles.push_back(e.image);
      m.judgments.emplace(e.image, Judgment::Neutral);
    }
    w.mosaic = std::move(m);
  }

  void apply_judgments(Session& w, const Assignment& judgments) const {
    if (!w.mosaic) throw Error(ErrorCode::NoMosaic, "session has no mosaic");
    for (const auto& [id, _] : judgments) {
      if (!w.mosaic->has_tile(id)) throw Error(ErrorCode::UnknownImage, "'" + id + "' is not a mosaic tile");
    }
    for (const auto& [id, j] : judgments) w.mosaic->judgments[id] = j;
  }

  void fold_mosaic(Session& w) const {
    for (const auto& t : w.mosaic->tiles) assign(w, t, w.mosaic->judgments.at(t));
  }

  static void assign(Session& w, const std::string& id, Judgment j) {
    w.groups.assign(id, j);
    if (j != Judgment::Neutral) w.judged_history.insert(id);
  }

  std::vector<TermVector> vectors_of(const ImageSet& ids, const Vectorizer& vz) const {
    std::vector<TermVector> out;
    for (const auto& id : ids) {
      if (auto v = vz(*corpus_->find(id)); !v.empty()) out.push_back(std::move(v));
    }
    return out;
  }

  std::shared_ptr<const Thesaurus> thesaurus_;
  std::shared_ptr<const Corpus> corpus_;
  std::shared_ptr<AlbumStore> albums_;
  Clock clock_;
  std::string checksum_;
};

}  // namespace refnav
