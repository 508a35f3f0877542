#pragma once

// Similarity graphs: images as nodes, an undirected edge whenever two
// images are similar enough. Edges always carry a score > 0 and >= the
// graph's threshold.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "refnav/catalog.hpp"
#include "refnav/error.hpp"
#include "refnav/vsm.hpp"

namespace refnav {

using ImageSet = std::set<std::string, std::less<>>;

/// Unordered pair stored with first < second.
struct EdgeKey {
  std::string first;
  std::string second;

  EdgeKey(std::string a, std::string b) {
    if (b < a) std::swap(a, b);
    first = std::move(a);
    second = std::move(b);
  }
  auto operator<=>(const EdgeKey&) const = default;
};

struct SimilarityGraph {
  ImageSet nodes;
  std::map<EdgeKey, double> edges;
  ImageSet frontier;  // nodes not expanded yet

  /// Returns false for self-edges; re-adding a pair keeps the first score.
  bool add_edge(const std::string& u, const std::string& v, double score) {
    if (u == v) return false;
    nodes.insert(u);
    nodes.insert(v);
    return edges.emplace(EdgeKey(u, v), score).second;
  }

  bool operator==(const SimilarityGraph&) const = default;
};

inline bool qualifies_as_edge(double score, double threshold) { return score > 0.0 && score >= threshold; }

/// Top-k images most similar to `query` with a qualifying score, ranked
/// by score then id.
inline RankedList top_neighbors(const TermVector& query, const Corpus& corpus, const Vectorizer& vectorizer,
                                const ImageSet& exclude, double threshold, std::size_t k) {
  RankedList out;
  if (query.empty() || k == 0) return out;
  for (auto& e : rank(query, corpus, vectorizer, exclude).entries) {
    if (out.size() == k || !qualifies_as_edge(e.score, threshold)) break;
    out.entries.push_back(std::move(e));
  }
  return out;
}

/// Whole-corpus graph: every image with a non-empty vector is a node; each
/// node proposes edges to its top-k qualifying neighbours and an edge is
/// kept when either endpoint proposes it.
inline SimilarityGraph build_similarity_graph(const Corpus& corpus, const Vectorizer& vectorizer,
                                              double edge_threshold, std::size_t k) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot build a graph over an empty corpus");
  std::vector<std::pair<std::string, TermVector>> vectors;
  for (const auto& r : corpus.records()) {
    auto v = vectorizer(r);
    if (!v.empty()) vectors.emplace_back(r.id, std::move(v));
  }
  SimilarityGraph g;
  for (const auto& [id, _] : vectors) g.nodes.insert(id);

  const std::size_t n = vectors.size();
  std::vector<std::vector<double>> scores(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      scores[i][j] = scores[j][i] = similarity(vectors[i].second, vectors[j].second);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<RankedEntry> candidates;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && qualifies_as_edge(scores[i][j], edge_threshold)) {
        candidates.push_back({vectors[j].first, scores[i][j]});
      }
    }
    std::sort(candidates.begin(), candidates.end(), ranks_before);
    if (candidates.size() > k) candidates.resize(k);
    for (const auto& c : candidates) g.add_edge(vectors[i].first, c.image, c.score);
  }
  return g;
}

}  // namespace refnav
