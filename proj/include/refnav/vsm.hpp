#pragma once

// Vector-space model over weighted index terms: sparse term vectors, the
// cosine coefficient, relevance ranking and Rocchio query reformulation.
//
// Magnitudes are the raw star weights unless Weighting::StarsIdf is chosen.
// All arithmetic is 64-bit floating point.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <concepts>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "refnav/catalog.hpp"
#include "refnav/error.hpp"
#include "refnav/thesaurus.hpp"

namespace refnav {

/// The part of the index a vector is built from: every category, or a
/// named subset of categories.
class Restriction {
 public:
  static Restriction all() { return Restriction(); }
  static Restriction only(std::set<std::string> categories) {
    Restriction r;
    r.categories_ = std::move(categories);
    return r;
  }

  bool is_all() const noexcept { return !categories_.has_value(); }
  const std::set<std::string>& categories() const {
    static const std::set<std::string> none;
    return categories_ ? *categories_ : none;
  }
  bool includes(std::string_view category) const {
    return !categories_ || categories_->contains(std::string(category));
  }

  /// Throws UnknownCategory if any named category is not in `th`.
  void check(const Thesaurus& th) const {
    for (const auto& c : categories()) {
      if (th.find_category(c) == nullptr) throw Error(ErrorCode::UnknownCategory, "unknown category '" + c + "'");
    }
  }

  bool operator==(const Restriction&) const = default;

 private:
  std::optional<std::set<std::string>> categories_;
};

/// Sparse, non-negative term vector. Zero components are never stored.
class TermVector {
 public:
  using Components = std::map<std::string, double, std::less<>>;

  TermVector() = default;
  explicit TermVector(Restriction scope) : scope_(std::move(scope)) {}

  void set(std::string term, double magnitude) {
    if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
      throw Error(ErrorCode::InvalidArgument, "term vector magnitudes must be finite and non-negative");
    }
    if (magnitude == 0.0) {
      components_.erase(term);
    } else {
      components_[std::move(term)] = magnitude;
    }
  }

  double get(std::string_view term) const {
    auto it = components_.find(term);
    return it == components_.end() ? 0.0 : it->second;
  }

  const Components& components() const noexcept { return components_; }
  const Restriction& scope() const noexcept { return scope_; }
  std::size_t size() const noexcept { return components_.size(); }
  bool empty() const noexcept { return components_.empty(); }
  auto begin() const { return components_.begin(); }
  auto end() const { return components_.end(); }

  double squared_norm() const {
    double s = 0.0;
    for (const auto& [_, v] : components_) s += v * v;
    return s;
  }

  bool operator==(const TermVector&) const = default;

 private:
  Components components_;
  Restriction scope_;
};

/// Diagnostic dump: one `term=magnitude` line per component, sorted by term
/// id, magnitudes in shortest round-trip form.
inline std::string dump(const TermVector& v) {
  std::string out;
  char buf[32];
  for (const auto& [term, mag] : v) {
    auto res = std::to_chars(buf, buf + sizeof buf, mag);
    out += term;
    out += '=';
    out.append(buf, res.ptr);
    out += '\n';
  }
  return out;
}

enum class Weighting { Stars, StarsIdf };

/// Builds term vectors for one thesaurus, restriction and weighting scheme.
class Vectorizer {
 public:
  Vectorizer(const Thesaurus& th, Restriction restriction) : th_(&th), restriction_(std::move(restriction)) {
    restriction_.check(th);
  }

  /// Star weights multiplied by log(N / df) computed over `corpus`. Terms
  /// present in every image end up with weight 0 and are dropped.
  Vectorizer(const Thesaurus& th, Restriction restriction, const Corpus& corpus)
      : Vectorizer(th, std::move(restriction)) {
    std::map<std::string, std::size_t, std::less<>> df;
    for (const auto& r : corpus.records()) {
      for (const auto& e : r.index) ++df[e.term];
    }
    idf_.emplace();
    const double n = static_cast<double>(corpus.size());
    for (const auto& [term, count] : df) (*idf_)[term] = std::log(n / static_cast<double>(count));
  }

  const Restriction& restriction() const noexcept { return restriction_; }
  const Thesaurus& thesaurus() const noexcept { return *th_; }

  TermVector operator()(const ImageRecord& r) const {
    TermVector v(restriction_);
    for (const auto& e : r.index) {
      const Term* term = th_->find_term(e.term);
      if (term == nullptr || !restriction_.includes(term->category)) continue;
      v.set(e.term, static_cast<double>(e.weight) * idf(e.term));
    }
    return v;
  }

  /// Drops components outside the restriction (or unknown to the
  /// thesaurus) and applies the weighting scheme.
  TermVector restrict(const TermVector& in) const {
    TermVector v(restriction_);
    for (const auto& [t, mag] : in) {
      const Term* term = th_->find_term(t);
      if (term == nullptr || !restriction_.includes(term->category)) continue;
      v.set(t, mag * idf(t));
    }
    return v;
  }

 private:
  double idf(std::string_view term) const {
    if (!idf_) return 1.0;
    auto it = idf_->find(term);
    return it == idf_->end() ? 0.0 : it->second;
  }

  const Thesaurus* th_;
  Restriction restriction_;
  std::optional<std::map<std::string, double, std::less<>>> idf_;
};

inline TermVector vectorize(const ImageRecord& r, const Restriction& restriction, const Thesaurus& th) {
  return Vectorizer(th, restriction)(r);
}

/// Pluggable similarity contract: a symmetric score in [0, 1].
template <class S>
concept SimilarityMeasure = requires(const S& s, const TermVector& a, const TermVector& b) {
  { s(a, b) } -> std::convertible_to<double>;
};

struct CosineSimilarity {
  double operator()(const TermVector& a, const TermVector& b) const {
    if (a.empty() || b.empty()) throw Error(ErrorCode::EmptyVector, "similarity of an empty vector is undefined");
    const auto& small = a.size() <= b.size() ? a : b;
    const auto& large = a.size() <= b.size() ? b : a;
    double dot = 0.0;
    for (const auto& [t, v] : small) dot += v * large.get(t);
    // sqrt(dot^2 / (|a|^2 |b|^2)): with integer star weights every
    // intermediate is exact, so equal cosines yield bit-equal scores and
    // the id tie-break stays exact.
    double score = std::sqrt((dot * dot) / (a.squared_norm() * b.squared_norm()));
    return std::clamp(score, 0.0, 1.0);
  }
};

inline double similarity(const TermVector& a, const TermVector& b) { return CosineSimilarity{}(a, b); }

struct RankedEntry {
  std::string image;
  double score = 0.0;

  bool operator==(const RankedEntry&) const = default;
};

/// Descending by score, ties by ascending image id.
struct RankedList {
  std::vector<RankedEntry> entries;

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.image);
    return out;
  }
  bool contains(std::string_view id) const {
    return std::any_of(entries.begin(), entries.end(), [&](const auto& e) { return e.image == id; });
  }
  std::size_t size() const noexcept { return entries.size(); }
  bool empty() const noexcept { return entries.empty(); }

  bool operator==(const RankedList&) const = default;
};

inline bool ranks_before(const RankedEntry& a, const RankedEntry& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.image < b.image;
}

/// Scores every corpus image not in `exclude`. Images whose vector is empty
/// under the vectorizer's restriction are left out rather than scored 0.
template <SimilarityMeasure Similarity = CosineSimilarity>
RankedList rank(const TermVector& query, const Corpus& corpus, const Vectorizer& vectorizer,
                const std::set<std::string, std::less<>>& exclude = {}, const Similarity& sim = {}) {
  if (query.empty()) throw Error(ErrorCode::EmptyQuery, "query vector has no components");
  RankedList out;
  out.entries.reserve(corpus.size());
  for (const auto& r : corpus.records()) {
    if (exclude.contains(r.id)) continue;
    auto v = vectorizer(r);
    if (v.empty()) continue;
    out.entries.push_back({r.id, static_cast<double>(sim(query, v))});
  }
  std::sort(out.entries.begin(), out.entries.end(), ranks_before);
  return out;
}

inline RankedList rank(const TermVector& query, const Corpus& corpus, const Restriction& restriction,
                       const Thesaurus& th, const std::set<std::string, std::less<>>& exclude = {}) {
  return rank(query, corpus, Vectorizer(th, restriction), exclude);
}

struct RocchioParams {
  double alpha = 1.0;
  double beta = 0.75;
  double gamma = 0.25;

  bool operator==(const RocchioParams&) const = default;
};

/// Component-wise mean. Empty input gives an empty vector.
inline TermVector centroid(std::span<const TermVector> vectors) {
  TermVector out(vectors.empty() ? Restriction::all() : vectors.front().scope());
  if (vectors.empty()) return out;
  std::map<std::string, double, std::less<>> sum;
  for (const auto& v : vectors) {
    for (const auto& [t, m] : v) sum[t] += m;
  }
  const double n = static_cast<double>(vectors.size());
  for (auto& [t, s] : sum) out.set(t, s / n);
  return out;
}

struct Reformulation {
  TermVector query;
  bool degenerate = false;  // every component cancelled out
};

/// q' = alpha*q + beta*mean(positives) - gamma*mean(negatives), negative
/// components clamped to 0. An absent q counts as the zero vector.
inline Reformulation reformulate_query(const std::optional<TermVector>& query, std::span<const TermVector> positives,
                                       std::span<const TermVector> negatives, const RocchioParams& params = {}) {
  if ((!query || query->empty()) && positives.empty()) {
    throw Error(ErrorCode::EmptyFeedback, "reformulation needs a query or at least one positive example");
  }
  const auto pos = centroid(positives);
  const auto neg = centroid(negatives);
  std::set<std::string, std::less<>> terms;
  if (query) {
    for (const auto& [t, _] : *query) terms.insert(t);
  }
  for (const auto& [t, _] : pos) terms.insert(t);

  Restriction scope = query ? query->scope() : positives.front().scope();
  Reformulation out{TermVector(scope), false};
  for (const auto& t : terms) {
    double q = query ? query->get(t) : 0.0;
    double value = params.alpha * q + params.beta * pos.get(t) - params.gamma * neg.get(t);
    if (value > 0.0) out.query.set(t, value);
  }
  out.degenerate = out.query.empty();
  return out;
}

}  // namespace refnav
