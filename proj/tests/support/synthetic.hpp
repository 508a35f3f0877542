#pragma once

// Synthetic thesauri and corpora for tests.

#include <memory>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "refnav/catalog.hpp"
#include "refnav/thesaurus.hpp"

namespace refnav::fixtures {

/// Thesaurus text with `categories` categories named c0..cN, each holding
/// `terms_per_category` terms named cI.tJ.
inline std::string thesaurus_text(std::size_t categories = 7, std::size_t terms_per_category = 4,
                                  std::string version = "test-1") {
  nlohmann::ordered_json doc;
  doc["version"] = version;
  auto cats = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < categories; ++c) {
    nlohmann::ordered_json cat;
    cat["id"] = "c" + std::to_string(c);
    cat["label"] = "Category " + std::to_string(c);
    auto terms = nlohmann::ordered_json::array();
    for (std::size_t t = 0; t < terms_per_category; ++t) {
      auto id = "c" + std::to_string(c) + ".t" + std::to_string(t);
      terms.push_back({{"id", id}, {"label", "term " + id}});
    }
    cat["terms"] = std::move(terms);
    cats.push_back(std::move(cat));
  }
  doc["categories"] = std::move(cats);
  return doc.dump(2) + "\n";
}

inline std::shared_ptr<const Thesaurus> make_thesaurus(std::size_t terms_per_category = 4) {
  return std::make_shared<const Thesaurus>(parse_thesaurus(thesaurus_text(7, terms_per_category)));
}

inline std::vector<std::string> all_term_ids(const Thesaurus& th) {
  std::vector<std::string> out;
  for (const auto& c : th.categories()) out.insert(out.end(), c.terms.begin(), c.terms.end());
  return out;
}

inline ImageRecord make_record(std::string id, std::vector<std::pair<std::string, long long>> entries) {
  ImageRecord r;
  r.id = std::move(id);
  r.uri = "file:///refs/" + r.id + ".jpg";
  for (auto& [t, w] : entries) r.index.push_back({std::move(t), w});
  return r;
}

inline std::string image_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "img-%03zu", i);
  return buf;
}

/// Record with between `min_terms` and `max_terms` distinct terms, weights
/// uniform in 1..4.
inline ImageRecord random_record(std::mt19937_64& rng, std::string id, const std::vector<std::string>& vocabulary,
                                 std::size_t min_terms = 1, std::size_t max_terms = 6) {
  std::uniform_int_distribution<std::size_t> count(min_terms, std::min(max_terms, vocabulary.size()));
  std::uniform_int_distribution<long long> weight(1, 4);
  std::vector<std::string> pool = vocabulary;
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(count(rng));
  std::vector<std::pair<std::string, long long>> entries;
  for (auto& t : pool) entries.emplace_back(std::move(t), weight(rng));
  return make_record(std::move(id), std::move(entries));
}

inline std::vector<ImageRecord> random_records(std::mt19937_64& rng, std::size_t n, const Thesaurus& th,
                                               std::size_t min_terms = 1, std::size_t max_terms = 6) {
  auto vocab = all_term_ids(th);
  std::vector<ImageRecord> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_record(rng, image_id(i), vocab, min_terms, max_terms));
  // Shuffled order: ranking must not depend on file order.
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

inline std::shared_ptr<const Corpus> random_corpus(std::mt19937_64& rng, std::size_t n, const Thesaurus& th,
                                                   std::size_t min_terms = 1, std::size_t max_terms = 6) {
  return std::make_shared<const Corpus>(random_records(rng, n, th, min_terms, max_terms), th);
}

}  // namespace refnav::fixtures
