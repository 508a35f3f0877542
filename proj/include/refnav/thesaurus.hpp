#pragma once

// Controlled indexing vocabulary: exactly seven categories, each holding a
// flat, ordered list of terms. Category and term ids are opaque,
// case-sensitive strings; nothing in the engine interprets them.

#include <cstddef>
#include <istream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "refnav/error.hpp"

namespace refnav {

struct Term {
  std::string id;
  std::string label;
  std::string category;

  bool operator==(const Term&) const = default;
};

struct Category {
  std::string id;
  std::string label;
  std::vector<std::string> terms;  // term ids, file order

  bool operator==(const Category&) const = default;
};

class Thesaurus {
 public:
  static constexpr std::size_t kCategoryCount = 7;

  /// Validates and assembles a thesaurus. Throws Error on any invariant
  /// violation (category count, duplicate ids, empty ids).
  Thesaurus(std::string version, std::vector<Category> categories, std::vector<Term> terms)
      : version_(std::move(version)), categories_(std::move(categories)) {
    if (categories_.size() != kCategoryCount) {
      throw Error(ErrorCode::CategoryCountViolation,
                  "expected " + std::to_string(kCategoryCount) + " categories, found " +
                      std::to_string(categories_.size()));
    }
    for (std::size_t i = 0; i < categories_.size(); ++i) {
      const auto& cat = categories_[i];
      if (cat.id.empty()) throw Error(ErrorCode::MalformedFile, "category with empty id");
      if (!category_pos_.emplace(cat.id, i).second) {
        throw Error(ErrorCode::DuplicateCategory, "category '" + cat.id + "' declared twice");
      }
    }
    for (auto& term : terms) {
      if (term.id.empty()) throw Error(ErrorCode::MalformedFile, "term with empty id");
      if (!category_pos_.contains(term.category)) {
        throw Error(ErrorCode::DanglingReference,
                    "term '" + term.id + "' refers to unknown category '" + term.category + "'");
      }
      auto id = term.id;
      if (!terms_.emplace(id, std::move(term)).second) {
        throw Error(ErrorCode::DuplicateTerm, "term '" + id + "' declared twice");
      }
    }
    std::size_t listed = 0;
    for (const auto& cat : categories_) {
      for (const auto& tid : cat.terms) {
        auto it = terms_.find(tid);
        if (it == terms_.end() || it->second.category != cat.id) {
          throw Error(ErrorCode::DanglingReference,
                      "category '" + cat.id + "' lists term '" + tid + "' it does not own");
        }
        ++listed;
      }
    }
    if (listed != terms_.size()) {
      throw Error(ErrorCode::DanglingReference, "some terms are not listed by their category");
    }
  }

  const std::string& version() const noexcept { return version_; }
  const std::vector<Category>& categories() const noexcept { return categories_; }
  std::size_t term_count() const noexcept { return terms_.size(); }

  const Term* find_term(std::string_view id) const {
    auto it = terms_.find(id);
    return it == terms_.end() ? nullptr : &it->second;
  }

  const Category* find_category(std::string_view id) const {
    auto it = category_pos_.find(id);
    return it == category_pos_.end() ? nullptr : &categories_[it->second];
  }

  std::vector<Term> terms_of_category(std::string_view id) const {
    const Category* cat = find_category(id);
    if (cat == nullptr) {
      throw Error(ErrorCode::UnknownCategory, "unknown category '" + std::string(id) + "'");
    }
    std::vector<Term> out;
    out.reserve(cat->terms.size());
    for (const auto& tid : cat->terms) out.push_back(terms_.find(tid)->second);
    return out;
  }

  bool operator==(const Thesaurus& other) const {
    return version_ == other.version_ && categories_ == other.categories_ && terms_ == other.terms_;
  }

 private:
  std::string version_;
  std::vector<Category> categories_;
  std::map<std::string, Term, std::less<>> terms_;
  std::map<std::string, std::size_t, std::less<>> category_pos_;
};

namespace detail {

inline const nlohmann::json& require(const nlohmann::json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw Error(ErrorCode::MalformedFile, where + ": missing field '" + key + "'");
  return *it;
}

inline std::string require_string(const nlohmann::json& obj, const char* key, const std::string& where) {
  const auto& v = require(obj, key, where);
  if (!v.is_string()) throw Error(ErrorCode::MalformedFile, where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

inline void reject_unknown_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed,
                                const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (auto a : allowed) ok = ok || it.key() == a;
    if (!ok) throw Error(ErrorCode::MalformedFile, where + ": unexpected field '" + it.key() + "'");
  }
}

inline nlohmann::json parse_json(std::string_view text, const std::string& where) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::MalformedFile, where + ": " + e.what());
  }
}

inline std::string read_all(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

inline Thesaurus thesaurus_from_json(const nlohmann::json& doc) {
  using namespace detail;
  if (!doc.is_object()) throw Error(ErrorCode::MalformedFile, "thesaurus: top level must be an object");
  reject_unknown_keys(doc, {"version", "categories"}, "thesaurus");
  auto version = require_string(doc, "version", "thesaurus");
  const auto& cats = require(doc, "categories", "thesaurus");
  if (!cats.is_array()) throw Error(ErrorCode::MalformedFile, "thesaurus: 'categories' must be an array");

  std::vector<Category> categories;
  std::vector<Term> terms;
  for (std::size_t i = 0; i < cats.size(); ++i) {
    const auto& c = cats[i];
    const std::string where = "categories[" + std::to_string(i) + "]";
    if (!c.is_object()) throw Error(ErrorCode::MalformedFile, where + " must be an object");
    reject_unknown_keys(c, {"id", "label", "terms"}, where);
    Category cat{require_string(c, "id", where), require_string(c, "label", where), {}};
    const auto& ts = require(c, "terms", where);
    if (!ts.is_array()) throw Error(ErrorCode::MalformedFile, where + ": 'terms' must be an array");
    for (std::size_t j = 0; j < ts.size(); ++j) {
      const auto& t = ts[j];
      const std::string twhere = where + ".terms[" + std::to_string(j) + "]";
      if (!t.is_object()) throw Error(ErrorCode::MalformedFile, twhere + " must be an object");
      reject_unknown_keys(t, {"id", "label", "category"}, twhere);
      Term term{require_string(t, "id", twhere), require_string(t, "label", twhere), cat.id};
      if (t.contains("category")) {
        auto declared = require_string(t, "category", twhere);
        if (declared != cat.id) {
          throw Error(ErrorCode::DanglingReference,
                      twhere + ": term '" + term.id + "' declares category '" + declared +
                          "' but is listed under '" + cat.id + "'");
        }
      }
      cat.terms.push_back(term.id);
      terms.push_back(std::move(term));
    }
    categories.push_back(std::move(cat));
  }
  return Thesaurus(std::move(version), std::move(categories), std::move(terms));
}

inline Thesaurus parse_thesaurus(std::string_view text) {
  return thesaurus_from_json(detail::parse_json(text, "thesaurus"));
}

inline Thesaurus load_thesaurus(std::istream& in) { return parse_thesaurus(detail::read_all(in)); }

inline nlohmann::ordered_json to_json(const Thesaurus& th) {
  nlohmann::ordered_json doc;
  doc["version"] = th.version();
  auto cats = nlohmann::ordered_json::array();
  for (const auto& cat : th.categories()) {
    nlohmann::ordered_json c;
    c["id"] = cat.id;
    c["label"] = cat.label;
    auto ts = nlohmann::ordered_json::array();
    for (const auto& tid : cat.terms) {
      const Term* term = th.find_term(tid);
      ts.push_back({{"id", term->id}, {"label", term->label}});
    }
    c["terms"] = std::move(ts);
    cats.push_back(std::move(c));
  }
  doc["categories"] = std::move(cats);
  return doc;
}

/// Canonical text: two-space indented JSON, fixed key order, trailing newline.
inline std::string serialize_thesaurus(const Thesaurus& th) { return to_json(th).dump(2) + "\n"; }

}  // namespace refnav
