#pragma once

// Image records and the corpus. A record splits into informational data
// (never used for matching) and a searchable index of weighted thesaurus
// terms. Weights are star counts, 1 to 4 inclusive.

#include <array>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "refnav/error.hpp"
#include "refnav/thesaurus.hpp"

namespace refnav {

inline constexpr int kMinWeight = 1;
inline constexpr int kMaxWeight = 4;

struct InformationalData {
  std::optional<std::string> title;
  std::optional<std::string> creator;
  std::optional<std::string> location;
  std::optional<std::string> source;
  std::optional<std::string> rights;
  std::optional<std::string> notes;

  bool operator==(const InformationalData&) const = default;
};

struct IndexEntry {
  std::string term;
  long long weight = 0;

  bool operator==(const IndexEntry&) const = default;
};

struct ImageRecord {
  std::string id;
  std::string uri;
  InformationalData info;
  std::vector<IndexEntry> index;  // source order

  bool operator==(const ImageRecord&) const = default;
};

/// Every invariant the record breaks against `th`, each reported once.
inline std::vector<Violation> validate_record(const ImageRecord& r, const Thesaurus& th) {
  std::vector<Violation> out;
  if (r.index.empty()) {
    out.push_back({ErrorCode::EmptyIndex, r.id, {}, 0, "image '" + r.id + "' has no index entries"});
  }
  std::set<std::string, std::less<>> seen;
  std::set<std::string, std::less<>> reported_dup;
  for (const auto& e : r.index) {
    if (th.find_term(e.term) == nullptr) {
      out.push_back({ErrorCode::UnknownTerm, r.id, e.term, e.weight,
                     "image '" + r.id + "' uses unknown term '" + e.term + "'"});
    }
    if (e.weight < kMinWeight || e.weight > kMaxWeight) {
      out.push_back({ErrorCode::WeightOutOfRange, r.id, e.term, e.weight,
                     "image '" + r.id + "' weights term '" + e.term + "' with " + std::to_string(e.weight) +
                         " stars (allowed 1..4)"});
    }
    if (!seen.insert(e.term).second && reported_dup.insert(e.term).second) {
      out.push_back({ErrorCode::DuplicateTermInIndex, r.id, e.term, e.weight,
                     "image '" + r.id + "' indexes term '" + e.term + "' more than once"});
    }
  }
  return out;
}

class Corpus {
 public:
  Corpus() = default;

  /// Validates every record; all-or-nothing. The thrown Error carries the
  /// complete violation list and the code of the first violation.
  Corpus(std::vector<ImageRecord> records, const Thesaurus& th) : thesaurus_version_(th.version()) {
    std::vector<Violation> violations;
    for (std::size_t i = 0; i < records.size(); ++i) {
      const auto& r = records[i];
      if (!positions_.emplace(r.id, i).second) {
        violations.push_back({ErrorCode::DuplicateImageId, r.id, {}, 0, "image id '" + r.id + "' appears twice"});
      }
      auto vs = validate_record(r, th);
      violations.insert(violations.end(), vs.begin(), vs.end());
    }
    if (!violations.empty()) {
      std::string report;
      for (const auto& v : violations) report += "\n  " + std::string(to_string(v.code)) + ": " + v.message;
      auto code = violations.front().code;
      auto message = std::to_string(violations.size()) + " violation(s)" + report;
      throw Error(code, std::move(message), std::move(violations));
    }
    records_ = std::move(records);
  }

  const std::string& thesaurus_version() const noexcept { return thesaurus_version_; }
  const std::vector<ImageRecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }

  const ImageRecord* find(std::string_view id) const {
    auto it = positions_.find(id);
    return it == positions_.end() ? nullptr : &records_[it->second];
  }

  bool operator==(const Corpus& other) const {
    return thesaurus_version_ == other.thesaurus_version_ && records_ == other.records_;
  }

 private:
  std::string thesaurus_version_;
  std::vector<ImageRecord> records_;
  std::map<std::string, std::size_t, std::less<>> positions_;
};

namespace detail {

inline constexpr std::array<std::pair<const char*, std::optional<std::string> InformationalData::*>, 6> kInfoFields{{
    {"title", &InformationalData::title},
    {"creator", &InformationalData::creator},
    {"location", &InformationalData::location},
    {"source", &InformationalData::source},
    {"rights", &InformationalData::rights},
    {"notes", &InformationalData::notes},
}};

inline ImageRecord record_from_json(const nlohmann::json& obj, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::MalformedFile, where + ": record must be an object");
  reject_unknown_keys(obj, {"id", "uri", "info", "index"}, where);
  ImageRecord r;
  r.id = require_string(obj, "id", where);
  if (r.id.empty()) throw Error(ErrorCode::MalformedFile, where + ": empty image id");
  r.uri = require_string(obj, "uri", where);
  if (auto it = obj.find("info"); it != obj.end()) {
    if (!it->is_object()) throw Error(ErrorCode::MalformedFile, where + ": 'info' must be an object");
    reject_unknown_keys(*it, {"title", "creator", "location", "source", "rights", "notes"}, where + ".info");
    for (const auto& [key, member] : kInfoFields) {
      if (it->contains(key)) r.info.*member = require_string(*it, key, where + ".info");
    }
  }
  const auto& index = require(obj, "index", where);
  if (!index.is_array()) throw Error(ErrorCode::MalformedFile, where + ": 'index' must be an array");
  for (std::size_t j = 0; j < index.size(); ++j) {
    const auto& e = index[j];
    const std::string ewhere = where + ".index[" + std::to_string(j) + "]";
    if (!e.is_object()) throw Error(ErrorCode::MalformedFile, ewhere + " must be an object");
    reject_unknown_keys(e, {"term", "weight"}, ewhere);
    const auto& w = require(e, "weight", ewhere);
    if (!w.is_number_integer()) throw Error(ErrorCode::MalformedFile, ewhere + ": 'weight' must be an integer");
    r.index.push_back({require_string(e, "term", ewhere), w.get<long long>()});
  }
  return r;
}

}  // namespace detail

inline nlohmann::ordered_json to_json(const ImageRecord& r) {
  nlohmann::ordered_json obj;
  obj["id"] = r.id;
  obj["uri"] = r.uri;
  auto info = nlohmann::ordered_json::object();
  for (const auto& [key, member] : detail::kInfoFields) {
    if (const auto& v = r.info.*member) info[key] = *v;
  }
  obj["info"] = std::move(info);
  auto index = nlohmann::ordered_json::array();
  for (const auto& e : r.index) index.push_back({{"term", e.term}, {"weight", e.weight}});
  obj["index"] = std::move(index);
  return obj;
}

/// Parses one JSON-lines corpus file. Blank lines are skipped; any syntax
/// error aborts with MalformedFile naming the line.
inline Corpus parse_corpus(std::string_view text, const Thesaurus& th) {
  std::vector<ImageRecord> records;
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string where = "corpus line " + std::to_string(line_no);
    records.push_back(detail::record_from_json(detail::parse_json(line, where), where));
  }
  return Corpus(std::move(records), th);
}

inline Corpus ingest_corpus(std::istream& in, const Thesaurus& th) { return parse_corpus(detail::read_all(in), th); }

/// Canonical text: one compact JSON object per line, fixed key order.
inline std::string serialize_corpus(const Corpus& c) {
  std::string out;
  for (const auto& r : c.records()) out += to_json(r).dump() + "\n";
  return out;
}

/// FNV-1a 64 over the canonical serialization, as 16 hex digits.
inline std::string corpus_checksum(const Corpus& c) {
  std::uint64_t h = 14695981039346656037ull;
  auto mix = [&h](std::string_view s) {
    for (unsigned char ch : s) {
      h ^= ch;
      h *= 1099511628211ull;
    }
  };
  mix(c.thesaurus_version());
  mix("\n");
  mix(serialize_corpus(c));
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace refnav
