#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace refnav {

/// Every failure the engine can report. The string form (see to_string) is
/// the stable code surfaced by the CLI and the HTTP API.
enum class ErrorCode {
  MalformedFile,
  CategoryCountViolation,
  DuplicateCategory,
  DuplicateTerm,
  DanglingReference,
  UnknownCategory,
  UnknownTerm,
  WeightOutOfRange,
  DuplicateImageId,
  DuplicateTermInIndex,
  EmptyIndex,
  EmptyVector,
  EmptyQuery,
  EmptyFeedback,
  DegenerateQuery,
  UnknownImage,
  UnknownNode,
  UnknownAlbum,
  UnknownSession,
  NoGraph,
  NoMosaic,
  NoRankedList,
  NoSource,
  EmptySource,
  NoFeedback,
  AlbumFullyStale,
  EmptyCorpus,
  InvalidArgument,
  IoError,
};

inline constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::CategoryCountViolation: return "CategoryCountViolation";
    case ErrorCode::DuplicateCategory: return "DuplicateCategory";
    case ErrorCode::DuplicateTerm: return "DuplicateTerm";
    case ErrorCode::DanglingReference: return "DanglingReference";
    case ErrorCode::UnknownCategory: return "UnknownCategory";
    case ErrorCode::UnknownTerm: return "UnknownTerm";
    case ErrorCode::WeightOutOfRange: return "WeightOutOfRange";
    case ErrorCode::DuplicateImageId: return "DuplicateImageId";
    case ErrorCode::DuplicateTermInIndex: return "DuplicateTermInIndex";
    case ErrorCode::EmptyIndex: return "EmptyIndex";
    case ErrorCode::EmptyVector: return "EmptyVector";
    case ErrorCode::EmptyQuery: return "EmptyQuery";
    case ErrorCode::EmptyFeedback: return "EmptyFeedback";
    case ErrorCode::DegenerateQuery: return "DegenerateQuery";
    case ErrorCode::UnknownImage: return "UnknownImage";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::UnknownAlbum: return "UnknownAlbum";
    case ErrorCode::UnknownSession: return "UnknownSession";
    case ErrorCode::NoGraph: return "NoGraph";
    case ErrorCode::NoMosaic: return "NoMosaic";
    case ErrorCode::NoRankedList: return "NoRankedList";
    case ErrorCode::NoSource: return "NoSource";
    case ErrorCode::EmptySource: return "EmptySource";
    case ErrorCode::NoFeedback: return "NoFeedback";
    case ErrorCode::AlbumFullyStale: return "AlbumFullyStale";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// One broken invariant found while validating input data.
struct Violation {
  ErrorCode code;
  std::string record;  // image id, or empty for file-level problems
  std::string term;
  long long weight = 0;
  std::string message;

  bool operator==(const Violation&) const = default;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string message, std::vector<Violation> violations = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code),
        detail_(std::move(message)),
        violations_(std::move(violations)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  ErrorCode code_;
  std::string detail_;
  std::vector<Violation> violations_;
};

}  // namespace refnav
