#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cascadefuse {

enum class ErrorCode {
  // cascade data
  EmptyStory,
  NegativeTime,
  UnknownLabel,
  // point process
  NonPositiveDelay,
  NonPositiveWindow,
  InvalidInterval,
  TimeBeforeOrigin,
  ZeroDenominator,
  NonPositiveTime,
  EmptyGrid,
  ExplodingCascade,
  InvalidParams,
  // features
  EmptyCorpus,
  // neural core
  ShapeMismatch,
  DimensionalityMismatch,
  AllMasked,
  InvalidClass,
  GraphNotBuilt,
  NonFinite,
  // model / training
  ConfigMismatch,
  EmptyDataset,
  EmptySpace,
  // io / cli
  ParseError,
  MixedLabelSets,
  TooFewStories,
  UsageError,
  IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (and tests) can branch on the condition rather than the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// ParseError with the 1-based line number of the offending input line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace cascadefuse
