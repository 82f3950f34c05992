#include "cascadefuse/error.hpp"

namespace cascadefuse {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyStory: return "EmptyStory";
    case ErrorCode::NegativeTime: return "NegativeTime";
    case ErrorCode::UnknownLabel: return "UnknownLabel";
    case ErrorCode::NonPositiveDelay: return "NonPositiveDelay";
    case ErrorCode::NonPositiveWindow: return "NonPositiveWindow";
    case ErrorCode::InvalidInterval: return "InvalidInterval";
    case ErrorCode::TimeBeforeOrigin: return "TimeBeforeOrigin";
    case ErrorCode::ZeroDenominator: return "ZeroDenominator";
    case ErrorCode::NonPositiveTime: return "NonPositiveTime";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::ExplodingCascade: return "ExplodingCascade";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DimensionalityMismatch: return "DimensionalityMismatch";
    case ErrorCode::AllMasked: return "AllMasked";
    case ErrorCode::InvalidClass: return "InvalidClass";
    case ErrorCode::GraphNotBuilt: return "GraphNotBuilt";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::ConfigMismatch: return "ConfigMismatch";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::EmptySpace: return "EmptySpace";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::MixedLabelSets: return "MixedLabelSets";
    case ErrorCode::TooFewStories: return "TooFewStories";
    case ErrorCode::UsageError: return "UsageError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace cascadefuse
