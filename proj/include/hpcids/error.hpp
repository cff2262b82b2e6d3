#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hpcids {

enum class ErrorKind {
  MalformedRecord,
  HeaderMismatch,
  EmptyProfile,
  InvalidArgument,
  UnterminatedSection,
  LabelCountMismatch,
  TooFewSamples,
  ShapeMismatch,
  LengthMismatch,
  MissingLabels,
  NuOutOfRange,
  DimensionMismatch,
  EmptyCounts,
  InsufficientData,
  Config,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure the library reports is an hpcids::Error carrying its kind,
// so callers can dispatch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MalformedRecord: return "MalformedRecord";
    case ErrorKind::HeaderMismatch: return "HeaderMismatch";
    case ErrorKind::EmptyProfile: return "EmptyProfile";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::UnterminatedSection: return "UnterminatedSection";
    case ErrorKind::LabelCountMismatch: return "LabelCountMismatch";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::MissingLabels: return "MissingLabels";
    case ErrorKind::NuOutOfRange: return "NuOutOfRange";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyCounts: return "EmptyCounts";
    case ErrorKind::InsufficientData: return "InsufficientData";
    case ErrorKind::Config: return "Config";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

// One skipped record in a lenient parse.
struct Diagnostic {
  std::size_t line = 0;
  std::string message;
};

}  // namespace hpcids
