#pragma once

#include <stdexcept>
#include <string>

namespace roadprio {

/// Error categories surfaced by the pipeline. The CLI maps parse_error to
/// exit code 2 and every other category to exit code 3.
enum class errc {
  degenerate_geometry,
  road_too_short,
  empty_sequence,
  shape_mismatch,
  insufficient_samples,
  not_normalized,
  missing_score,
  orphan_requirement,
  empty_suite,
  no_failures,
  invalid_spec,
  invalid_argument,
  parse_error,
};

inline const char* errc_name(errc code) {
  switch (code) {
    case errc::degenerate_geometry: return "DegenerateGeometry";
    case errc::road_too_short: return "RoadTooShort";
    case errc::empty_sequence: return "EmptySequence";
    case errc::shape_mismatch: return "ShapeMismatch";
    case errc::insufficient_samples: return "InsufficientSamples";
    case errc::not_normalized: return "NotNormalized";
    case errc::missing_score: return "MissingScore";
    case errc::orphan_requirement: return "OrphanRequirement";
    case errc::empty_suite: return "EmptySuite";
    case errc::no_failures: return "NoFailures";
    case errc::invalid_spec: return "InvalidSpec";
    case errc::invalid_argument: return "InvalidArgument";
    case errc::parse_error: return "ParseError";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace roadprio
