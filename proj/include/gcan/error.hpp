#pragma once

#include <stdexcept>
#include <string>

namespace gcan {

enum class ErrorCode {
  dimension_cap,
  bad_signature,
  signature_mismatch,
  grade_out_of_range,
  not_normable,
  non_invertible,
  mask_violation,
  shape_mismatch,
  parse_error,
  invalid_config,
  non_finite,
  io_error,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::dimension_cap: return "dimension cap exceeded";
    case ErrorCode::bad_signature: return "bad signature";
    case ErrorCode::signature_mismatch: return "signature mismatch";
    case ErrorCode::grade_out_of_range: return "grade out of range";
    case ErrorCode::not_normable: return "not a versor-normable element";
    case ErrorCode::non_invertible: return "non-invertible (null) element";
    case ErrorCode::mask_violation: return "blade mask violation";
    case ErrorCode::shape_mismatch: return "shape mismatch";
    case ErrorCode::parse_error: return "parse error";
    case ErrorCode::invalid_config: return "invalid configuration";
    case ErrorCode::non_finite: return "non-finite value";
    case ErrorCode::io_error: return "i/o error";
  }
  return "unknown error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gcan
