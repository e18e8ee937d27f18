#include "jetflag/error.hpp"

namespace jetflag {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::parse: return "parse";
    case ErrorCode::unknown_function: return "unknown_function";
    case ErrorCode::unbound_variable: return "unbound_variable";
    case ErrorCode::domain: return "domain";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::axis_out_of_range: return "axis_out_of_range";
    case ErrorCode::truncation: return "truncation";
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::not_converged: return "not_converged";
    case ErrorCode::singular: return "singular";
    case ErrorCode::foreign_variable: return "foreign_variable";
  }
  return "unknown";
}

}  // namespace jetflag
