#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jetflag {

enum class ErrorCode {
  parse,
  unknown_function,
  unbound_variable,
  domain,
  dimension_mismatch,
  axis_out_of_range,
  truncation,
  invalid_argument,
  not_converged,
  singular,
  foreign_variable,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Every failure path reports one of the codes above;
/// the CLI maps them onto exit status 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure carrying the byte offset into the input text.
class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error(ErrorCode::parse, message + " at position " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace jetflag
