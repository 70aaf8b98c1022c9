#pragma once

#include <stdexcept>
#include <string>

namespace liouville {

/// Failure categories; the CLI maps them onto exit codes.
enum class ErrorKind {
  invalid_weight,
  singular_boundary,
  out_of_domain,
  invalid_argument,
  blowup_overflow,
  non_convergence,
  inconsistent_distribution,
  insufficient_tail,
  invalid_case,
  invalid_domain,
  usage,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// True for errors that come from the numerics rather than from bad input.
inline bool is_numerical(ErrorKind k) {
  switch (k) {
    case ErrorKind::blowup_overflow:
    case ErrorKind::non_convergence:
    case ErrorKind::inconsistent_distribution:
    case ErrorKind::insufficient_tail:
      return true;
    default:
      return false;
  }
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace liouville
