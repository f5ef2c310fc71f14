#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fman {

enum class Errc {
  parse,           // malformed expression or model file
  domain,          // analytic function outside its domain, division by zero
  shape,           // incompatible jet shapes / dimension mismatch
  singular,        // singular matrix in a linear solve
  not_cyclic,      // frame e, X, X^2, ... degenerate at the point
  invalid,         // precondition violated (orders, chart not adapted, ...)
  no_convergence,  // iteration exceeded its budget
  io,              // file access
  unknown_name,    // unknown builtin, field, function or coordinate
};

/// Byte range into the text a parse error refers to.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;
};

class Error : public std::runtime_error {
public:
  Error(Errc code, std::string msg) : std::runtime_error(std::move(msg)), code_(code) {}
  Error(Errc code, std::string msg, SourceSpan span)
      : std::runtime_error(std::move(msg)), code_(code), span_(span), has_span_(true) {}

  Errc code() const noexcept { return code_; }
  bool has_span() const noexcept { return has_span_; }
  SourceSpan span() const noexcept { return span_; }

private:
  Errc code_;
  SourceSpan span_{};
  bool has_span_ = false;
};

}  // namespace fman
