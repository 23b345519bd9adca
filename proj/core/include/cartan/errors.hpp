#pragma once

#include <stdexcept>
#include <string>

namespace cartan {

enum class ErrorKind {
  invalid_argument,
  unsupported,
  range,
  domain,
  numeric,
  degenerate_separator,
  mismatch,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace cartan
