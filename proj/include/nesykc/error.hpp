#pragma once

#include <stdexcept>
#include <string>

namespace nesykc {

// Failure categories. The numeric values are the CLI exit codes.
enum class ErrorKind : int {
  InvalidInput = 2,
  Intractable = 3,
  Unsatisfiable = 4,
  CapExceeded = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace nesykc
