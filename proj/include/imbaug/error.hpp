#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace imbaug {

enum class ErrorKind {
  shape,
  input,
  state,
  config,
  schema,
  data,
  mapping,
  policy,
  diverged,
  yield,
  format,
  label,
  report,
  degenerate,
  neighbor,
  comparison,
  pipeline,
  io,
};

std::string_view to_string(ErrorKind kind);

// Every failure the library reports is an Error carrying a kind, so callers
// (and tests) can branch on the category without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace imbaug
