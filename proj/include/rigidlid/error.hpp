#pragma once

#include <stdexcept>
#include <cstdio>
#include <string>

namespace rigidlid {

enum class ErrorCode {
  InvalidArgument = 1,
  ShapeMismatch,
  NonFinite,
  Inadmissible,
  Degenerate,
  DepthFloor,
  Boundary,
  NonConvergence,
  Resolution,
  Config,
  Io,
  UnknownTag,
};

const char* to_string(ErrorCode code);

/// Exception carrying a machine-readable code; the C API maps codes to status values.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

// %.6g formatting for messages
inline std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace rigidlid
