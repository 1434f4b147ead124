// Copyright 2026 the intermdm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace intermdm {

// Error categories, aligned with the CLI / C API status codes.
enum class ErrorCode { usage = 1, config = 2, runtime = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void throw_usage(const std::string& msg) {
  throw Error(ErrorCode::usage, msg);
}
[[noreturn]] inline void throw_config(const std::string& msg) {
  throw Error(ErrorCode::config, msg);
}
[[noreturn]] inline void throw_runtime(const std::string& msg) {
  throw Error(ErrorCode::runtime, msg);
}

}  // namespace intermdm
