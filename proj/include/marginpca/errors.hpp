#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace marginpca {

/// Failure class, used by the CLI to pick an exit code.
enum class ErrorKind {
  config,   // bad flags, bad config file, bad arguments    -> exit 2
  data,     // unreadable or malformed input data           -> exit 3
  numeric,  // rank/convergence/dimension failures          -> exit 4
};

/// Exception carrying a stable machine-readable code (e.g. "KExceedsRank")
/// plus a human message. what() is "<code>: <message>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string code, const std::string& message)
      : std::runtime_error(code + ": " + message),
        kind_(kind),
        code_(std::move(code)) {}

  ErrorKind kind() const { return kind_; }
  const std::string& code() const { return code_; }

 private:
  ErrorKind kind_;
  std::string code_;
};

[[noreturn]] inline void throw_config(const std::string& code, const std::string& msg) {
  throw Error(ErrorKind::config, code, msg);
}
[[noreturn]] inline void throw_data(const std::string& code, const std::string& msg) {
  throw Error(ErrorKind::data, code, msg);
}
[[noreturn]] inline void throw_numeric(const std::string& code, const std::string& msg) {
  throw Error(ErrorKind::numeric, code, msg);
}

}  // namespace marginpca
