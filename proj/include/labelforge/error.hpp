#pragma once

#include <stdexcept>
#include <string>

namespace labelforge {

/// Process exit codes used by the CLI.
enum class ExitCode : int {
  ok = 0,
  user = 1,
  io = 2,
  provider = 3,
};

/// Base of every error the pipeline throws on purpose. The exit code
/// decides how the CLI reports it.
class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

/// Bad input data, precondition violations and invalid configuration.
class UserError : public Error {
 public:
  explicit UserError(const std::string& what) : Error(ExitCode::user, what) {}
};

/// Unreadable, unwritable or malformed files.
class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ExitCode::io, what) {}
};

/// Failures talking to an LLM endpoint after retries were exhausted.
class ProviderError : public Error {
 public:
  ProviderError(const std::string& what, std::string provider, int attempts, int last_status)
      : Error(ExitCode::provider, what),
        provider_(std::move(provider)),
        attempts_(attempts),
        last_status_(last_status) {}

  const std::string& provider() const noexcept { return provider_; }
  int attempts() const noexcept { return attempts_; }
  /// HTTP status of the last attempt, 0 when no response arrived.
  int last_status() const noexcept { return last_status_; }

 private:
  std::string provider_;
  int attempts_;
  int last_status_;
};

/// Credentials missing or rejected. Never retried.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ExitCode::user, what) {}
};

}  // namespace labelforge
