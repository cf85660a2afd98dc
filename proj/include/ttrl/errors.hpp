#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ttrl {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised while reading or validating a corpus file. `line` is 1-based, 0 when
/// the error is not tied to a single line.
class CorpusError : public Error {
 public:
  CorpusError(const std::string& what, std::size_t line = 0)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class PolicyError : public Error {
 public:
  using Error::Error;
};

class VoteError : public Error {
 public:
  using Error::Error;
};

/// Transport, status or decode failure talking to a remote endpoint.
class RemoteError : public Error {
 public:
  using Error::Error;
};

/// Configuration problem; `key` is the dotted path of the offending entry.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& what)
      : Error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace ttrl
