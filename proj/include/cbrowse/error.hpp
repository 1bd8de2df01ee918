#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace cbrowse {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class NotFound : public Error {
 public:
  using Error::Error;
};

// A derived value contradicts its inputs (e.g. a concept keyword missing from the index).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class StorageError : public Error {
 public:
  using Error::Error;
};

// The service could not start (e.g. the port is taken).
class StartupError : public Error {
 public:
  using Error::Error;
};

class CapacityError : public Error {
 public:
  CapacityError(std::size_t limit, const std::string& what)
      : Error(what + " (limit " + std::to_string(limit) + ")"), limit_(limit) {}
  std::size_t limit() const noexcept { return limit_; }

 private:
  std::size_t limit_;
};

// `offset` is the 0-based position of the offending byte.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, const std::string& what)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

  // nlohmann::json reports a 1-based position.
  static std::size_t from_json_byte(std::size_t byte) noexcept { return byte > 0 ? byte - 1 : 0; }

 private:
  std::size_t offset_;
};

// Failure talking to a news source. `source()` names the configured source.
class FetchError : public Error {
 public:
  FetchError(std::string source, const std::string& what)
      : Error(source + ": " + what), source_(std::move(source)) {}
  const std::string& source() const noexcept { return source_; }

 private:
  std::string source_;
};

// Network failure or timeout, raised after retries are exhausted.
class TransientFetchError : public FetchError {
 public:
  using FetchError::FetchError;
};

// The source answered with a non-2xx status.
class SourceError : public FetchError {
 public:
  SourceError(std::string source, int status)
      : FetchError(std::move(source), "HTTP status " + std::to_string(status)), status_(status) {}
  int status() const noexcept { return status_; }

 private:
  int status_;
};

}  // namespace cbrowse
