#pragma once

#include <stdexcept>
#include <string>

namespace colmatch {

// Every failure raised by the library derives from Error. The kind maps
// one-to-one onto the CLI exit codes.
enum class ErrorKind {
  kInput,      // bad files, malformed config, unknown names
  kProvider,   // embedding backend unreachable or violating its contract
  kMissing,    // an embedding that should be in the store is not
  kCorrupted,  // store record failed magic/version/checksum validation
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::kInput, what) {}
};

class ProviderError : public Error {
 public:
  explicit ProviderError(const std::string& what)
      : Error(ErrorKind::kProvider, what) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& what)
      : Error(ErrorKind::kMissing, what) {}
};

class CorruptedError : public Error {
 public:
  explicit CorruptedError(const std::string& what)
      : Error(ErrorKind::kCorrupted, what) {}
};

}  // namespace colmatch
