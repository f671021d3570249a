#pragma once

#include <stdexcept>
#include <string>

namespace rua {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// image_core
struct BadMagic : Error {
  using Error::Error;
};
struct BadHeader : Error {
  using Error::Error;
};
struct Truncated : Error {
  using Error::Error;
};
struct DimensionMismatch : Error {
  using Error::Error;
};

// shared
struct DomainError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

// gss
struct EmptyInterval : Error {
  using Error::Error;
};
struct MissingScore : Error {
  using Error::Error;
};

// search
struct CommandFailed : Error {
  CommandFailed(const std::string& what, int exit_code, std::string output)
      : Error(what), exit_code(exit_code), output(std::move(output)) {}
  int exit_code;
  std::string output;
};
struct ParseError : Error {
  using Error::Error;
};
struct Timeout : Error {
  using Error::Error;
};
struct LedgerCorrupt : Error {
  using Error::Error;
};

}  // namespace rua
