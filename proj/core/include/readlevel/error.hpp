#pragma once

#include <stdexcept>
#include <string>

namespace readlevel {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad or inconsistent input data: unreadable files, malformed annotation,
/// precondition violations on data passed to an algorithm.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration or command-line usage.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A fitting step saw a document that belongs to the validation fold.
class LeakageError : public Error {
 public:
  using Error::Error;
};

}  // namespace readlevel
