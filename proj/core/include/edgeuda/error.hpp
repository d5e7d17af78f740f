#pragma once

#include <stdexcept>
#include <string>

namespace edgeuda {

// Root of every error raised by the library. The CLI maps any Error to exit
// code 1; usage problems are reported separately as exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  DatasetError(const std::string& what, std::string path)
      : Error(what + ": " + path), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// A value lies outside the mathematical domain of an operation, e.g. an
// edge probability of exactly 0 or 1 handed to the BCE loss.
class DomainError : public Error {
 public:
  using Error::Error;
};

class EmptyTargetError : public Error {
 public:
  using Error::Error;
};

// Raised when a training routine is asked to do something the unsupervised
// adaptation protocol forbids (e.g. read labels of a target training sample).
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class DegeneratePseudoLabelError : public Error {
 public:
  using Error::Error;
};

class InputSizeError : public Error {
 public:
  using Error::Error;
};

}  // namespace edgeuda
