#pragma once

#include <stdexcept>
#include <string>

namespace gdag {

// Error categories map to CLI exit codes: usage -> 1, validation -> 2,
// numeric -> 3.
enum class ErrorKind { usage = 1, validation = 2, numeric = 3 };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct UsageError : Error {
  explicit UsageError(const std::string& w) : Error(ErrorKind::usage, w) {}
};

struct NotPositiveDefinite : Error {
  explicit NotPositiveDefinite(const std::string& w)
      : Error(ErrorKind::numeric, w) {}
};

struct InvalidDegreesOfFreedom : Error {
  explicit InvalidDegreesOfFreedom(const std::string& w)
      : Error(ErrorKind::validation, w) {}
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& w)
      : Error(ErrorKind::validation, w) {}
};

struct EmptySubset : Error {
  explicit EmptySubset(const std::string& w)
      : Error(ErrorKind::validation, w) {}
};

struct CycleDetected : Error {
  explicit CycleDetected(const std::string& w)
      : Error(ErrorKind::validation, w) {}
};

struct ArcNotCovered : Error {
  explicit ArcNotCovered(const std::string& w)
      : Error(ErrorKind::validation, w) {}
};

struct VariableMismatch : Error {
  explicit VariableMismatch(const std::string& w)
      : Error(ErrorKind::validation, w) {}
};

struct TooLarge : Error {
  explicit TooLarge(const std::string& w) : Error(ErrorKind::validation, w) {}
};

struct SampleTooSmall : Error {
  explicit SampleTooSmall(const std::string& w)
      : Error(ErrorKind::validation, w) {}
};

// File ingestion errors carry a 1-based line and column where applicable.
struct ParseError : Error {
  ParseError(const std::string& w, int line = 0, int column = 0)
      : Error(ErrorKind::validation, w), line(line), column(column) {}
  int line;
  int column;
};

struct MissingValue : ParseError {
  MissingValue(const std::string& w, int line, int column)
      : ParseError(w, line, column) {}
};

struct NonFinite : ParseError {
  NonFinite(const std::string& w, int line, int column)
      : ParseError(w, line, column) {}
};

}  // namespace gdag
