#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace multivaw {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Cholesky pivot fell below the acceptance threshold, or the input was not
/// symmetric.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& what, std::ptrdiff_t pivot_index = -1)
      : Error(what), pivot_index_(pivot_index) {}
  std::ptrdiff_t pivot_index() const noexcept { return pivot_index_; }

 private:
  std::ptrdiff_t pivot_index_;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, int iterations)
      : Error(what), iterations_(iterations) {}
  int iterations() const noexcept { return iterations_; }

 private:
  int iterations_;
};

class RankDeficient : public Error {
 public:
  using Error::Error;
};

/// Regularization sequence is not nondecreasing in the Loewner order.
class ScheduleViolation : public Error {
 public:
  using Error::Error;
};

/// The features -> prediction -> response alternation was broken.
class ProtocolViolation : public Error {
 public:
  using Error::Error;
};

class HierarchyError : public Error {
 public:
  using Error::Error;
};

class CyclicHierarchy : public HierarchyError {
 public:
  using HierarchyError::HierarchyError;
};

class DuplicateNode : public HierarchyError {
 public:
  using HierarchyError::HierarchyError;
};

/// Problems with input data files. The CLI maps these to exit code 2.
class DataError : public Error {
 public:
  using Error::Error;
};

class MissingColumn : public DataError {
 public:
  using DataError::DataError;
};

class NonNumericCell : public DataError {
 public:
  NonNumericCell(const std::string& what, std::size_t row, std::size_t column)
      : DataError(what), row_(row), column_(column) {}
  std::size_t row() const noexcept { return row_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::size_t column_;
};

class EmptyFile : public DataError {
 public:
  using DataError::DataError;
};

class InvalidPeriod : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration. The CLI maps these to exit code 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace multivaw
