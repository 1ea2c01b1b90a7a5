#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace glmdisc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An empty or unparsable cell in an input table.
class MissingValue : public Error {
 public:
  MissingValue(std::size_t row, const std::string& column)
      : Error("missing or unparsable value at row " + std::to_string(row) +
              ", column '" + column + "'"),
        row_(row) {}
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class SchemaMismatch : public Error {
 public:
  using Error::Error;
};

/// A categorical label (or code) that the quantizer has never seen.
class UnknownLevel : public Error {
 public:
  explicit UnknownLevel(const std::string& what, std::size_t row = npos)
      : Error(what), row_(row) {}
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t row() const noexcept { return row_; }

 private:
  std::size_t row_;
};

class DegenerateSplit : public Error {
 public:
  using Error::Error;
};

/// The target has a single class where both are required.
class SingleClass : public Error {
 public:
  SingleClass() : Error("target contains a single class") {}
  using Error::Error;
};

class NonFinite : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

}  // namespace glmdisc
