#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mixext {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Utility tensors disagree with the declared strategy counts.
struct ShapeError : Error {
  using Error::Error;
};

/// A utility entry is NaN or infinite.
struct NonFiniteError : Error {
  using Error::Error;
};

/// Malformed game text; `line` is 1-based.
struct ParseError : Error {
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

struct DimensionError : Error {
  using Error::Error;
};

/// Chart change onto a chart that does not contain the point.
struct DivisionByZero : Error {
  using Error::Error;
};

/// The requested coordinate hyperplane lies entirely outside the chart.
struct ChartExcludesHypersurface : Error {
  using Error::Error;
};

}  // namespace mixext
