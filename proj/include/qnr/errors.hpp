#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qnr {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DanglingArrow : Error {
  explicit DanglingArrow(const std::string& arrow, const std::string& endpoint)
      : Error("arrow '" + arrow + "' references undeclared vertex '" + endpoint + "'") {}
};

struct OrientedCycle : Error {
  std::vector<std::string> cycle;  // vertex ids along the cycle
  explicit OrientedCycle(std::vector<std::string> cyc)
      : Error(make_message(cyc)), cycle(std::move(cyc)) {}
  static std::string make_message(const std::vector<std::string>& cyc) {
    std::string m = "quiver has an oriented cycle:";
    for (const auto& v : cyc) m += " " + v;
    return m;
  }
};

struct ShapeMismatch : Error {
  using Error::Error;
};

struct SingularGauge : Error {
  using Error::Error;
};

struct SingularMatrix : Error {
  using Error::Error;
};

struct FieldMismatch : Error {
  using Error::Error;
};

struct NotSpaceLike : Error {
  std::string vertex;
  double min_eigenvalue;
  NotSpaceLike(std::string v, double eig)
      : Error("gram matrix at vertex '" + v + "' is not positive definite (min eigenvalue " +
              std::to_string(eig) + ")"),
        vertex(std::move(v)),
        min_eigenvalue(eig) {}
};

struct MetricUnavailable : Error {
  using Error::Error;
};

struct RankDeficientFraming : Error {
  using Error::Error;
};

struct TypeCheckFailure : Error {
  using Error::Error;
};

struct MeasurementInDeterministicContext : Error {
  using Error::Error;
};

struct NonMeasurementActivation : Error {
  using Error::Error;
};

struct MeasurementBudgetExceeded : Error {
  using Error::Error;
};

struct UnknownSymbol : Error {
  explicit UnknownSymbol(const std::string& sym) : Error("unknown symbol '" + sym + "'") {}
};

struct ZeroVector : Error {
  using Error::Error;
};

struct StepRejected : Error {
  using Error::Error;
};

struct BadHeader : Error {
  using Error::Error;
};

struct NonNumericCell : Error {
  std::size_t row, col;
  NonNumericCell(std::size_t r, std::size_t c, const std::string& text)
      : Error("non-numeric cell at row " + std::to_string(r) + ", column " + std::to_string(c) +
              ": '" + text + "'"),
        row(r),
        col(c) {}
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace qnr
