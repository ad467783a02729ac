#pragma once

#include <complex>
#include <cstddef>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace ncvar {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using SparseOp = Eigen::SparseMatrix<Complex>;

inline constexpr const char* kVersion = "0.1.0";
inline constexpr double kPi = 3.14159265358979323846;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class CutoffTooSmall : public Error {
 public:
  CutoffTooSmall(const std::string& what, double leakage)
      : Error(what + " (leakage " + std::to_string(leakage) + ")"), leakage_(leakage) {}
  double leakage() const { return leakage_; }

 private:
  double leakage_;
};

class DimensionCapExceeded : public Error {
 public:
  using Error::Error;
};

class NotHermitian : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class NotUnitary : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class NotSymplectic : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class UnphysicalState : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class MixedStateInput : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

class NonClassicalAncilla : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Raised when a bound needs M > 0 and the state has none.
class NoGuarantee : public Error {
 public:
  using Error::Error;
};

// Maximum number of complex entries in any dense object (state vector or
// operator). NCVAR_DIM_CAP overrides the default of 2^22.
inline std::size_t dimension_cap() {
  if (const char* env = std::getenv("NCVAR_DIM_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return std::size_t{1} << 22;
}

inline void check_entries(std::size_t entries, const char* what) {
  if (entries > dimension_cap()) {
    throw DimensionCapExceeded(std::string(what) + ": " + std::to_string(entries) +
                               " complex entries exceed the cap of " +
                               std::to_string(dimension_cap()));
  }
}

}  // namespace ncvar
