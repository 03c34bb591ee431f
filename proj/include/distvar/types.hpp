#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace distvar {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class ErrorCode {
  ZeroPolynomial,
  SingularInterpolation,
  PoleHit,
  NotUnitaryColligation,
  NotPureRealization,
  ResolventSingular,
  SpuriousFactorInDisc,
  NonCommuting,
  NotContractive,
  NotPure,
  TruncationNotConverged,
  TriangularizationFailed,
  NoInnerSolution,
  AnnTrivial,
  DegenerateCluster,
  DenominatorVanishes,
  ConstantSymbol,
  InvalidInput,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Every numerical threshold used by the library. Defaults are the values the
// certificates are calibrated against; reports record the full table.
struct Tolerances {
  double root = 1e-8;           // |p(r)| <= root * ||p|| for computed roots
  double fit = 1e-10;           // relative residual of tensor-grid interpolation
  double unitary = 1e-8;        // unitarity defects of colligations / boundary values
  double commute = 1e-9;        // ||T1 T2 - T2 T1||
  double norm = 1e-9;           // ||T|| <= 1 + norm
  double rank = 1e-7;           // numerical rank threshold (relative to ||T||)
  double eig = 1e-8;            // eigen-equation residuals of witnesses
  double calc = 1e-12;          // tail bound of analytic functional calculus
  double ann = 1e-8;            // ||g(T1,T2)|| for annihilator members (relative)
  double trunc = 1e-10;         // ||J*J - I|| for the truncated co-extension
  double intertwine = 1e-7;     // intertwining residuals
  double kernel = 1e-8;         // relative singular-value threshold for kernels
  double zset = 1e-8;           // vanishing threshold of generators on points
  double match = 1e-6;          // set/multiset matching distance
  double cluster_merge = 1e-5;  // eigenvalues closer than this are one cluster
  double cluster_sep = 1e-4;    // distinct clusters closer than this are degenerate
  double attain = 1e-6;         // attainment tolerance of the "= 1" conditions
  double margin_spec = 1e-6;    // required gap between spectra and the circle
  double simple_sep = 1e-4;     // root separation for "simple roots"

  std::map<std::string, double> table() const;
  // Throws Error(InvalidInput) for an unknown name.
  void set(const std::string& name, double value);
};

}  // namespace distvar
