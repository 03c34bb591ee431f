#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "distvar/poly.hpp"
#include "distvar/types.hpp"

namespace distvar {

struct PairFlags {
  bool strict = true;         // throw on violated invariants
  bool require_pure = false;  // additionally demand rho(T_i) < 1
};

struct CommutingPair {
  Matrix t1, t2;
  double commutator_norm = 0.0;
  std::array<double, 2> norms{};
  std::array<double, 2> purity_margins{};  // 1 - rho(T_i)
  std::array<int, 2> defect_ranks{};       // rank of I - T_i T_i*
  bool pure = false;

  int size() const { return static_cast<int>(t1.rows()); }
};

// Throws InvalidInput, NonCommuting, NotContractive, NotPure (strict mode).
CommutingPair validate_pair(const Matrix& t1, const Matrix& t2, PairFlags flags = {}, const Tolerances& tol = {});

struct Defect {
  Matrix root;   // (I - T T*)^{1/2}
  int rank = 0;  // eigenvalues of I - T T* above tol.rank
  Matrix basis;  // orthonormal basis of the range
};

// Throws NotContractive.
Defect defect(const Matrix& t, const Tolerances& tol = {});

Matrix poly_apply(const Poly2& p, const Matrix& t1, const Matrix& t2);
Matrix poly_apply(const Poly2& p, const CommutingPair& pair);

// f(z, w) = sum coeff(i, j) z^i w^j with |coeff(i, j)| <= bound.
struct AnalyticFunction {
  std::function<Complex(int, int)> coeff;
  double bound = 1.0;
};

struct AnalyticValue {
  Matrix value;
  int terms = 0;             // box size: indices i, j < terms
  double tail_bound = 0.0;   // bound on the truncation error in operator norm
};

// Throws NotPure, TruncationNotConverged.
AnalyticValue analytic_apply(const AnalyticFunction& f, const CommutingPair& pair, const Tolerances& tol = {});

struct JointPoint {
  Complex lambda;
  Complex mu;
  int multiplicity = 1;
  Matrix witnesses;  // orthonormal common eigenvectors (point spectrum only)
  double residual = 0.0;
};

enum class SpectrumKind { taylor, point };

struct JointSpectrum {
  SpectrumKind kind = SpectrumKind::taylor;
  std::vector<JointPoint> points;
  std::uint64_t seed = 0;
  int attempts = 0;
  bool deflation_fallback = false;
  double triangular_residual = 0.0;
  double cross_check = 0.0;  // matching distance against fresh combinations
  bool degenerate = false;   // two clusters closer than tol.cluster_sep
  double min_separation = 0.0;

  // Points repeated by multiplicity.
  std::vector<std::pair<Complex, Complex>> multiset() const;
};

// Simultaneous Schur triangularization. Throws TriangularizationFailed.
JointSpectrum joint_spectrum_taylor(const CommutingPair& pair, std::uint64_t seed = 0, const Tolerances& tol = {});
JointSpectrum joint_point_spectrum(const Matrix& t1, const Matrix& t2, const Tolerances& tol = {});
JointSpectrum joint_point_spectrum(const CommutingPair& pair, const Tolerances& tol = {});

struct MinimalBlaschke {
  BlaschkeProduct product;
  bool conclusive = true;  // no rank decision within 10x of the threshold
  bool degenerate = false;
};

// Zeros are the eigenvalues of t with the size of their largest Jordan block.
// Throws NotPure.
MinimalBlaschke minimal_blaschke(const Matrix& t, const Tolerances& tol = {});

}  // namespace distvar
