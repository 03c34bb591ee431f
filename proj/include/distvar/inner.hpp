#pragma once

#include <variant>
#include <vector>

#include "distvar/poly.hpp"
#include "distvar/report.hpp"
#include "distvar/types.hpp"

namespace distvar {

// Psi(z) = D + z C (I - zA)^{-1} B with [[A, B], [C, D]] unitary.
struct Colligation {
  Matrix a, b, c, d;
};

// Elementary factor U ((I - P) + b_a(z) P), b_a(z) = (a - z) / (1 - conj(a) z).
struct BPFactor {
  Complex zero;
  Matrix projection;
  Matrix unitary;
};

// Psi(z) = leading * factor_1(z) * factor_2(z) * ...
struct BPProduct {
  Matrix leading;
  std::vector<BPFactor> factors;
};

struct PolynomialMatrix {
  std::vector<std::vector<Poly1>> entries;  // row-major d x d
};

// Rational d x d inner function on the disc. Instances are only produced by
// the validating factories below.
class MatrixInnerFunction {
 public:
  using Representation = std::variant<Colligation, BPProduct, PolynomialMatrix>;

  MatrixInnerFunction() = default;

  int dimension() const { return dimension_; }
  const Representation& representation() const { return rep_; }
  const char* kind() const;

  Matrix eval(Complex lambda) const;
  // Taylor coefficients Psi^{(k)}(lambda) / k! for k = 0..order.
  std::vector<Matrix> taylor(Complex lambda, int order) const;
  // Poles lie in |z| >= 1 / pole_radius(); 0 for polynomial representations.
  double pole_radius() const;
  // Realization diagnostics recorded at construction.
  double realization_defect() const { return realization_defect_; }

  friend MatrixInnerFunction from_colligation(const Matrix&, const Matrix&, const Matrix&, const Matrix&,
                                              const Tolerances&);
  friend MatrixInnerFunction from_bp_product(BPProduct, const Tolerances&);
  friend MatrixInnerFunction from_polynomial_matrix(PolynomialMatrix, const Tolerances&);

 private:
  int dimension_ = 0;
  Representation rep_;
  double realization_defect_ = 0.0;
};

// Throws NotUnitaryColligation or NotPureRealization.
MatrixInnerFunction from_colligation(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d,
                                     const Tolerances& tol = {});
// Throws NotUnitaryColligation for non-unitary U or non-projection P.
MatrixInnerFunction from_bp_product(BPProduct product, const Tolerances& tol = {});
// Throws NotUnitaryColligation when boundary values are not unitary.
MatrixInnerFunction from_polynomial_matrix(PolynomialMatrix entries, const Tolerances& tol = {});
// b(z) I_d as a product of rank-d elementary factors.
MatrixInnerFunction scalar_blaschke_times_identity(const BlaschkeProduct& b, int d);

// Throws ResolventSingular or InvalidInput (|lambda| > 1 + tol).
Matrix eval_psi(const MatrixInnerFunction& psi, Complex lambda);
// Derivatives (Psi(lambda), Psi'(lambda), ..., Psi^{(order)}(lambda)).
std::vector<Matrix> eval_psi_jet(const MatrixInnerFunction& psi, Complex lambda, int order);

// max over n boundary points of ||Psi* Psi - I||.
double boundary_unitarity_defect(const MatrixInnerFunction& psi, int n = 2048);
// max spectral radius of Psi(lambda) over deterministic interior samples of
// radius <= max_radius; the pure condition asks for this to stay below 1.
double interior_spectral_radius(const MatrixInnerFunction& psi, int samples, double max_radius);

// Closed-disc samples: r = sqrt(k / (count - 1)), golden-angle spiral.
std::vector<Complex> disc_spiral(int count);

struct VarietyDescription {
  MatrixInnerFunction psi;
  Poly2 p;  // det(Psi(z) - wI) times a factor without zeros in the closed disc
  int degz = 0;
  int degw = 0;
  double fit_residual = 0.0;
  double cleared_root_modulus = 0.0;   // smallest root modulus of the cleared factor
  double vanishing_residual = 0.0;     // max |p(z,w)| / ||p||_1 over sampled fibers
  double fiber_match_distance = 0.0;   // roots of p(z, .) vs fiber(z)
};

// Throws SpuriousFactorInDisc.
VarietyDescription variety_polynomial(const MatrixInnerFunction& psi, const Tolerances& tol = {},
                                      int consistency_samples = 1000);

// Eigenvalues of Psi(z) with multiplicity.
std::vector<Complex> fiber(const MatrixInnerFunction& psi, Complex z);

struct SampleGrid {
  int boundary = 2048;
  int radii = 64;
  int angles = 256;
};

// z samples strictly inside the disc: radii i / radii, i = 0..radii-1.
std::vector<Complex> interior_grid(const SampleGrid& grid);
std::vector<Complex> boundary_grid(int n);

CertificateEntry distinguished_certificate(const MatrixInnerFunction& psi, const SampleGrid& grid,
                                           const Tolerances& tol = {});

}  // namespace distvar
