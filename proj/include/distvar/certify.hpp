#pragma once

#include <variant>
#include <vector>

#include "distvar/inner.hpp"
#include "distvar/linalg.hpp"
#include "distvar/opcore.hpp"
#include "distvar/report.hpp"

namespace distvar {

// Fiber samples of V_Psi over a boundary circle and an interior polar grid.
struct VarietySamples {
  std::vector<BiPoint> boundary;  // grouped by z, psi.dimension() points each
  std::vector<BiPoint> interior;
  int fiber_size = 0;
};

VarietySamples sample_variety(const MatrixInnerFunction& psi, const SampleGrid& grid);

struct SupEstimate {
  double sup = 0.0;
  BiPoint argmax{};
  double spacing = 0.0;    // max distance between matched consecutive boundary fibers
  double lipschitz = 0.0;  // sampled max of |q_z| + |q_w|
  double slack = 0.0;      // lipschitz * spacing plus a round-off term in ||q||_1
  SampleGrid grid;
};

// Refining by doubling boundary, radii and angles gives nested grids, so the
// estimate is nondecreasing under such refinement.
SupEstimate sup_on_variety(const VarietyDescription& variety, const Poly2& q, const SampleGrid& grid);
SupEstimate sup_on_variety(const VarietySamples& samples, const Poly2& q, const SampleGrid& grid);
// sup of |q| over an n x n grid of the torus (the Shilov boundary of the bidisc).
double sup_on_torus(const Poly2& q, int n);
double lipschitz_estimate(const Poly2& q, int n = 64);

struct RationalSymbol2 {
  Poly2 num;
  Poly2 den;
};

// Entry per polynomial plus one for the defining polynomial.
std::vector<CertificateEntry> vn_report(const CommutingPair& pair, const VarietyDescription& variety,
                                        const std::vector<Poly2>& polys, const SampleGrid& grid,
                                        const Tolerances& tol = {});
// Throws DenominatorVanishes.
CertificateEntry vn_rational_entry(const CommutingPair& pair, const VarietySamples& samples,
                                   const RationalSymbol2& r, const SampleGrid& grid, const Tolerances& tol = {},
                                   const std::string& name = "rational_spectral_set");

struct Rational1 {
  Poly1 num;
  Poly1 den;
};

using ScalarSymbol = std::variant<Poly1, BlaschkeProduct, Rational1>;

Complex symbol_eval(const ScalarSymbol& phi, Complex z);
Matrix symbol_apply(const ScalarSymbol& phi, const Matrix& t);
bool symbol_is_constant(const ScalarSymbol& phi);
// max |phi| over n boundary points.
double symbol_sup(const ScalarSymbol& phi, int n);

// Throws ConstantSymbol.
std::vector<CertificateEntry> min_conditions(const CommutingPair& pair, const VarietyDescription& variety,
                                             const ScalarSymbol& phi1, const ScalarSymbol& phi2,
                                             const SampleGrid& grid, const Tolerances& tol = {});

CertificateEntry isometry_variant(const CommutingPair& pair, const Tolerances& tol = {});

CertificateEntry williams_check(const Matrix& t, const ScalarSymbol& phi, int boundary_n = 2048,
                                const Tolerances& tol = {});

}  // namespace distvar
