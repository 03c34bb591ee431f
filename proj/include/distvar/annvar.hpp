#pragma once

#include <cstdint>
#include <vector>

#include "distvar/dilation.hpp"
#include "distvar/inner.hpp"
#include "distvar/linalg.hpp"
#include "distvar/opcore.hpp"
#include "distvar/report.hpp"

namespace distvar {

// Polynomials on the box {z^i w^j : i < nodes_z.size(), j < nodes_w.size()},
// in the Newton basis prod_{k<i}(z - nodes_z[k]) prod_{l<j}(w - nodes_w[l]).
// Coordinates are indexed i * box_w + j.
struct NewtonBox {
  std::vector<Complex> nodes_z;
  std::vector<Complex> nodes_w;

  int box_z() const { return static_cast<int>(nodes_z.size()); }
  int box_w() const { return static_cast<int>(nodes_w.size()); }
  int size() const { return box_z() * box_w(); }
  Poly2 to_poly(const Vector& coords) const;
  // Rows: evaluation functionals at the points.
  Matrix evaluation(const std::vector<BiPoint>& points) const;
  // Columns: vec of each basis element applied to the pair.
  Matrix operator_images(const Matrix& t1, const Matrix& t2) const;
};

// Box built from the zeros of m1 and m2, Leja ordered.
NewtonBox newton_box(const BlaschkeProduct& m1, const BlaschkeProduct& m2);

struct BoxKernel {
  Matrix basis;  // orthonormal Newton coordinates
  bool conclusive = true;
  int dimension() const { return static_cast<int>(basis.cols()); }
};

// Kernel of p -> p(T1, T2) restricted to the box.
BoxKernel box_annihilator(const NewtonBox& box, const Matrix& t1, const Matrix& t2, const Tolerances& tol = {});
// Box polynomials vanishing at every point.
BoxKernel box_vanishing(const NewtonBox& box, const std::vector<BiPoint>& points, const Tolerances& tol = {});
// max(||(I - P_b) a||, ||(I - P_a) b||) for orthonormal bases; +inf on a dimension mismatch.
double subspace_distance(const Matrix& a, const Matrix& b);

struct AnnihilatorBasis {
  NewtonBox box;
  BoxKernel kernel;
  std::vector<Poly2> generators;  // box kernel, then m1(z), then m2(w); each unit-normalized
  BlaschkeProduct m1, m2;
  bool conclusive = true;
  bool degenerate = false;
  double max_residual = 0.0;      // max ||g(T1, T2)|| over generators
};

// Throws NotPure.
AnnihilatorBasis ann_generators(const CommutingPair& pair, const Tolerances& tol = {});

struct PointSet {
  std::vector<BiPoint> points;
  std::vector<Matrix> witnesses;  // filled for Omega_Psi
  bool degenerate = false;
};

// Taylor-spectrum points on which every generator vanishes.
PointSet z_ann(const AnnihilatorBasis& basis, const CommutingPair& pair, std::uint64_t seed = 0,
               const Tolerances& tol = {});
// Conjugated joint eigenvalues of (S1*, S2*).
PointSet omega_psi(const CoextensionBundle& bundle, const Tolerances& tol = {});

CertificateEntry check_zann_equals_omega(const CommutingPair& pair, const CoextensionBundle& bundle,
                                         const AnnihilatorBasis& basis, std::uint64_t seed = 0,
                                         const Tolerances& tol = {});
// Throws AnnTrivial.
CertificateEntry check_projection(const CommutingPair& pair, const CoextensionBundle& bundle,
                                  const Tolerances& tol = {});

struct SupportBounds {
  std::vector<BiPoint> inner_set;       // Z(Ann)
  std::vector<BiPoint> lower_boundary;  // sigma(S1, S2)
  double variety_residual = 0.0;        // max |p| over lower_boundary, p unit-normalized
  double set_distance = 0.0;            // Hausdorff distance inner vs lower
  bool degenerate = false;
};

SupportBounds support_bounds(const CommutingPair& pair, const CoextensionBundle& bundle,
                             const VarietyDescription& variety, const AnnihilatorBasis& basis,
                             std::uint64_t seed = 0, const Tolerances& tol = {});
CertificateEntry support_entry(const SupportBounds& bounds, const Tolerances& tol = {});

struct SynthesisConditions {
  bool eigenvectors_span = false;   // (i)
  bool vanishing_ideal = false;     // (ii), box level
  bool radical = false;             // (iii)
  bool simple_roots = false;        // (iv)
  int witness_rank = 0;
  int kpsi_dimension = 0;
  int ann_box_dimension = 0;
  int vanishing_box_dimension = 0;
  double containment = 0.0;
  bool conclusive = true;

  bool unanimous() const {
    return eigenvectors_span == vanishing_ideal && vanishing_ideal == radical && radical == simple_roots;
  }
};

// Throws AnnTrivial.
SynthesisConditions synthesis_conditions(const CommutingPair& pair, const CoextensionBundle& bundle,
                                         const AnnihilatorBasis& basis, const Tolerances& tol = {});
std::vector<CertificateEntry> synthesis_report(const CommutingPair& pair, const CoextensionBundle& bundle,
                                               const AnnihilatorBasis& basis, const Tolerances& tol = {});

// Box annihilators of (T1, T2) and (S1, S2) in the pair's box.
CertificateEntry check_annihilator_invariance(const CoextensionBundle& bundle, const AnnihilatorBasis& basis,
                                              const Tolerances& tol = {});

}  // namespace distvar
