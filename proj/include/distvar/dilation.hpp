#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "distvar/inner.hpp"
#include "distvar/opcore.hpp"
#include "distvar/report.hpp"

namespace distvar {

// Minimal isometric co-extension of T1 into H^2 (x) C^d, truncated after
// n_trunc + 1 Taylor coefficients.
struct Embedding {
  Matrix j;            // (n_trunc + 1) d x n, row block m = dhat T1*^m
  int n_trunc = 0;
  Matrix dhat;         // d x n, defect operator in defect-range coordinates
  double isometry_defect = 0.0;  // ||J*J - I|| = ||T1^{n_trunc+1}||^2

  int d() const { return static_cast<int>(dhat.rows()); }
};

// Throws NotPure, TruncationNotConverged.
Embedding embed_J(const CommutingPair& pair, double tol_trunc);

// Row blocks dhat T1*^m for m < rows.
Matrix coefficient_rows(const Matrix& dhat, const Matrix& t1, int rows);
// Number of row blocks after which ||T1^m|| < 1e-15.
int extended_rows(const Matrix& t1, int at_least);

struct PsiConstruction {
  MatrixInnerFunction psi;
  double coefficient_residual = 0.0;  // || sum T1^k D^* Psi_k - T2 D^* ||
  double intertwining_residual = 0.0; // || J T2* - M_Psi* J || on the truncation
  double shift_residual = 0.0;        // || J T1* - S* J || on the truncation
  int attempts = 0;
};

// Builds a pure inner Psi with J T2* = M_Psi* J. Throws NotPure, NoInnerSolution.
PsiConstruction construct_psi(const CommutingPair& pair, std::uint64_t seed = 0, const Tolerances& tol = {});

// || J T2* - M_Psi* J || over the first n_trunc + 1 row blocks.
double intertwining_residual(const Embedding& e, const CommutingPair& pair, const MatrixInnerFunction& psi);

// Compression of (M_z (x) I, M_Psi) to (H^2 - theta H^2) (x) C^d, in the
// orthonormal Takenaka-Malmquist basis; basis index k * d + i.
CommutingPair compress_pair(const MatrixInnerFunction& psi, const BlaschkeProduct& theta, const Tolerances& tol = {});

// kappa_{lambda, j}(z) = z^j / (1 - conj(lambda) z)^{j+1} (x) e_i, so that
// <f, kappa_{lambda, j}> = f^{(j)}(lambda) / j!.
struct JetKernelBasis {
  struct Element {
    int point = 0;
    int order = 0;
    int component = 0;
  };
  std::vector<BlaschkeZero> points;
  int d = 0;
  std::vector<Element> elements;
  Matrix gram;

  int dimension() const { return static_cast<int>(elements.size()); }
};

JetKernelBasis jet_kernel_basis(const BlaschkeProduct& m1, int d);

// Matrix of M_F* on the jet kernel coordinates, given the Taylor coefficients
// of F at every point (taylor[p][k] for k below the point's multiplicity).
Matrix adjoint_action(const JetKernelBasis& basis, const std::vector<std::vector<Matrix>>& taylor);

// Taylor coefficients of f(z, Psi(z)) at lambda.
std::vector<Matrix> compose_taylor(const Poly2& f, const MatrixInnerFunction& psi, Complex lambda, int order);

struct CoextensionBundle {
  CommutingPair pair;
  Embedding embedding;
  MatrixInnerFunction psi;
  BlaschkeProduct m1;
  JetKernelBasis jets;
  Matrix kpsi_basis;  // Gram-orthonormal coordinate columns spanning K_Psi
  Matrix s1, s2;
  bool conclusive = true;
  std::map<std::string, double> residuals;

  int kpsi_dimension() const { return static_cast<int>(kpsi_basis.cols()); }
};

// Throws AnnTrivial, DegenerateCluster.
CoextensionBundle constrained_coextension(const CommutingPair& pair, const MatrixInnerFunction& psi,
                                          const std::vector<Poly2>& ann_gens, const Tolerances& tol = {});

std::vector<CertificateEntry> verify_coextension(const CoextensionBundle& bundle, const Tolerances& tol = {});

// p(T1, T2) computed as (J* p(M_z (x) I, M_Psi)* J)*.
Matrix coextension_calculus(const Poly2& p, const CommutingPair& pair, const MatrixInnerFunction& psi,
                            const Tolerances& tol = {});

}  // namespace distvar
