#include <random>

#include <gtest/gtest.h>

#include "distvar/inner.hpp"
#include "distvar/instance.hpp"
#include "distvar/linalg.hpp"
#include "test_util.hpp"

using namespace distvar;
using testutil::mat;

namespace {

MatrixInnerFunction scalar_z() {
  return from_colligation(Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
}

// [[0, z], [1, 0]] as a colligation with a one-dimensional state space.
MatrixInnerFunction sqrt_psi_colligation() {
  const Matrix a = Matrix::Zero(1, 1);
  const Matrix b = mat({{0, 1}});
  const Matrix c = mat({{1}, {0}});
  const Matrix d = mat({{0, 0}, {1, 0}});
  return from_colligation(a, b, c, d);
}

MatrixInnerFunction sqrt_psi_polynomial() {
  PolynomialMatrix pm{{{Poly1(), Poly1::monomial(1)}, {Poly1::constant(1.0), Poly1()}}};
  return from_polynomial_matrix(pm);
}

// Direct formula D + z C (I - zA)^{-1} B.
Matrix transfer(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d, Complex z) {
  const Matrix res = (Matrix::Identity(a.rows(), a.cols()) - z * a).inverse();
  return d + z * c * res * b;
}

}  // namespace

TEST(FromColligation, ConstantUnitary) {
  std::mt19937_64 rng(1);
  const Matrix u = random_unitary(3, rng);
  const auto psi = from_colligation(Matrix(0, 0), Matrix(0, 3), Matrix(3, 0), u);
  EXPECT_LT((psi.eval(0.4) - u).norm(), 1e-14);
  EXPECT_LT((psi.eval(Complex(0, 1)) - u).norm(), 1e-14);
}

TEST(FromColligation, ScalarIdentityFunction) {
  const auto psi = scalar_z();
  for (Complex z : {Complex(0.3), Complex(-0.2, 0.7), Complex(0, 1)}) EXPECT_LT(std::abs(psi.eval(z)(0, 0) - z), 1e-15);
}

TEST(FromColligation, RandomUnitarySplitIsInnerOnBoundary) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    const Matrix u = random_unitary(4, rng);
    MatrixInnerFunction psi;
    try {
      psi = from_colligation(u.topLeftCorner(2, 2), u.topRightCorner(2, 2), u.bottomLeftCorner(2, 2),
                             u.bottomRightCorner(2, 2));
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NotPureRealization);
      continue;
    }
    EXPECT_LT(boundary_unitarity_defect(psi, 2048), 1e-10);
    const Complex z(0.31, -0.4);
    EXPECT_LT((psi.eval(z) - transfer(u.topLeftCorner(2, 2), u.topRightCorner(2, 2), u.bottomLeftCorner(2, 2),
                                     u.bottomRightCorner(2, 2), z))
                  .norm(),
              1e-12);
  }
}

TEST(FromColligation, RejectsNonUnitaryBlock) {
  try {
    from_colligation(Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotUnitaryColligation);
  }
}

TEST(FromColligation, RejectsUnimodularStateEigenvalue) {
  // A = 1 on a state that is decoupled from the input.
  const Matrix a = mat({{1}});
  try {
    from_colligation(a, Matrix::Zero(1, 1), Matrix::Zero(1, 1), Matrix::Ones(1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotPureRealization);
  }
}

TEST(FromBPProduct, RejectsNonProjection) {
  BPProduct bp{Matrix::Identity(2, 2), {{0.3, mat({{1, 1}, {0, 0}}), Matrix::Identity(2, 2)}}};
  EXPECT_THROW(from_bp_product(bp), Error);
}

TEST(EvalPsi, Examples) {
  const auto z1 = scalar_z();
  EXPECT_LT(std::abs(eval_psi(z1, 0.3)(0, 0) - 0.3), 1e-15);
  for (const auto& psi : {sqrt_psi_colligation(), sqrt_psi_polynomial()}) {
    EXPECT_LT((eval_psi(psi, 0.0) - mat({{0, 0}, {1, 0}})).norm(), 1e-15);
    const Matrix v = eval_psi(psi, Complex(0, 1));
    EXPECT_LT(unitarity_defect(v), 1e-12);
  }
}

TEST(EvalPsi, OutsideClosedDiscThrows) {
  try {
    eval_psi(scalar_z(), 1.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}

TEST(EvalPsiJet, Examples) {
  const auto zi = scalar_blaschke_times_identity(BlaschkeProduct({{0.0, 1}}, -1.0), 2);
  const Complex lam(0.2, 0.1);
  const auto jz = eval_psi_jet(zi, lam, 1);
  EXPECT_LT((jz[0] - lam * Matrix::Identity(2, 2)).norm(), 1e-14);
  EXPECT_LT((jz[1] - Matrix::Identity(2, 2)).norm(), 1e-14);
  for (const auto& psi : {sqrt_psi_colligation(), sqrt_psi_polynomial()}) {
    const auto j = eval_psi_jet(psi, 0.0, 1);
    EXPECT_LT((j[0] - mat({{0, 0}, {1, 0}})).norm(), 1e-15);
    EXPECT_LT((j[1] - mat({{0, 1}, {0, 0}})).norm(), 1e-15);
  }
}

TEST(EvalPsiJet, MatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 5; ++k) {
    const auto psi = random_colligation_psi(2, 2, rng);
    const Complex lam = testutil::random_in_disc(rng, 0.6);
    const auto jet = eval_psi_jet(psi, lam, 2);
    const double h = 1e-4;
    const Matrix fp = psi.eval(lam + h), fm = psi.eval(lam - h), f0 = psi.eval(lam);
    EXPECT_LT((jet[1] - (fp - fm) / (2 * h)).norm(), 1e-7);
    EXPECT_LT((jet[2] - (fp - 2.0 * f0 + fm) / (h * h)).norm(), 1e-4);
    EXPECT_LT((jet[0] - f0).norm(), 1e-15);
  }
}

TEST(Taylor, AgreesAcrossRepresentations) {
  const auto c = sqrt_psi_colligation();
  const auto p = sqrt_psi_polynomial();
  const auto tc = c.taylor(0.3, 4);
  const auto tp = p.taylor(0.3, 4);
  for (int k = 0; k <= 4; ++k) EXPECT_LT((tc[k] - tp[k]).norm(), 1e-13);
}

TEST(VarietyPolynomial, Examples) {
  EXPECT_TRUE(equal_up_to_unit(variety_polynomial(scalar_z()).p, Poly2::w() - Poly2::z()));
  const Poly2 w2z = Poly2::w() * Poly2::w() - Poly2::z();
  EXPECT_LT(unit_distance(variety_polynomial(sqrt_psi_colligation()).p, w2z), 1e-8);
  EXPECT_LT(unit_distance(variety_polynomial(sqrt_psi_polynomial()).p, w2z), 1e-8);
  const auto z2 = scalar_blaschke_times_identity(BlaschkeProduct({{0.0, 2}}), 1);
  EXPECT_TRUE(equal_up_to_unit(variety_polynomial(z2).p, Poly2::w() - Poly2::monomial(2, 0)));
}

TEST(VarietyPolynomial, VanishesOnRandomFibers) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 8; ++k) {
    const auto psi = random_colligation_psi(1 + k % 2, 1 + k % 3, rng);
    const auto v = variety_polynomial(psi);
    const Poly2 pn = v.p.normalized();
    EXPECT_LT(v.vanishing_residual, 1e-8);
    EXPECT_EQ(v.degw, psi.dimension());
    for (int s = 0; s < 1000; ++s) {
      const Complex z = testutil::random_in_disc(rng, 1.0);
      for (const auto& w : fiber(psi, z)) ASSERT_LT(std::abs(testutil::naive_eval2(pn, z, w)), 1e-8 * pn.norm1());
    }
  }
}

TEST(Fiber, Examples) {
  const auto psi = sqrt_psi_polynomial();
  EXPECT_LT(testutil::set_distance(fiber(psi, 0.25), {0.5, -0.5}), 1e-14);
  EXPECT_LT(testutil::set_distance(fiber(psi, 0.0), {0.0, 0.0}), 1e-7);
  const auto zi = scalar_blaschke_times_identity(BlaschkeProduct({{0.0, 1}}, -1.0), 2);
  EXPECT_LT(testutil::set_distance(fiber(zi, 0.3), {0.3, 0.3}), 1e-14);
}

TEST(Fiber, VariesContinuously) {
  std::mt19937_64 rng(9);
  const auto psi = random_colligation_psi(2, 3, rng);
  for (int k = 0; k < 100; ++k) {
    const Complex z = testutil::random_in_disc(rng, 0.95);
    EXPECT_LT(matching_distance(fiber(psi, z), fiber(psi, z + 1e-6)), 1e-3);
  }
}

TEST(Pureness, RandomColligationsHaveInteriorSpectraInDisc) {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 10; ++k) {
    const auto psi = random_colligation_psi(1 + k % 2, 1 + k % 3, rng);
    EXPECT_LT(boundary_unitarity_defect(psi, 2048), 1e-8);
    for (int s = 0; s < 100; ++s) {
      const Complex z = testutil::random_in_disc(rng, 0.999);
      ASSERT_LT(spectral_radius(psi.eval(z)), 1.0);
    }
  }
}

TEST(DistinguishedCertificate, Examples) {
  SampleGrid grid{256, 16, 64};
  EXPECT_EQ(distinguished_certificate(scalar_z(), grid).status, Status::pass);
  EXPECT_EQ(distinguished_certificate(sqrt_psi_polynomial(), grid).status, Status::pass);
  const auto one = from_colligation(Matrix(0, 0), Matrix(0, 1), Matrix(1, 0), Matrix::Ones(1, 1));
  EXPECT_EQ(distinguished_certificate(one, grid).status, Status::fail);
}
