#pragma once

#include <algorithm>
#include <complex>
#include <random>
#include <vector>

#include "distvar/linalg.hpp"
#include "distvar/poly.hpp"
#include "distvar/types.hpp"

namespace testutil {

using distvar::Complex;
using distvar::Matrix;

inline Matrix mat(std::initializer_list<std::initializer_list<Complex>> rows) {
  Matrix m(rows.size(), rows.begin()->size());
  int i = 0;
  for (const auto& r : rows) {
    int j = 0;
    for (const auto& v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Lower shift [[0,0],[1,0]].
inline Matrix j2() { return mat({{0, 0}, {1, 0}}); }

inline Matrix diag(std::initializer_list<Complex> d) {
  Matrix m = Matrix::Zero(d.size(), d.size());
  int i = 0;
  for (const auto& v : d) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

inline Complex random_in_disc(std::mt19937_64& rng, double rmax) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double r = rmax * std::sqrt(u(rng));
  const double t = 2.0 * M_PI * u(rng);
  return std::polar(r, t);
}

inline Complex random_gaussian(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return {g(rng), g(rng)};
}

inline distvar::Poly2 random_poly2(std::mt19937_64& rng, int dz, int dw) {
  Matrix c(dz + 1, dw + 1);
  for (int i = 0; i <= dz; ++i)
    for (int j = 0; j <= dw; ++j) c(i, j) = random_gaussian(rng);
  return distvar::Poly2(c);
}

// Naive double sum; independent of the library's Horner scheme.
inline Complex naive_eval2(const distvar::Poly2& p, Complex z, Complex w) {
  Complex s = 0.0;
  for (int i = 0; i <= p.degz(); ++i)
    for (int j = 0; j <= p.degw(); ++j) s += p.coeff(i, j) * std::pow(z, i) * std::pow(w, j);
  return s;
}

// Naive matrix sum of coeff(i,j) T1^i T2^j.
inline Matrix naive_apply(const distvar::Poly2& p, const Matrix& t1, const Matrix& t2) {
  const auto n = t1.rows();
  Matrix out = Matrix::Zero(n, n);
  Matrix p1 = Matrix::Identity(n, n);
  for (int i = 0; i <= p.degz(); ++i) {
    Matrix p2 = Matrix::Identity(n, n);
    for (int j = 0; j <= p.degw(); ++j) {
      out += p.coeff(i, j) * p1 * p2;
      p2 = p2 * t2;
    }
    p1 = p1 * t1;
  }
  return out;
}

inline double set_distance(std::vector<Complex> a, std::vector<Complex> b) {
  return distvar::matching_distance(a, b);
}

}  // namespace testutil
