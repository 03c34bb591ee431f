#include "distvar/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace distvar {

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

std::vector<Complex> eigenvalues(const Matrix& m) {
  if (m.rows() == 0) return {};
  Eigen::ComplexEigenSolver<Matrix> es(m, false);
  std::vector<Complex> out(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return out;
}

double spectral_radius(const Matrix& m) {
  double r = 0.0;
  for (const auto& v : eigenvalues(m)) r = std::max(r, std::abs(v));
  return r;
}

NullSpace null_space(const Matrix& m, double rel_threshold, double scale_floor) {
  NullSpace out;
  const auto n = m.cols();
  if (n == 0) {
    out.basis = Matrix(0, 0);
    return out;
  }
  if (m.rows() == 0) {
    out.basis = Matrix::Identity(n, n);
    return out;
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  out.largest = s(0);
  const double thr = rel_threshold * std::max(out.largest, scale_floor);
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > thr) ++rank;
  out.gap_high = rank > 0 ? s(rank - 1) : 0.0;
  out.gap_low = rank < s.size() ? s(rank) : 0.0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > thr / 10.0 && s(i) < thr * 10.0 && thr > 0.0) out.conclusive = false;
  }
  out.basis = svd.matrixV().rightCols(n - rank);
  return out;
}

int numerical_rank(const Matrix& m, double abs_threshold) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > abs_threshold) ++r;
  return r;
}

Matrix orthogonal_complement(const Matrix& q) {
  const auto n = q.rows();
  if (q.cols() == 0) return Matrix::Identity(n, n);
  Matrix proj = Matrix::Identity(n, n) - q * q.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(proj);
  // eigenvalues ascending: the last n - k are ~1
  const auto k = q.cols();
  return es.eigenvectors().rightCols(n - k);
}

Matrix column_span(const Matrix& m, double rel_threshold) {
  if (m.cols() == 0 || m.rows() == 0) return Matrix(m.rows(), 0);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > rel_threshold * s(0)) ++rank;
  return svd.matrixU().leftCols(rank);
}

Matrix random_gaussian(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Matrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      g(i, j) = Complex(re, im);
    }
  return g;
}

Matrix random_unitary(int n, std::mt19937_64& rng) {
  Matrix g = random_gaussian(n, n, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    const double a = std::abs(d);
    if (a > 0.0) q.col(i) *= d / a;
  }
  return q;
}

Matrix nearest_unitary(const Matrix& m) {
  if (m.size() == 0) return m;
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Matrix psd_sqrt(const Matrix& m) {
  if (m.rows() == 0) return m;
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
}

Matrix identity(int n) { return Matrix::Identity(n, n); }

double unitarity_defect(const Matrix& m) {
  if (m.rows() == 0) return 0.0;
  return op_norm(m.adjoint() * m - Matrix::Identity(m.cols(), m.cols()));
}

namespace {

// Union-find single linkage over an arbitrary distance.
template <class Dist>
std::vector<std::vector<int>> single_linkage(int n, double merge, Dist dist) {
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (dist(i, j) <= merge) parent[find(i)] = find(j);
  std::vector<std::vector<int>> groups;
  std::vector<int> slot(n, -1);
  for (int i = 0; i < n; ++i) {
    const int r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<int>(groups.size());
      groups.emplace_back();
    }
    groups[slot[r]].push_back(i);
  }
  return groups;
}

}  // namespace

Clustering cluster_values(const std::vector<Complex>& values, double merge, double separation) {
  const int n = static_cast<int>(values.size());
  auto groups = single_linkage(n, merge, [&](int i, int j) { return std::abs(values[i] - values[j]); });
  Clustering out;
  for (auto& g : groups) {
    Cluster c;
    Complex sum = 0.0;
    for (int i : g) sum += values[i];
    c.center = sum / static_cast<double>(g.size());
    c.count = static_cast<int>(g.size());
    c.members = g;
    out.clusters.push_back(std::move(c));
  }
  out.min_separation = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < out.clusters.size(); ++i)
    for (size_t j = i + 1; j < out.clusters.size(); ++j)
      out.min_separation = std::min(out.min_separation, std::abs(out.clusters[i].center - out.clusters[j].center));
  out.degenerate = out.min_separation < separation;
  return out;
}

double bidistance(const BiPoint& a, const BiPoint& b) {
  return std::max(std::abs(a.z - b.z), std::abs(a.w - b.w));
}

BiClustering cluster_bipoints(const std::vector<BiPoint>& points, double merge, double separation) {
  const int n = static_cast<int>(points.size());
  auto groups = single_linkage(n, merge, [&](int i, int j) { return bidistance(points[i], points[j]); });
  BiClustering out;
  for (auto& g : groups) {
    BiCluster c;
    Complex sz = 0.0, sw = 0.0;
    for (int i : g) {
      sz += points[i].z;
      sw += points[i].w;
    }
    const double k = static_cast<double>(g.size());
    c.center = {sz / k, sw / k};
    c.count = static_cast<int>(g.size());
    c.members = g;
    out.clusters.push_back(std::move(c));
  }
  out.min_separation = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < out.clusters.size(); ++i)
    for (size_t j = i + 1; j < out.clusters.size(); ++j)
      out.min_separation = std::min(out.min_separation, bidistance(out.clusters[i].center, out.clusters[j].center));
  out.degenerate = out.min_separation < separation;
  return out;
}

namespace {

template <class T, class Dist>
double hausdorff_impl(const std::vector<T>& a, const std::vector<T>& b, Dist dist) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  double h = 0.0;
  for (const auto& x : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& y : b) best = std::min(best, dist(x, y));
    h = std::max(h, best);
  }
  for (const auto& y : b) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& x : a) best = std::min(best, dist(x, y));
    h = std::max(h, best);
  }
  return h;
}

}  // namespace

double hausdorff(const std::vector<BiPoint>& a, const std::vector<BiPoint>& b) {
  return hausdorff_impl(a, b, [](const BiPoint& x, const BiPoint& y) { return bidistance(x, y); });
}

double hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  return hausdorff_impl(a, b, [](Complex x, Complex y) { return std::abs(x - y); });
}

std::vector<int> optimal_assignment(const std::vector<std::vector<double>>& cost) {
  // Potentials formulation, 1-based internally.
  const int n = static_cast<int>(cost.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> assignment(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) assignment[p[j] - 1] = j - 1;
  return assignment;
}

double matching_distance(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  if (a.empty()) return 0.0;
  std::vector<std::vector<double>> cost(a.size(), std::vector<double>(b.size()));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) cost[i][j] = std::abs(a[i] - b[j]);
  auto asg = optimal_assignment(cost);
  double worst = 0.0;
  for (size_t i = 0; i < a.size(); ++i) worst = std::max(worst, cost[i][asg[i]]);
  return worst;
}

}  // namespace distvar
