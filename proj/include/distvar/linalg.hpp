#pragma once

#include <random>
#include <vector>

#include "distvar/types.hpp"

namespace distvar {

// Largest singular value; 0 for empty matrices.
double op_norm(const Matrix& m);
double spectral_radius(const Matrix& m);
std::vector<Complex> eigenvalues(const Matrix& m);

struct NullSpace {
  Matrix basis;            // orthonormal columns
  double largest = 0.0;    // largest singular value of the input
  double gap_low = 0.0;    // largest singular value declared zero
  double gap_high = 0.0;   // smallest singular value declared nonzero
  bool conclusive = true;  // no singular value within 10x of the threshold
};

// Kernel of `m` with singular values below rel_threshold * largest treated
// as zero. A matrix with no rows has the full space as kernel. The threshold
// is taken relative to max(largest singular value, scale_floor).
NullSpace null_space(const Matrix& m, double rel_threshold, double scale_floor = 0.0);

// Number of singular values strictly above abs_threshold.
int numerical_rank(const Matrix& m, double abs_threshold);

// Orthonormal basis of the orthogonal complement of span(columns of q),
// where q has orthonormal columns.
Matrix orthogonal_complement(const Matrix& q);

// Orthonormal basis of the column span at a relative threshold.
Matrix column_span(const Matrix& m, double rel_threshold);

// Haar-distributed unitary.
Matrix random_unitary(int n, std::mt19937_64& rng);
Matrix random_gaussian(int rows, int cols, std::mt19937_64& rng);

Matrix nearest_unitary(const Matrix& m);

// Principal square root of a Hermitian PSD matrix; negative eigenvalues from
// rounding are clamped to zero.
Matrix psd_sqrt(const Matrix& m);

Matrix identity(int n);

// ||m* m - I||.
double unitarity_defect(const Matrix& m);

struct Cluster {
  Complex center;
  int count = 0;
  std::vector<int> members;
};

struct BiPoint {
  Complex z;
  Complex w;
};

struct BiCluster {
  BiPoint center;
  int count = 0;
  std::vector<int> members;
};

// Single-linkage clustering at radius `merge`; centers are member means.
// `degenerate` is set when two distinct centers are closer than `separation`.
struct Clustering {
  std::vector<Cluster> clusters;
  bool degenerate = false;
  double min_separation = 0.0;
};
Clustering cluster_values(const std::vector<Complex>& values, double merge, double separation);

struct BiClustering {
  std::vector<BiCluster> clusters;
  bool degenerate = false;
  double min_separation = 0.0;
};
// Distance on C^2 is max(|dz|, |dw|).
BiClustering cluster_bipoints(const std::vector<BiPoint>& points, double merge, double separation);

double bidistance(const BiPoint& a, const BiPoint& b);

// Symmetric Hausdorff distance between finite sets; +inf if exactly one is empty.
double hausdorff(const std::vector<BiPoint>& a, const std::vector<BiPoint>& b);
double hausdorff(const std::vector<Complex>& a, const std::vector<Complex>& b);

// Minimum-cost perfect assignment between equal-size multisets; returns the
// largest matched distance, or +inf when the sizes differ.
double matching_distance(const std::vector<Complex>& a, const std::vector<Complex>& b);

// Hungarian algorithm on a square cost matrix; returns column for each row.
std::vector<int> optimal_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace distvar
