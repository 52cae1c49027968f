#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dopt::problems {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct SparseSystem {
  Mat A;   // m x n, entries N(0, 1/m)
  Vec b;   // A x0 + noise
  Vec x0;  // k-sparse ground truth
};

SparseSystem gaussian_sparse(int m, int n, int k, double noise, std::uint64_t seed);

// Strict dual certificate for x0 being the unique minimizer of ||x||_1 s.t. Ax = Ax0:
// lambda = A_S (A_S' A_S)^{-1} sign(x0_S) and max off-support |A'lambda| < 1 - margin.
bool bp_certificate(const Mat& A, const Vec& x0, double margin = 1e-6);

// Row partition: node p holds (A_p, b_p).
struct RowData {
  std::vector<Mat> A;
  std::vector<Vec> b;
};

// Column partition: node p holds A_p (columns offset[p] .. offset[p]+cols-1); b is shared.
struct ColumnData {
  std::vector<Mat> A;
  Vec b;
  std::vector<int> offset;
};

// Near-equal contiguous blocks; the first (m mod P) blocks get one extra row/column.
RowData split_rows(const Mat& A, const Vec& b, int P);
ColumnData split_columns(const Mat& A, const Vec& b, int P);
Mat stack_rows(const RowData& d);
Vec stack_rhs(const RowData& d);
Mat join_columns(const ColumnData& d);

// Dense matrix text: "rows cols" then row-major values.
void write_matrix(const Mat& M, std::ostream& os);
Mat read_matrix(std::istream& is);
void write_matrix_file(const Mat& M, const std::string& path);
Mat read_matrix_file(const std::string& path);
// Plain vector: one value per line.
void write_vector_file(const Vec& v, const std::string& path);
Vec read_vector_file(const std::string& path);

struct LabeledPoints {
  Mat X;  // K x d
  Vec y;  // +-1
};

// Matrix file whose last column holds +-1 labels.
LabeledPoints read_labeled_points(const std::string& path);
// Iris versicolor (+1) and virginica (-1), 100 x 4, shipped with the repository.
LabeledPoints iris_two_class();
std::string data_path(const std::string& name);

}  // namespace dopt::problems
