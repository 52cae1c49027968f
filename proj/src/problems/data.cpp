#include "dopt/problems/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "dopt/errors.hpp"

#ifndef DOPT_DATA_DIR
#define DOPT_DATA_DIR "data"
#endif

namespace dopt::problems {

SparseSystem gaussian_sparse(int m, int n, int k, double noise, std::uint64_t seed) {
  if (m < 1 || n < 1 || k < 0 || k > n) throw ArgumentError("gaussian_sparse: invalid shape");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N(0.0, 1.0);
  SparseSystem s;
  s.A.resize(m, n);
  double scale = 1.0 / std::sqrt(static_cast<double>(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) s.A(i, j) = scale * N(rng);
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  s.x0 = Vec::Zero(n);
  for (int t = 0; t < k; ++t) s.x0[idx[t]] = N(rng);
  s.b = s.A * s.x0;
  if (noise > 0)
    for (int i = 0; i < m; ++i) s.b[i] += noise * N(rng);
  return s;
}

bool bp_certificate(const Mat& A, const Vec& x0, double margin) {
  std::vector<int> S, Sc;
  for (Eigen::Index i = 0; i < x0.size(); ++i) (x0[i] != 0.0 ? S : Sc).push_back(static_cast<int>(i));
  if (S.empty()) return true;
  if (S.size() > static_cast<std::size_t>(A.rows())) return false;
  Mat AS(A.rows(), S.size());
  Vec sg(S.size());
  for (std::size_t k = 0; k < S.size(); ++k) {
    AS.col(k) = A.col(S[k]);
    sg[k] = x0[S[k]] > 0 ? 1.0 : -1.0;
  }
  Eigen::LDLT<Mat> G(AS.transpose() * AS);
  if (G.info() != Eigen::Success || G.rcond() < 1e-12) return false;
  Vec lambda = AS * G.solve(sg);
  for (int j : Sc)
    if (std::abs(A.col(j).dot(lambda)) >= 1.0 - margin) return false;
  return true;
}

namespace {

std::vector<int> block_sizes(int total, int P) {
  if (P < 1 || total < P) throw ArgumentError("cannot split into blocks: each node needs at least one entry");
  std::vector<int> sz(P, total / P);
  for (int p = 0; p < total % P; ++p) ++sz[p];
  return sz;
}

}  // namespace

RowData split_rows(const Mat& A, const Vec& b, int P) {
  if (A.rows() != b.size()) throw ArgumentError("split_rows: size mismatch");
  auto sz = block_sizes(static_cast<int>(A.rows()), P);
  RowData d;
  int off = 0;
  for (int p = 0; p < P; ++p) {
    d.A.push_back(A.middleRows(off, sz[p]));
    d.b.push_back(b.segment(off, sz[p]));
    off += sz[p];
  }
  return d;
}

ColumnData split_columns(const Mat& A, const Vec& b, int P) {
  if (A.rows() != b.size()) throw ArgumentError("split_columns: size mismatch");
  auto sz = block_sizes(static_cast<int>(A.cols()), P);
  ColumnData d;
  d.b = b;
  int off = 0;
  for (int p = 0; p < P; ++p) {
    d.A.push_back(A.middleCols(off, sz[p]));
    d.offset.push_back(off);
    off += sz[p];
  }
  return d;
}

Mat stack_rows(const RowData& d) {
  Eigen::Index m = 0;
  for (const auto& a : d.A) m += a.rows();
  Mat A(m, d.A.at(0).cols());
  Eigen::Index off = 0;
  for (const auto& a : d.A) {
    A.middleRows(off, a.rows()) = a;
    off += a.rows();
  }
  return A;
}

Vec stack_rhs(const RowData& d) {
  Eigen::Index m = 0;
  for (const auto& v : d.b) m += v.size();
  Vec b(m);
  Eigen::Index off = 0;
  for (const auto& v : d.b) {
    b.segment(off, v.size()) = v;
    off += v.size();
  }
  return b;
}

Mat join_columns(const ColumnData& d) {
  Eigen::Index n = 0;
  for (const auto& a : d.A) n += a.cols();
  Mat A(d.b.size(), n);
  for (std::size_t p = 0; p < d.A.size(); ++p) A.middleCols(d.offset[p], d.A[p].cols()) = d.A[p];
  return A;
}

void write_matrix(const Mat& M, std::ostream& os) {
  os << M.rows() << ' ' << M.cols() << '\n' << std::setprecision(17);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) os << (j ? " " : "") << M(i, j);
    os << '\n';
  }
}

Mat read_matrix(std::istream& is) {
  long r = 0, c = 0;
  if (!(is >> r >> c) || r < 0 || c < 0) throw ParseError("expected 'rows cols' header", 1);
  Mat M(r, c);
  for (long i = 0; i < r; ++i)
    for (long j = 0; j < c; ++j)
      if (!(is >> M(i, j))) throw ParseError("matrix ended early", static_cast<int>(i + 2));
  return M;
}

void write_matrix_file(const Mat& M, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  write_matrix(M, os);
}

Mat read_matrix_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ArgumentError("cannot read " + path);
  return read_matrix(is);
}

void write_vector_file(const Vec& v, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << std::setprecision(17);
  for (Eigen::Index i = 0; i < v.size(); ++i) os << v[i] << '\n';
}

Vec read_vector_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ArgumentError("cannot read " + path);
  std::vector<double> vals;
  double x = 0;
  while (is >> x) vals.push_back(x);
  if (!is.eof()) throw ParseError("bad value in vector file", static_cast<int>(vals.size() + 1));
  return Eigen::Map<Vec>(vals.data(), static_cast<Eigen::Index>(vals.size()));
}

LabeledPoints read_labeled_points(const std::string& path) {
  Mat M = read_matrix_file(path);
  if (M.cols() < 2) throw ArgumentError("labeled points need at least one feature column");
  LabeledPoints out;
  out.X = M.leftCols(M.cols() - 1);
  out.y = M.col(M.cols() - 1);
  for (Eigen::Index i = 0; i < out.y.size(); ++i)
    if (out.y[i] != 1.0 && out.y[i] != -1.0) throw ArgumentError("labels must be +1 or -1");
  return out;
}

std::string data_path(const std::string& name) { return std::string(DOPT_DATA_DIR) + "/" + name; }

LabeledPoints iris_two_class() { return read_labeled_points(data_path("iris_vv.txt")); }

}  // namespace dopt::problems
