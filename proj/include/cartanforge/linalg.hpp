#pragma once

#include <vector>

#include "cartanforge/scalars.hpp"

namespace cf {

using Vec = std::vector<Scalar>;

// Dense row-major matrix over Scalar.
class Mat {
public:
  Mat() : r_(0), c_(0) {}
  Mat(int r, int c) : r_(r), c_(c), a_(size_t(r) * size_t(c)) {}
  static Mat identity(int n, int p);

  int rows() const { return r_; }
  int cols() const { return c_; }
  Scalar& at(int i, int j) { return a_[size_t(i) * c_ + j]; }
  const Scalar& at(int i, int j) const { return a_[size_t(i) * c_ + j]; }

  Mat operator*(const Mat& o) const;
  Vec apply(const Vec& v) const;  // m * v
  Mat transpose() const;
  bool operator==(const Mat& o) const;

private:
  int r_, c_;
  std::vector<Scalar> a_;
};

// Reduced row echelon form in place (first nonzero row entry scanning
// top-down per column); returns pivot column indices in order.
std::vector<int> rref(Mat& m);

int rank(Mat m);

// Basis of {v : m v = 0}. Deterministic: one vector per free column in
// increasing order, that coordinate set to 1, pivot coordinates solved.
std::vector<Vec> right_kernel(const Mat& m);

// Basis of {v : v m = 0}, rows returned in RREF.
std::vector<Vec> left_kernel(const Mat& m);

// Incremental echelon span with expression tracking over the ACCEPTED
// originals. insert() returns the new basis index, or -1 when the vector is
// dependent; then *expr holds coefficients c with v = sum c_k * accepted_k.
class EchelonSpan {
public:
  explicit EchelonSpan(int dim) : dim_(dim) {}
  int insert(const Vec& v, Vec* expr = nullptr);
  int size() const { return int(rows_.size()); }
  bool contains(const Vec& v) const;

private:
  int dim_;
  std::vector<Vec> rows_;    // echelon rows, leading entry 1
  std::vector<int> lead_;    // leading column of each row
  std::vector<Vec> combo_;   // rows_[k] = sum combo_[k][m] * accepted_m
};

}  // namespace cf
