#include "cartanforge/linalg.hpp"

namespace cf {

namespace {

// characteristic of the field the matrix lives over (0 only if all entries
// are absorbing zeros, which callers never produce)
int field_of(const Mat& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (m.at(i, j).p()) return m.at(i, j).p();
  return 0;
}

}  // namespace

Mat Mat::identity(int n, int p) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.at(i, j) = Scalar::of_int(p, i == j ? 1 : 0);
  return m;
}

Mat Mat::operator*(const Mat& o) const {
  CF_CHECK(c_ == o.r_, "matrix product shape mismatch");
  Mat out(r_, o.c_);
  for (int i = 0; i < r_; ++i)
    for (int k = 0; k < c_; ++k) {
      const Scalar& x = at(i, k);
      if (x.is_zero()) continue;
      for (int j = 0; j < o.c_; ++j) out.at(i, j) += x * o.at(k, j);
    }
  return out;
}

Vec Mat::apply(const Vec& v) const {
  CF_CHECK(int(v.size()) == c_, "matrix apply shape mismatch");
  Vec out(r_);
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < c_; ++j)
      if (!at(i, j).is_zero()) out[i] += at(i, j) * v[j];
  return out;
}

Mat Mat::transpose() const {
  Mat out(c_, r_);
  for (int i = 0; i < r_; ++i)
    for (int j = 0; j < c_; ++j) out.at(j, i) = at(i, j);
  return out;
}

bool Mat::operator==(const Mat& o) const {
  if (r_ != o.r_ || c_ != o.c_) return false;
  for (size_t i = 0; i < a_.size(); ++i)
    if (a_[i] != o.a_[i]) return false;
  return true;
}

std::vector<int> rref(Mat& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols() && row < m.rows(); ++col) {
    int sel = -1;
    for (int i = row; i < m.rows(); ++i)
      if (!m.at(i, col).is_zero()) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    if (sel != row)
      for (int j = 0; j < m.cols(); ++j) std::swap(m.at(sel, j), m.at(row, j));
    Scalar inv = m.at(row, col).invert();
    for (int j = col; j < m.cols(); ++j) m.at(row, j) *= inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == row || m.at(i, col).is_zero()) continue;
      Scalar f = m.at(i, col);
      for (int j = col; j < m.cols(); ++j) m.at(i, j) -= f * m.at(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

int rank(Mat m) { return int(rref(m).size()); }

std::vector<Vec> right_kernel(const Mat& m) {
  int p = field_of(m);
  CF_CHECK(p != 0 || m.rows() == 0 || m.cols() == 0, "kernel of a field-less matrix");
  if (p == 0) p = 2;
  Mat r = m;
  std::vector<int> pivots = rref(r);
  std::vector<bool> is_pivot(m.cols(), false);
  for (int c : pivots) is_pivot[c] = true;
  std::vector<Vec> basis;
  for (int free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    Vec v(m.cols());
    v[free] = Scalar::one(p);
    for (size_t k = 0; k < pivots.size(); ++k) v[pivots[k]] = -r.at(int(k), free);
    basis.push_back(std::move(v));
  }
  return basis;
}

std::vector<Vec> left_kernel(const Mat& m) {
  std::vector<Vec> cols = right_kernel(m.transpose());
  Mat stacked(int(cols.size()), m.rows());
  for (size_t i = 0; i < cols.size(); ++i)
    for (int j = 0; j < m.rows(); ++j) stacked.at(int(i), j) = cols[i][j];
  rref(stacked);
  std::vector<Vec> out;
  for (int i = 0; i < stacked.rows(); ++i) {
    Vec v(m.rows());
    for (int j = 0; j < m.rows(); ++j) v[j] = stacked.at(i, j);
    out.push_back(std::move(v));
  }
  return out;
}

int EchelonSpan::insert(const Vec& v, Vec* expr) {
  CF_CHECK(int(v.size()) == dim_, "span dimension mismatch");
  Vec w = v;
  Vec combo;
  combo.resize(size_t(size()));
  for (size_t k = 0; k < rows_.size(); ++k) {
    Scalar f = w[lead_[k]];
    if (f.is_zero()) continue;
    for (int j = 0; j < dim_; ++j)
      if (!rows_[k][j].is_zero()) w[j] -= f * rows_[k][j];
    for (size_t m = 0; m < combo_[k].size(); ++m)
      if (!combo_[k][m].is_zero()) combo[m] += f * combo_[k][m];
  }
  int lead = -1;
  for (int j = 0; j < dim_; ++j)
    if (!w[j].is_zero()) {
      lead = j;
      break;
    }
  if (lead < 0) {
    if (expr) *expr = std::move(combo);
    return -1;
  }
  // accept: normalize leading entry, record provenance over the originals
  Scalar inv = w[lead].invert();
  for (int j = 0; j < dim_; ++j) w[j] *= inv;
  for (auto& c : combo) c = -(c * inv);
  int idx = size();
  combo.push_back(inv);
  // keep full RREF: clear the new lead column in the existing rows so that a
  // single reduction pass stays exact for future inserts
  for (size_t k = 0; k < rows_.size(); ++k) {
    Scalar f = rows_[k][lead];
    if (f.is_zero()) continue;
    for (int j = 0; j < dim_; ++j)
      if (!w[j].is_zero()) rows_[k][j] -= f * w[j];
    combo_[k].resize(size_t(idx) + 1);
    for (size_t m = 0; m <= size_t(idx); ++m)
      if (!combo[m].is_zero()) combo_[k][m] -= f * combo[m];
  }
  rows_.push_back(std::move(w));
  lead_.push_back(lead);
  combo_.push_back(std::move(combo));
  // ascending lead order keeps reduction deterministic
  for (size_t k = rows_.size(); k-- > 1;) {
    if (lead_[k] < lead_[k - 1]) {
      std::swap(rows_[k], rows_[k - 1]);
      std::swap(lead_[k], lead_[k - 1]);
      std::swap(combo_[k], combo_[k - 1]);
    } else {
      break;
    }
  }
  return idx;
}

bool EchelonSpan::contains(const Vec& v) const {
  Vec w = v;
  for (size_t k = 0; k < rows_.size(); ++k) {
    Scalar f = w[lead_[k]];
    if (f.is_zero()) continue;
    for (int j = 0; j < dim_; ++j)
      if (!rows_[k][j].is_zero()) w[j] -= f * rows_[k][j];
  }
  for (const auto& x : w)
    if (!x.is_zero()) return false;
  return true;
}

}  // namespace cf
