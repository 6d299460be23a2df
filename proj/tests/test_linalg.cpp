#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cartanforge/linalg.hpp"

using cf::EchelonSpan;
using cf::Mat;
using cf::Scalar;
using cf::Vec;

namespace {

Mat from_ints(int p, const std::vector<std::vector<int>>& rows) {
  Mat m(int(rows.size()), rows.empty() ? 0 : int(rows[0].size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m.at(i, j) = Scalar::of_int(p, rows[i][j]);
  return m;
}

bool is_zero_vec(const Vec& v) {
  for (const auto& x : v)
    if (!x.is_zero()) return false;
  return true;
}

Vec mat_vec(const Mat& m, const Vec& v) { return m.apply(v); }

}  // namespace

TEST_CASE("rank and rref") {
  CHECK(cf::rank(from_ints(5, {{1, 2}, {2, 4}})) == 1);
  CHECK(cf::rank(from_ints(5, {{1, 2}, {2, 3}})) == 2);
  CHECK(cf::rank(from_ints(2, {{1, 1, 0}, {0, 1, 1}, {1, 0, 1}})) == 2);
  // parametric: ((a,1),(1,a)) has rank 1 iff a^2 = 1; generically rank 2
  Mat m(2, 2);
  m.at(0, 0) = Scalar::param(3);
  m.at(0, 1) = Scalar::one(3);
  m.at(1, 0) = Scalar::one(3);
  m.at(1, 1) = Scalar::param(3);
  CHECK(cf::rank(m) == 2);
}

TEST_CASE("right kernel") {
  Mat m = from_ints(3, {{1, 1, 1}, {0, 1, 2}});
  auto ker = cf::right_kernel(m);
  REQUIRE(ker.size() == 1);
  CHECK(is_zero_vec(mat_vec(m, ker[0])));
  CHECK(ker[0][2].is_one());  // free coordinate set to 1

  // full-rank square matrix: trivial kernel
  CHECK(cf::right_kernel(from_ints(5, {{2, 1}, {1, 1}})).empty());
}

TEST_CASE("left kernel in RREF") {
  // rows (1,2,3) and (2,4,6) are dependent over GF(5)
  Mat m = from_ints(5, {{1, 2, 3}, {2, 4, 6}});
  auto ker = cf::left_kernel(m);
  REQUIRE(ker.size() == 1);
  // v m = 0 and leading entry 1
  Vec vm = m.transpose().apply(ker[0]);
  CHECK(is_zero_vec(vm));
  CHECK(ker[0][0].is_one());
}

TEST_CASE("echelon span expression tracking") {
  std::mt19937 rng(4242);
  for (int p : {2, 3, 5}) {
    for (int trial = 0; trial < 60; ++trial) {
      int dim = std::uniform_int_distribution<int>(1, 6)(rng);
      EchelonSpan span(dim);
      std::vector<Vec> accepted;
      for (int step = 0; step < 12; ++step) {
        Vec v(dim);
        for (auto& x : v) x = Scalar::of_int(p, std::uniform_int_distribution<int>(0, p - 1)(rng));
        Vec expr;
        int idx = span.insert(v, &expr);
        if (idx >= 0) {
          REQUIRE(idx == int(accepted.size()));
          accepted.push_back(v);
        } else {
          // dependent vector must reconstruct exactly from accepted originals
          REQUIRE(expr.size() == accepted.size());
          Vec rec(dim);
          for (size_t k = 0; k < accepted.size(); ++k)
            for (int j = 0; j < dim; ++j) rec[j] += expr[k] * accepted[k][j];
          for (int j = 0; j < dim; ++j) REQUIRE(rec[j] == v[j]);
          REQUIRE(span.contains(v));
        }
      }
      CHECK(span.size() == int(accepted.size()));
      CHECK(span.size() <= dim);
    }
  }
}

TEST_CASE("echelon span on parametric vectors") {
  EchelonSpan span(2);
  Vec v1 = {Scalar::param(2), Scalar::one(2)};
  Vec v2 = {Scalar::one(2), Scalar::param(2).invert()};  // (1, 1/a) = (1/a) * v1
  CHECK(span.insert(v1) == 0);
  Vec expr;
  CHECK(span.insert(v2, &expr) == -1);
  REQUIRE(expr.size() == 1);
  CHECK(expr[0] == Scalar::param(2).invert());
}
