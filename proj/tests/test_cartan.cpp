#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <random>

#include "cartanforge/cartan.hpp"

using cf::CartanSpec;
using cf::Err;
using cf::Error;
using cf::Mark;
using cf::Mat;
using cf::Parity;
using cf::Scalar;

namespace {

CartanSpec mkspec(int p, const std::vector<std::vector<std::string>>& cells,
                  const std::vector<std::string>& parity) {
  nlohmann::json j;
  j["p"] = p;
  j["matrix"] = cells;
  j["parity"] = parity;
  return cf::spec_from_json(j.dump());
}

Mat from_ints(int p, const std::vector<std::vector<int>>& rows) {
  Mat m(int(rows.size()), rows.empty() ? 0 : int(rows[0].size()));
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m.at(i, j) = Scalar::of_int(p, rows[i][j]);
  return m;
}

const std::vector<std::vector<std::string>> kPe3 = {{"ev", "1", "1"}, {"1", "0", "0"}, {"1", "0", "ev"}};
const std::vector<std::string> kPe3Par = {"ev", "od", "ev"};

}  // namespace

TEST_CASE("normalize keeps already-normalized input") {
  Mat raw(2, 2);
  raw.at(0, 0) = Scalar::of_int(3, 2);
  raw.at(0, 1) = Scalar::of_int(3, -1);
  raw.at(1, 0) = Scalar::param(3);
  raw.at(1, 1) = Scalar::of_int(3, 2);
  CartanSpec s = cf::normalize(raw, {Parity::Even, Parity::Even}, 3);
  CHECK(s.at(0, 1) == Scalar::of_int(3, -1));
  CHECK(s.at(1, 0) == Scalar::param(3));
  CHECK(s.diag == std::vector<Mark>{Mark::Two, Mark::Two});
  CHECK(s.parametric);
}

TEST_CASE("normalize rescales a nonzero even diagonal to 2") {
  // row 1 of ((4,2),(1,2)) is scaled by 2/4 = 3 over GF(5), giving ((2,1),(1,2))
  CartanSpec s = cf::normalize(from_ints(5, {{4, 2}, {1, 2}}), {Parity::Even, Parity::Even}, 5);
  CHECK(s.at(0, 0) == Scalar::of_int(5, 2));
  CHECK(s.at(0, 1) == Scalar::of_int(5, 1));
  CHECK(s.at(1, 0) == Scalar::of_int(5, 1));
  CHECK(s.at(1, 1) == Scalar::of_int(5, 2));
}

TEST_CASE("normalize symmetrizes free rows when possible") {
  // ((0,-1),(-3,2)) over GF(5), first node odd: row 1 rescales by 3
  CartanSpec s = cf::normalize(from_ints(5, {{0, -1}, {-3, 2}}), {Parity::Odd, Parity::Even}, 5);
  CHECK(s.at(0, 1) == Scalar::of_int(5, 2));
  CHECK(s.at(1, 0) == Scalar::of_int(5, 2));
  CHECK(s.diag == std::vector<Mark>{Mark::Zero, Mark::Two});
}

TEST_CASE("normalize is idempotent") {
  std::vector<CartanSpec> specs = {
      cf::normalize(from_ints(5, {{4, 2}, {1, 2}}), {Parity::Even, Parity::Even}, 5),
      cf::normalize(from_ints(5, {{0, -1}, {-3, 2}}), {Parity::Odd, Parity::Even}, 5),
      mkspec(2, kPe3, kPe3Par),
  };
  for (const auto& s : specs) {
    CartanSpec again = cf::normalize(s.entries, s.parity, s.p);
    CHECK(again == s);
  }
}

TEST_CASE("normalize rejects asymmetric zero patterns") {
  CHECK_THROWS_AS(cf::normalize(from_ints(5, {{2, 1}, {0, 2}}), {Parity::Even, Parity::Even}, 5),
                  Error);
  try {
    cf::normalize(from_ints(5, {{2, 1}, {0, 2}}), {Parity::Even, Parity::Even}, 5);
  } catch (const Error& e) {
    CHECK(e.code() == Err::ZeroPatternAsymmetric);
  }
}

TEST_CASE("diagonal marks at p=2") {
  // the integer 2 reduces to 0, so an even node shows ev; explicit 1 shows od
  CartanSpec s = mkspec(2, {{"2", "1"}, {"1", "1"}}, {"ev", "ev"});
  CHECK(s.diag == std::vector<Mark>{Mark::Ev, Mark::Od});
  CHECK_THROWS_AS(mkspec(2, {{"ev", "1"}, {"1", "od"}}, {"ev", "od"}), Error);
}

TEST_CASE("is_indecomposable") {
  CHECK_FALSE(cf::is_indecomposable(mkspec(5, {{"2", "0"}, {"0", "2"}}, {"ev", "ev"})));
  CHECK(cf::is_indecomposable(mkspec(5, {{"2", "-1"}, {"-1", "2"}}, {"ev", "ev"})));
  // wk(4;a) matrix 1
  CHECK(cf::is_indecomposable(mkspec(
      2, {{"ev", "a", "0", "0"}, {"a", "ev", "1", "0"}, {"0", "1", "ev", "1"}, {"0", "0", "1", "ev"}},
      {"ev", "ev", "ev", "ev"})));
}

TEST_CASE("symmetrizer") {
  // symmetric matrix: identity works
  CartanSpec wk3 = mkspec(2, {{"ev", "a", "0"}, {"a", "ev", "1"}, {"0", "1", "ev"}},
                          {"ev", "ev", "ev"});
  auto d = cf::symmetrizer(wk3);
  REQUIRE(d.has_value());
  for (const auto& x : *d) CHECK(x.is_one());

  // ag(2) matrix 1 over GF(7): D = diag(1,1,3)
  CartanSpec ag = mkspec(7, {{"0", "-1", "0"}, {"-1", "2", "-3"}, {"0", "-1", "2"}},
                         {"od", "ev", "ev"});
  auto dag = cf::symmetrizer(ag);
  REQUIRE(dag.has_value());
  CHECK((*dag)[0] == Scalar::of_int(7, 1));
  CHECK((*dag)[1] == Scalar::of_int(7, 1));
  CHECK((*dag)[2] == Scalar::of_int(7, 3));
  // and D A is exactly symmetric
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK((*dag)[i] * ag.at(i, j) == (*dag)[j] * ag.at(j, i));

  // 4-node loop with one edge labeled a != 0,1 has no symmetrizer
  CartanSpec loop = mkspec(
      2, {{"ev", "1", "1", "0"}, {"1", "ev", "0", "1"}, {"1", "0", "ev", "1"}, {"0", "1", "a", "ev"}},
      {"ev", "ev", "ev", "ev"});
  CHECK_FALSE(cf::symmetrizer(loop).has_value());
}

TEST_CASE("canonical form distinguishes base changes from relabelings") {
  // Three 4x4 parametric matrices of one algebra (node 1 odd isotropic,
  // others even).  They arise from each other by odd reflections, i.e. a
  // change of base, NOT by node relabeling: the odd node has one neighbor
  // in m1/m3 but two in m2, and relabeling preserves neighbor counts.
  // canonical_form must therefore keep them apart; the reflection layer is
  // what identifies them later.
  std::vector<std::string> par = {"od", "ev", "ev", "ev"};
  CartanSpec m1 = mkspec(
      2, {{"0", "a", "0", "0"}, {"a", "ev", "0", "1"}, {"0", "0", "ev", "1"}, {"0", "1", "1", "ev"}},
      par);
  CartanSpec m2 = mkspec(
      2, {{"0", "a", "1", "0"}, {"a", "ev", "0", "0"}, {"1", "0", "ev", "1"}, {"0", "0", "1", "ev"}},
      par);
  CartanSpec m3 = mkspec(
      2, {{"0", "0", "0", "1"}, {"0", "ev", "a", "1"}, {"0", "a", "ev", "0"}, {"1", "1", "0", "ev"}},
      par);
  CartanSpec c1 = cf::canonical_form(m1);
  CartanSpec c2 = cf::canonical_form(m2);
  CartanSpec c3 = cf::canonical_form(m3);
  CHECK(c1 != c2);
  CHECK(c1 != c3);
  CHECK(c2 != c3);
  CHECK(cf::canonical_form(c1) == c1);

  // An actual relabeling (swap the two even nodes 3,4) plus a rescale of
  // the free first row does canonicalize identically to m1.
  CartanSpec m1p = mkspec(2,
                          {{"0", "a*a", "0", "0"},
                           {"a", "ev", "1", "0"},
                           {"0", "1", "ev", "1"},
                           {"0", "0", "1", "ev"}},
                          par);
  CHECK(c1 == cf::canonical_form(m1p));
}

TEST_CASE("canonical form separates inequivalent matrices") {
  // first three Cartan matrices of one rank-3 family, pairwise inequivalent
  CartanSpec a1 = mkspec(7, {{"0", "-1", "0"}, {"-1", "2", "-3"}, {"0", "-1", "2"}},
                         {"od", "ev", "ev"});
  CartanSpec a2 = mkspec(7, {{"0", "-1", "0"}, {"-1", "0", "3"}, {"0", "-1", "2"}},
                         {"od", "od", "ev"});
  CartanSpec a3 = mkspec(7, {{"0", "-3", "1"}, {"-3", "0", "2"}, {"-1", "-2", "2"}},
                         {"od", "od", "ev"});
  CHECK(cf::canonical_form(a1) != cf::canonical_form(a2));
  CHECK(cf::canonical_form(a2) != cf::canonical_form(a3));
  CHECK(cf::canonical_form(a1) != cf::canonical_form(a3));
}

TEST_CASE("canonical form is constant on equivalence classes") {
  std::mt19937 rng(31337);
  auto rnd = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  int specs_done = 0;
  while (specs_done < 100) {
    int p = std::vector<int>{2, 3, 5}[size_t(rnd(0, 2))];
    int n = rnd(2, 5);
    Mat raw(n, n);
    std::vector<Parity> par;
    for (int i = 0; i < n; ++i) par.push_back(rnd(0, 1) ? Parity::Odd : Parity::Even);
    for (int i = 0; i < n; ++i) raw.at(i, i) = Scalar::of_int(p, rnd(0, p - 1));
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (rnd(0, 1)) {
          raw.at(i, j) = Scalar::of_int(p, rnd(1, p - 1));
          raw.at(j, i) = Scalar::of_int(p, rnd(1, p - 1));
        } else {
          raw.at(i, j) = Scalar::zero(p);
          raw.at(j, i) = Scalar::zero(p);
        }
      }
    CartanSpec s = cf::normalize(raw, par, p);
    CartanSpec base = cf::canonical_form(s);
    ++specs_done;
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<int> perm;
      perm.resize(size_t(n));
      for (int i = 0; i < n; ++i) perm[size_t(i)] = i;
      std::shuffle(perm.begin(), perm.end(), rng);
      CartanSpec t;
      t.p = p;
      t.n = n;
      t.entries = Mat(n, n);
      t.parity.resize(size_t(n));
      t.diag.resize(size_t(n));
      t.parametric = s.parametric;
      for (int k = 0; k < n; ++k) {
        t.parity[size_t(k)] = s.parity[size_t(perm[size_t(k)])];
        t.diag[size_t(k)] = s.diag[size_t(perm[size_t(k)])];
        Scalar c = Scalar::one(p);
        if (s.free_row(perm[size_t(k)])) c = Scalar::of_int(p, rnd(1, p - 1));
        for (int l = 0; l < n; ++l)
          t.entries.at(k, l) = c * s.at(perm[size_t(k)], perm[size_t(l)]);
      }
      REQUIRE(cf::canonical_form(t) == base);
    }
  }
}

TEST_CASE("left kernel") {
  // 1x1 zero matrix on an even node
  CartanSpec ev1 = mkspec(2, {{"ev"}}, {"ev"});
  Mat t = cf::left_kernel(ev1);
  REQUIRE(t.rows() == 1);
  CHECK(t.at(0, 0).is_one());

  CHECK(cf::left_kernel(mkspec(5, {{"2", "-1"}, {"-1", "2"}}, {"ev", "ev"})).rows() == 0);

  CartanSpec pe3 = mkspec(2, kPe3, kPe3Par);
  Mat t3 = cf::left_kernel(pe3);
  REQUIRE(t3.rows() == 1);
  CHECK(t3.at(0, 0).is_zero());
  CHECK(t3.at(0, 1).is_one());
  CHECK(t3.at(0, 2).is_one());
  // T A = 0 exactly
  for (int j = 0; j < 3; ++j) {
    Scalar acc;
    for (int i = 0; i < 3; ++i) acc += t3.at(0, i) * pe3.at(i, j);
    CHECK(acc.is_zero());
  }
}

TEST_CASE("grading completion") {
  CHECK(cf::grading_completion(mkspec(5, {{"2", "-1"}, {"-1", "2"}}, {"ev", "ev"})).rows() == 0);

  // pe(3): row space misses only the second coordinate, so B = (0,1,0)
  Mat b3 = cf::grading_completion(mkspec(2, kPe3, kPe3Par));
  REQUIRE(b3.rows() == 1);
  CHECK(b3.at(0, 0).is_zero());
  CHECK(b3.at(0, 1).is_one());
  CHECK(b3.at(0, 2).is_zero());

  // pe(4): corank 2, two completion rows
  CartanSpec pe4 = mkspec(
      2, {{"ev", "1", "0", "0"}, {"1", "ev", "1", "1"}, {"0", "1", "0", "0"}, {"0", "1", "0", "ev"}},
      {"ev", "ev", "od", "ev"});
  Mat b4 = cf::grading_completion(pe4);
  CHECK(b4.rows() == 2);
  // stacked (A;B) has rank n
  Mat stacked(pe4.n + b4.rows(), pe4.n);
  for (int i = 0; i < pe4.n; ++i)
    for (int j = 0; j < pe4.n; ++j) stacked.at(i, j) = pe4.at(i, j);
  for (int i = 0; i < b4.rows(); ++i)
    for (int j = 0; j < pe4.n; ++j) stacked.at(pe4.n + i, j) = b4.at(i, j);
  CHECK(cf::rank(stacked) == pe4.n);
}

TEST_CASE("json round trip") {
  std::vector<CartanSpec> specs = {
      mkspec(2, {{"ev", "a", "0"}, {"a", "0", "1"}, {"0", "1", "0"}}, {"ev", "ev", "ev"}),
      mkspec(2, kPe3, kPe3Par),
      mkspec(3, {{"2", "-1"}, {"-2", "2"}}, {"ev", "ev"}),
  };
  for (const auto& s : specs) {
    CartanSpec back = cf::spec_from_json(cf::spec_to_json(s));
    CHECK(back == s);
  }
  // spec example: "0" diagonal tokens on even nodes are read as ev
  CartanSpec wk = mkspec(2, {{"ev", "a", "0"}, {"a", "0", "1"}, {"0", "1", "0"}}, {"ev", "ev", "ev"});
  CHECK(wk.diag == std::vector<Mark>{Mark::Ev, Mark::Ev, Mark::Ev});
}
