#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "cartanforge/cartan.hpp"
#include "cartanforge/linalg.hpp"

namespace cf {

// Z^n grade of a basis element: exponents of the simple roots.  The all-zero
// vector marks Cartan elements; an empty vector marks ungraded presentations.
using RootKey = std::vector<int>;

int root_height(const RootKey& r);
RootKey root_add(const RootKey& a, const RootKey& b);
RootKey root_neg(const RootKey& a);

// Sparse linear combination of basis elements, id -> coefficient.
using Combo = std::map<int, Scalar>;

void combo_add(Combo& dst, int id, const Scalar& c);
void combo_add(Combo& dst, const Combo& src, const Scalar& c);

enum class ElemKind : uint8_t { CartanH, CartanD, Positive, Negative };

struct BasisElement {
  int id = -1;
  RootKey root;  // all-zero for Cartan elements
  ElemKind kind = ElemKind::CartanH;
  Parity parity = Parity::Even;
  std::string word;  // defining bracket expression, audit output only
};

// Finite-dimensional Lie (super)algebra presented by structure constants on a
// fixed basis.  roots[] carries the Z^n grade per basis element when known;
// operations use it to confine linear algebra to root blocks.  square[] is
// meaningful only for odd ids at p = 2.
struct StructAlgebra {
  int p = 0;
  std::vector<Parity> parity;
  std::vector<RootKey> roots;
  std::vector<std::vector<Combo>> bracket;
  std::vector<Combo> square;

  int dim() const { return int(parity.size()); }
  std::pair<int, int> sdim() const;
  // bilinear extension of the bracket table
  Combo bracket_vec(const Combo& u, const Combo& v) const;
  // (sum c_k m_k)^2 = sum c_k^2 m_k^2 + sum_{k<l} c_k c_l [m_k, m_l]
  // errors: WrongCharacteristic unless p = 2; NotOdd if any id is even
  Combo square_vec(const Combo& v) const;
};

struct Caps {
  int dim_cap = 2048;
  int height_cap = 64;
};

enum class Verdict : uint8_t { Finite, ExceededCap };

struct AlgebraBuild {
  CartanSpec spec;
  Mat bmat;  // grading completion, l x n
  int n = 0;
  int l = 0;  // corank of the Cartan matrix
  Verdict verdict = Verdict::ExceededCap;
  std::pair<int, int> sdim{0, 0};
  // ids: 0..n-1 h_i, n..n+l-1 d_j, then positives, then their mirrors
  std::vector<BasisElement> basis;
  int pos_count = 0;
  std::map<RootKey, std::pair<int, int>> mults;  // nonzero roots, both signs
  StructAlgebra alg;  // full structure table; assembled for finite verdicts
  int height_reached = 0;

  int mirror(int id) const;  // mirror of a positive/negative id
};

// Grow n_+ height by height from the Chevalley generators, quotient the null
// subspace at every height, mirror n_-, and assemble structure constants.
AlgebraBuild build(const CartanSpec& spec, const Caps& caps = {});

struct RootSystem {
  std::map<RootKey, std::pair<int, int>> mults;
  std::vector<RootKey> simple;  // positive roots not a sum of two positive roots
  bool simple_independent = true;
};

RootSystem root_system(const AlgebraBuild& b);

// Derived series with squares of odd elements included at p = 2; reported
// until the sdim repeats (the repeat is kept unless the series hits zero).
std::vector<std::pair<int, int>> derived_series(const StructAlgebra& a);
std::vector<std::pair<int, int>> derived_series(const AlgebraBuild& b);

// Basis of {z : [z, a] = 0}.
std::vector<Combo> center(const StructAlgebra& a);

struct SimpleCore {
  std::pair<int, int> sdim{0, 0};
  StructAlgebra alg;
};

// Stabilized derived algebra modulo its full center.
// errors: NotStabilized if the series needs more than 5 steps
SimpleCore simple_subquotient(const AlgebraBuild& b);

// True iff the ad-closure (plus squaring closure at p = 2) of every single
// basis element is the whole algebra.
bool is_simple(const StructAlgebra& a);

bool is_solvable(const StructAlgebra& a);

// Sub-presentation spanned by the even basis elements.
StructAlgebra even_part(const StructAlgebra& a);

struct OddHighestWeight {
  Combo vec;
  RootKey root;
  Vec weight;  // eigenvalues against h_1..h_n, d_1..d_l
};

// Odd elements annihilated by every positive even root vector.
std::vector<OddHighestWeight> odd_highest_weights(const AlgebraBuild& b);

// Square of a combination of odd basis elements via the stored tables.
// errors: WrongCharacteristic if p != 2; NotOdd
Combo square(const AlgebraBuild& b, const Combo& v);

// Build report serialized as JSON text; audit adds defining words.
std::string build_report(const AlgebraBuild& b, bool audit = false);

}  // namespace cf
