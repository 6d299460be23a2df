#pragma once

#include <string>
#include <vector>

#include "cartanforge/builder.hpp"
#include "cartanforge/cartan.hpp"

namespace cf {

// Root-lattice coefficients of the reflection in node k: the new simple
// system is sigma_k' = -sigma_k and sigma_j' = sigma_j + B[j] sigma_k for
// j != k (B[k] = 0 by convention).  B[j] is the length of the e_k-string
// through e_j: the residue lift of -2 A_kj / A_kk (even k) or twice the lift
// of -A_kj / A_kk (odd k) when that ratio is a prime-field constant, p - 1
// resp. 2p - 1 when it is not, 1 / p - 1 on zero-diagonal odd/even rows per
// neighbor, and 2 in the special case p = 2, A_jk = A_kk != 0.
// errors: InvalidParams (k out of range)
std::vector<int> reflection_coefficients(const CartanSpec& s, int k);

// Reflection of the Cartan matrix in node k.  The new matrix is read off
// from coroots of the new simple roots: closed forms cover coefficients
// 0..2; larger ones transport Chevalley generators through a build of s
// (or of the k,j submatrix when s itself exceeds caps) and the result is
// re-normalized.  Node order is preserved.
// errors: UndefinedReflection (the p - 1 stand-in for a coefficient outside
//         the prime field has no realization: its transport vanishes, or no
//         finite build is reachable); NonIntegerCoefficient (same failure for
//         an exact case-table coefficient; reported, never silently lifted)
CartanSpec reflect(const CartanSpec& s, int k);

// Same, but every nonzero coefficient is transported inside the given
// finite build of s.  This is the authoritative path; the closed forms above
// are checked against it in the test suite.
CartanSpec reflect(const CartanSpec& s, int k, const AlgebraBuild& b);

// True when reflect(s, k) succeeds.  May build s internally.
bool reflection_defined(const CartanSpec& s, int k);

struct ReflectionStep {
  CartanSpec from;
  int node = 0;
  CartanSpec to;
  std::vector<int> coefficients;
};

ReflectionStep reflection_step(const CartanSpec& s, int k);

// Chevalley generators of the reflected presentation, expressed inside b:
// e[k] = old f_k, f[k] = old e_k, e[j] = [e_k, e_j] for neighbors j, and
// h[i] = [e[i], f[i]].  Defined for odd isotropic k only; the returned set
// is verified to satisfy the contragredient relations for reflect(s, k, b).
// errors: NotIsotropic
struct TransportedGenerators {
  std::vector<Combo> e, f, h;
};
TransportedGenerators transport_generators(const AlgebraBuild& b, int k);

// Connected set of pairwise-inequivalent Cartan matrices of one algebra:
// BFS closure of the start spec under all defined reflections, deduplicated
// by canonical_form.  members[start] is the canonicalized input; every edge
// (from, node, to) records reflect(members[from], node) ~ members[to].
struct Orbit {
  struct Edge {
    int from = 0;
    int node = 0;
    int to = 0;
  };
  std::vector<CartanSpec> members;
  std::vector<Edge> edges;
  int start = 0;
};

// Every member is built and must be finite with the same superdimension.
// errors: OrbitCapExceeded (more than member_cap members, or a member build
//         exceeded caps)
Orbit enumerate_orbit(const CartanSpec& s, const Caps& caps = {}, int member_cap = 1000);

// {"members":[...],"edges":[{"from":0,"node":1,"to":2},...],"start":0}
std::string orbit_to_json(const Orbit& o);

}  // namespace cf
