#include "cartanforge/reflections.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace cf {

namespace {

// Residue 0..p-1 when s is a prime-field constant (possibly sitting inside
// GF(p^k) or GF(p)(a)), nullopt otherwise.
std::optional<int> prime_residue(const Scalar& s) {
  for (int v = 0; v < s.p(); ++v)
    if (s == Scalar::of_int(s.p(), v)) return v;
  return std::nullopt;
}

struct Coefficients {
  std::vector<int> B;
  // exact[j]: B[j] is the congruence value itself, not the p-1 stand-in for a
  // value outside the prime field. Failed transport reports
  // NonIntegerCoefficient for exact entries and UndefinedReflection otherwise.
  std::vector<char> exact;
};

Coefficients coefficients(const CartanSpec& s, int k) {
  if (k < 0 || k >= s.n) raise(Err::InvalidParams, "reflection node out of range");
  Coefficients out;
  out.B.assign(size_t(s.n), 0);
  out.exact.assign(size_t(s.n), 1);
  bool even = s.parity[size_t(k)] == Parity::Even;
  for (int j = 0; j < s.n; ++j) {
    if (j == k) continue;
    if (!s.at(k, k).is_zero()) {
      if (s.p == 2 && even && s.at(j, k) == s.at(k, k)) {
        out.B[size_t(j)] = 2;
        continue;
      }
      // B is the length of the e_k-string through e_j.  The pairing
      // [f_k, (ad e_k)^m e_j] = c_m (ad e_k)^{m-1} e_j has c_m =
      // -m(2A_kj + (m-1)A_kk)/2 for even k but alternates c_2t = t A_kk,
      // c_2t+1 = A_kj + t A_kk for odd k, so the string ends at the residue
      // lift of -2A_kj/A_kk for even k and at twice the lift of -A_kj/A_kk
      // for odd k; without a prime-field residue it runs to p-1 resp. 2p-1.
      Scalar c = -(s.at(k, j) / s.at(k, k));
      if (std::optional<int> r = prime_residue(even ? c + c : c)) {
        out.B[size_t(j)] = even ? *r : 2 * *r;
      } else {
        out.B[size_t(j)] = even ? s.p - 1 : 2 * s.p - 1;
        out.exact[size_t(j)] = 0;
      }
    } else if (!s.at(k, j).is_zero()) {
      out.B[size_t(j)] = even ? s.p - 1 : 1;
      out.exact[size_t(j)] = char(!even);
    }
  }
  return out;
}

[[noreturn]] void transport_failed(bool exact, const std::string& what) {
  if (exact)
    raise(Err::NonIntegerCoefficient, what + "; the case-table congruence value is not "
                                             "realized in the algebra");
  raise(Err::UndefinedReflection, what + "; the minimal lift p-1 of a coefficient outside "
                                         "Z/pZ does not exist in the algebra");
}

// Ids of the simple positive generators e_i, in node order.
std::vector<int> generator_ids(const AlgebraBuild& b) {
  std::vector<int> out(size_t(b.n), -1);
  for (const BasisElement& be : b.basis) {
    if (be.kind != ElemKind::Positive || root_height(be.root) != 1) continue;
    for (int i = 0; i < b.n; ++i)
      if (be.root[size_t(i)] == 1) out[size_t(i)] = be.id;
  }
  for (int i = 0; i < b.n; ++i) CF_CHECK(out[size_t(i)] >= 0, "missing simple generator");
  return out;
}

// Coroot of sigma_i + B sigma_k read off the build: h = [x, y] with
// x = (ad e_k)^B e_i and y = (ad f_k)^B f_i, as a vector over h_0..h_{n-1}.
Vec transported_coroot(const AlgebraBuild& b, int k, int i, int B, bool exact) {
  std::vector<int> gens = generator_ids(b);
  Combo ek{{gens[size_t(k)], Scalar::one(b.spec.p)}};
  Combo fk{{b.mirror(gens[size_t(k)]), Scalar::one(b.spec.p)}};
  Combo x{{gens[size_t(i)], Scalar::one(b.spec.p)}};
  Combo y{{b.mirror(gens[size_t(i)]), Scalar::one(b.spec.p)}};
  for (int t = 0; t < B; ++t) {
    x = b.alg.bracket_vec(ek, x);
    y = b.alg.bracket_vec(fk, y);
    if (x.empty() || y.empty()) transport_failed(exact, "transported generator vanished");
  }
  Combo h = b.alg.bracket_vec(x, y);
  if (h.empty()) transport_failed(exact, "transported coroot vanished");
  Vec out(size_t(b.n), Scalar::zero(b.spec.p));
  for (const auto& [id, c] : h) {
    CF_CHECK(id < b.n, "coroot escaped the Cartan block");
    out[size_t(id)] = c;
  }
  return out;
}

// Coroot coefficients without a build, up to a row scale the normalization
// absorbs. Exact for B <= 2: these are relation-level identities, independent
// of the null-vector quotient.
std::optional<Vec> closed_coroot(const CartanSpec& s, int k, int i, int B, bool exact) {
  Vec out(size_t(s.n), Scalar::zero(s.p));
  if (i == k) {
    out[size_t(k)] = -Scalar::one(s.p);
    return out;
  }
  if (B == 0) {
    out[size_t(i)] = Scalar::one(s.p);
    return out;
  }
  if (B == 1) {
    out[size_t(i)] = s.at(k, i);
    out[size_t(k)] = s.at(i, k);
    return out;
  }
  if (B == 2) {
    // [f_k, (ad e_k)^2 e_i] = (A_kk + 2 A_ki) [e_k, e_i] for even k but
    // A_kk [e_k, e_i] for odd k, so only the even case can vanish.
    Scalar two = Scalar::of_int(s.p, 2);
    if (s.parity[size_t(k)] == Parity::Even && (s.at(k, k) + two * s.at(k, i)).is_zero())
      transport_failed(exact, "double bracket with the reflection node vanishes");
    out[size_t(i)] = s.at(k, i);
    out[size_t(k)] = two * s.at(i, k);
    return out;
  }
  return std::nullopt;
}

Vec rank2_coroot(const CartanSpec& s, int k, int i, int B, bool exact) {
  CartanSpec sub;
  sub.p = s.p;
  sub.n = 2;
  sub.entries = Mat(2, 2);
  int idx[2] = {k, i};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) sub.entries.at(r, c) = s.at(idx[r], idx[c]);
  sub.parity = {s.parity[size_t(k)], s.parity[size_t(i)]};
  sub.diag = {s.diag[size_t(k)], s.diag[size_t(i)]};
  sub.parametric = s.parametric;
  AlgebraBuild b = build(sub);
  if (b.verdict != Verdict::Finite)
    raise(Err::UndefinedReflection, "coroot transport needs a finite build and the node pair "
                                    "generates past the caps");
  Vec local = transported_coroot(b, 0, 1, B, exact);
  Vec out(size_t(s.n), Scalar::zero(s.p));
  out[size_t(k)] = local[0];
  out[size_t(i)] = local[1];
  return out;
}

// New matrix entries A'_ij = sigma'_j(h'_i) with sigma'_k = -sigma_k and
// sigma'_j = sigma_j + B[j] sigma_k, rows re-scaled to the mark convention.
CartanSpec assemble(const CartanSpec& s, int k, const std::vector<int>& B,
                    const std::vector<Vec>& coroots) {
  Mat raw(s.n, s.n);
  std::vector<Parity> par(size_t(s.n));
  for (int j = 0; j < s.n; ++j) {
    int pj = int(s.parity[size_t(j)]);
    if (j != k) pj = (pj + B[size_t(j)] * int(s.parity[size_t(k)])) & 1;
    par[size_t(j)] = pj ? Parity::Odd : Parity::Even;
  }
  for (int j = 0; j < s.n; ++j) {
    Scalar bj = Scalar::of_int(s.p, j == k ? 0 : B[size_t(j)]);
    for (int m = 0; m < s.n; ++m) {
      Scalar pairing = j == k ? -s.at(m, k) : s.at(m, j) + bj * s.at(m, k);
      if (pairing.is_zero()) continue;
      for (int i = 0; i < s.n; ++i) {
        if (coroots[size_t(i)][size_t(m)].is_zero()) continue;
        raw.at(i, j) += coroots[size_t(i)][size_t(m)] * pairing;
      }
    }
  }
  return normalize(raw, par, s.p);
}

}  // namespace

std::vector<int> reflection_coefficients(const CartanSpec& s, int k) {
  return coefficients(s, k).B;
}

CartanSpec reflect(const CartanSpec& s, int k) {
  Coefficients co = coefficients(s, k);
  std::vector<Vec> coroots(size_t(s.n));
  std::vector<int> hard;
  for (int i = 0; i < s.n; ++i) {
    std::optional<Vec> v =
        closed_coroot(s, k, i, i == k ? 0 : co.B[size_t(i)], co.exact[size_t(i)] != 0);
    if (v)
      coroots[size_t(i)] = std::move(*v);
    else
      hard.push_back(i);
  }
  if (!hard.empty()) {
    AlgebraBuild b = build(s);
    for (int i : hard) {
      bool exact = co.exact[size_t(i)] != 0;
      if (b.verdict == Verdict::Finite)
        coroots[size_t(i)] = transported_coroot(b, k, i, co.B[size_t(i)], exact);
      else
        coroots[size_t(i)] = rank2_coroot(s, k, i, co.B[size_t(i)], exact);
    }
  }
  return assemble(s, k, co.B, coroots);
}

CartanSpec reflect(const CartanSpec& s, int k, const AlgebraBuild& b) {
  CF_CHECK(b.verdict == Verdict::Finite, "reflect needs a finite build");
  CF_CHECK(b.spec == s, "build does not belong to this spec");
  Coefficients co = coefficients(s, k);
  std::vector<Vec> coroots(size_t(s.n));
  for (int i = 0; i < s.n; ++i) {
    if (i == k || co.B[size_t(i)] == 0)
      coroots[size_t(i)] = *closed_coroot(s, k, i, 0, true);
    else
      coroots[size_t(i)] =
          transported_coroot(b, k, i, co.B[size_t(i)], co.exact[size_t(i)] != 0);
  }
  return assemble(s, k, co.B, coroots);
}

bool reflection_defined(const CartanSpec& s, int k) {
  try {
    reflect(s, k);
    return true;
  } catch (const Error& e) {
    if (e.code() == Err::UndefinedReflection || e.code() == Err::NonIntegerCoefficient)
      return false;
    throw;
  }
}

ReflectionStep reflection_step(const CartanSpec& s, int k) {
  ReflectionStep st;
  st.from = s;
  st.node = k;
  st.coefficients = reflection_coefficients(s, k);
  st.to = reflect(s, k);
  return st;
}

namespace {

bool combos_equal(int p, const Combo& x, const Combo& y) {
  Combo d = x;
  combo_add(d, y, -Scalar::one(p));
  for (const auto& [id, c] : d)
    if (!c.is_zero()) return false;
  return true;
}

Combo scaled(const Combo& x, const Scalar& c) {
  Combo out;
  combo_add(out, x, c);
  return out;
}

}  // namespace

TransportedGenerators transport_generators(const AlgebraBuild& b, int k) {
  const CartanSpec& s = b.spec;
  CF_CHECK(b.verdict == Verdict::Finite, "generator transport needs a finite build");
  if (k < 0 || k >= s.n) raise(Err::InvalidParams, "reflection node out of range");
  if (s.parity[size_t(k)] != Parity::Odd || !s.at(k, k).is_zero())
    raise(Err::NotIsotropic, "generator transport is defined at odd zero-diagonal nodes only");

  std::vector<int> gens = generator_ids(b);
  Scalar one = Scalar::one(s.p);
  TransportedGenerators t;
  t.e.resize(size_t(s.n));
  t.f.resize(size_t(s.n));
  t.h.resize(size_t(s.n));
  Combo ek{{gens[size_t(k)], one}};
  Combo fk{{b.mirror(gens[size_t(k)]), one}};
  for (int j = 0; j < s.n; ++j) {
    Combo ej{{gens[size_t(j)], one}};
    Combo fj{{b.mirror(gens[size_t(j)]), one}};
    if (j == k) {
      t.e[size_t(j)] = fk;
      t.f[size_t(j)] = ek;
    } else if (!s.at(k, j).is_zero()) {
      t.e[size_t(j)] = b.alg.bracket_vec(ek, ej);
      t.f[size_t(j)] = b.alg.bracket_vec(fk, fj);
      CF_CHECK(!t.e[size_t(j)].empty() && !t.f[size_t(j)].empty(),
               "isotropic transport vanished");
    } else {
      t.e[size_t(j)] = ej;
      t.f[size_t(j)] = fj;
    }
    t.h[size_t(j)] = b.alg.bracket_vec(t.e[size_t(j)], t.f[size_t(j)]);
    CF_CHECK(!t.h[size_t(j)].empty(), "transported coroot vanished");
  }

  // The set must satisfy the contragredient relations of the reflected
  // matrix: [e_i, f_j] = delta_ij h_i and h_i acting with eigenvalue A'_ij.
  std::vector<int> B = reflection_coefficients(s, k);
  std::vector<Vec> coroots(size_t(s.n));
  for (int i = 0; i < s.n; ++i) {
    Vec v(size_t(s.n), Scalar::zero(s.p));
    for (const auto& [id, c] : t.h[size_t(i)]) {
      CF_CHECK(id < b.n, "coroot escaped the Cartan block");
      v[size_t(id)] = c;
    }
    coroots[size_t(i)] = v;
  }
  for (int i = 0; i < s.n; ++i)
    for (int j = 0; j < s.n; ++j) {
      if (i != j)
        CF_CHECK(b.alg.bracket_vec(t.e[size_t(i)], t.f[size_t(j)]).empty(),
                 "transported generators do not pair diagonally");
      Scalar aij = Scalar::zero(s.p);
      for (int m = 0; m < s.n; ++m) {
        Scalar pairing =
            j == k ? -s.at(m, k)
                   : s.at(m, j) + Scalar::of_int(s.p, B[size_t(j)]) * s.at(m, k);
        aij += coroots[size_t(i)][size_t(m)] * pairing;
      }
      CF_CHECK(combos_equal(s.p, b.alg.bracket_vec(t.h[size_t(i)], t.e[size_t(j)]),
                            scaled(t.e[size_t(j)], aij)),
               "transported Cartan action has the wrong eigenvalue");
      CF_CHECK(combos_equal(s.p, b.alg.bracket_vec(t.h[size_t(i)], t.f[size_t(j)]),
                            scaled(t.f[size_t(j)], -aij)),
               "transported Cartan action has the wrong eigenvalue");
    }
  return t;
}

Orbit enumerate_orbit(const CartanSpec& s, const Caps& caps, int member_cap) {
  Orbit orb;
  orb.members.push_back(canonical_form(s));
  orb.start = 0;
  std::map<std::string, int> seen{{spec_to_json(orb.members[0]), 0}};
  std::pair<int, int> sdim0{0, 0};
  for (int at = 0; at < int(orb.members.size()); ++at) {
    AlgebraBuild b = build(orb.members[size_t(at)], caps);
    if (b.verdict != Verdict::Finite)
      raise(Err::OrbitCapExceeded, "orbit member exceeded the build caps");
    if (at == 0)
      sdim0 = b.sdim;
    else
      CF_CHECK(b.sdim == sdim0, "orbit member changed superdimension");
    for (int k = 0; k < s.n; ++k) {
      CartanSpec to;
      try {
        to = reflect(orb.members[size_t(at)], k, b);
      } catch (const Error& e) {
        if (e.code() == Err::UndefinedReflection || e.code() == Err::NonIntegerCoefficient)
          continue;
        throw;
      }
      CartanSpec tc = canonical_form(to);
      std::string key = spec_to_json(tc);
      auto [it, fresh] = seen.emplace(key, int(orb.members.size()));
      if (fresh) {
        orb.members.push_back(tc);
        if (int(orb.members.size()) > member_cap)
          raise(Err::OrbitCapExceeded, "orbit exceeded the member cap");
      }
      orb.edges.push_back({at, k, it->second});
    }
  }
  return orb;
}

std::string orbit_to_json(const Orbit& o) {
  nlohmann::json j;
  nlohmann::json members = nlohmann::json::array();
  for (const CartanSpec& m : o.members) members.push_back(nlohmann::json::parse(spec_to_json(m)));
  j["members"] = members;
  nlohmann::json edges = nlohmann::json::array();
  for (const Orbit::Edge& e : o.edges)
    edges.push_back({{"from", e.from}, {"node", e.node}, {"to", e.to}});
  j["edges"] = edges;
  j["start"] = o.start;
  return j.dump();
}

}  // namespace cf
