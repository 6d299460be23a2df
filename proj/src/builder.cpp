#include "cartanforge/builder.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>
#include <utility>

namespace cf {

int root_height(const RootKey& r) {
  int h = 0;
  for (int c : r) h += c;
  return h;
}

RootKey root_add(const RootKey& a, const RootKey& b) {
  CF_CHECK(a.size() == b.size(), "root length mismatch");
  RootKey out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
  return out;
}

RootKey root_neg(const RootKey& a) {
  RootKey out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = -a[i];
  return out;
}

void combo_add(Combo& dst, int id, const Scalar& c) {
  if (c.is_zero()) return;
  auto it = dst.find(id);
  if (it == dst.end()) {
    dst.emplace(id, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) dst.erase(it);
}

void combo_add(Combo& dst, const Combo& src, const Scalar& c) {
  if (c.is_zero()) return;
  for (const auto& [id, v] : src) combo_add(dst, id, v * c);
}

std::pair<int, int> StructAlgebra::sdim() const {
  int ev = 0, od = 0;
  for (Parity q : parity) (q == Parity::Even ? ev : od)++;
  return {ev, od};
}

Combo StructAlgebra::bracket_vec(const Combo& u, const Combo& v) const {
  Combo out;
  for (const auto& [x, cx] : u)
    for (const auto& [y, cy] : v) combo_add(out, bracket[size_t(x)][size_t(y)], cx * cy);
  return out;
}

Combo StructAlgebra::square_vec(const Combo& v) const {
  if (p != 2) raise(Err::WrongCharacteristic, "squaring needs p = 2");
  Combo out;
  for (const auto& [x, cx] : v) {
    if (parity[size_t(x)] != Parity::Odd) raise(Err::NotOdd, "square of an even element");
    combo_add(out, square[size_t(x)], cx * cx);
  }
  for (auto it = v.begin(); it != v.end(); ++it)
    for (auto jt = std::next(it); jt != v.end(); ++jt)
      combo_add(out, bracket[size_t(it->first)][size_t(jt->first)], it->second * jt->second);
  return out;
}

int AlgebraBuild::mirror(int id) const {
  int base = n + l;
  if (id < base) return id;
  if (id < base + pos_count) return id + pos_count;
  return id - pos_count;
}

namespace {

// ---------------------------------------------------------------------------
// positive-side growth
// ---------------------------------------------------------------------------

struct Prov {
  enum Kind { Gen, Brk, Sq } kind = Gen;
  int i = -1;    // generator index for Gen/Brk
  int arg = -1;  // global id of the inner factor for Brk/Sq
};

struct Space {
  RootKey root;
  int height = 0;
  Parity par = Parity::Even;
  std::vector<int> ids;        // global ids, ascending
  std::vector<Mat> lower;      // per j: dim x dim(V_{root-e_j}); unset for height 1
  std::vector<Mat> raise;      // per i: dim x dim(V_{root+e_i}); filled later
  Mat sq;                      // p = 2, odd par: dim x dim(V_{2 root})
  int dim() const { return int(ids.size()); }
};

struct Grower {
  const CartanSpec& S;
  int p, n, base;
  Mat B;
  int l;
  std::vector<Space> spaces;
  std::map<RootKey, int> index;
  std::vector<BasisElement> pos;              // global id = base + position
  std::vector<Prov> prov;                     // parallel to pos
  std::vector<std::pair<int, int>> loc;       // id-base -> (space, local)
  std::map<std::pair<int, int>, Combo> ppmemo;

  explicit Grower(const CartanSpec& s, const Mat& bmat)
      : S(s), p(s.p), n(s.n), base(s.n + bmat.rows()), B(bmat), l(bmat.rows()) {}

  Scalar sc(int v) const { return Scalar::of_int(p, v); }
  Scalar sigma(int k) const { return sc(S.parity[size_t(k)] == Parity::Odd ? 1 : -1); }
  bool odd(int k) const { return S.parity[size_t(k)] == Parity::Odd; }
  Scalar sgn_pair(int i, int j) const { return sc(odd(i) && odd(j) ? -1 : 1); }

  Scalar arow(int i, const RootKey& r) const {
    Scalar acc = sc(0);
    for (int m = 0; m < n; ++m)
      if (r[size_t(m)] != 0) acc = acc + S.at(i, m) * sc(r[size_t(m)]);
    return acc;
  }
  Scalar brow(int k, const RootKey& r) const {
    Scalar acc = sc(0);
    for (int m = 0; m < n; ++m)
      if (r[size_t(m)] != 0) acc = acc + B.at(k, m) * sc(r[size_t(m)]);
    return acc;
  }

  Space* at(const RootKey& r) {
    auto it = index.find(r);
    return it == index.end() ? nullptr : &spaces[size_t(it->second)];
  }

  Parity root_parity(const RootKey& r) const {
    int s = 0;
    for (int m = 0; m < n; ++m)
      if (odd(m)) s += r[size_t(m)];
    return (s % 2) ? Parity::Odd : Parity::Even;
  }

  void seed_generators() {
    for (int k = 0; k < n; ++k) {
      Space sp;
      sp.root = RootKey(size_t(n), 0);
      sp.root[size_t(k)] = 1;
      sp.height = 1;
      sp.par = S.parity[size_t(k)];
      sp.ids = {base + k};
      sp.lower.resize(size_t(n));
      sp.raise.resize(size_t(n));
      index[sp.root] = int(spaces.size());
      spaces.push_back(std::move(sp));
      BasisElement be;
      be.id = base + k;
      be.root = spaces.back().root;
      be.kind = ElemKind::Positive;
      be.parity = S.parity[size_t(k)];
      be.word = "e" + std::to_string(k + 1);
      pos.push_back(be);
      prov.push_back({Prov::Gen, k, -1});
      loc.emplace_back(int(spaces.size()) - 1, 0);
    }
  }

  // [e_i, u] for a positive basis combo; empty target means zero
  Combo raise_combo(int i, const Combo& u) {
    Combo out;
    for (const auto& [id, c] : u) {
      auto [si, li] = loc[size_t(id - base)];
      const Mat& R = spaces[size_t(si)].raise[size_t(i)];
      if (R.cols() == 0) continue;
      RootKey tgt = spaces[size_t(si)].root;
      tgt[size_t(i)] += 1;
      Space* T = at(tgt);
      CF_CHECK(T != nullptr, "raise table points at a missing space");
      for (int t = 0; t < R.cols(); ++t) combo_add(out, T->ids[size_t(t)], R.at(li, t) * c);
    }
    return out;
  }

  // [u, v] for positive basis elements, as a combo over positive ids
  Combo crosspos(int u, int v) {
    auto key = std::make_pair(u, v);
    auto hit = ppmemo.find(key);
    if (hit != ppmemo.end()) return hit->second;
    const Prov& pu = prov[size_t(u - base)];
    Combo out;
    if (pu.kind == Prov::Gen) {
      Combo single;
      single.emplace(v, sc(1));
      out = raise_combo(pu.i, single);
    } else if (pu.kind == Prov::Brk) {
      // [[e_i,w],v] = [e_i,[w,v]] - (-1)^{p_i p_w} [w,[e_i,v]]
      int w = pu.arg;
      Combo t1 = crosspos(w, v);
      out = raise_combo(pu.i, t1);
      Combo single;
      single.emplace(v, sc(1));
      Combo t2 = raise_combo(pu.i, single);
      Parity pw = pos[size_t(w - base)].parity;
      Scalar coeff = sc(odd(pu.i) && pw == Parity::Odd ? 1 : -1);
      for (const auto& [y, c] : t2) combo_add(out, crosspos(w, y), coeff * c);
    } else {
      // [c^2, v] = [c, [c, v]]
      int c = pu.arg;
      Combo t = crosspos(c, v);
      for (const auto& [y, cf] : t) combo_add(out, crosspos(c, y), cf);
    }
    ppmemo.emplace(key, out);
    return out;
  }

  struct Cand {
    bool issq = false;
    int i = -1;       // generator for bracket candidates
    int src = -1;     // space index of u (bracket) or b (square)
    int local = -1;   // index inside the source space
  };

  // grow one root space; returns its new dimension
  int grow_root(const RootKey& alpha) {
    int m = root_height(alpha);
    std::vector<Cand> cands;
    for (int i = 0; i < n; ++i) {
      if (alpha[size_t(i)] < 1) continue;
      RootKey beta = alpha;
      beta[size_t(i)] -= 1;
      Space* src = at(beta);
      if (!src) continue;
      for (int u = 0; u < src->dim(); ++u)
        cands.push_back({false, i, index[beta], u});
    }
    Space* half = nullptr;
    if (p == 2 && m % 2 == 0) {
      RootKey g(alpha);
      bool even_coords = true;
      for (auto& c : g) {
        if (c % 2) even_coords = false;
        c /= 2;
      }
      if (even_coords) {
        half = at(g);
        if (half && half->par == Parity::Odd)
          for (int b = 0; b < half->dim(); ++b) cands.push_back({true, -1, index[g], b});
        else
          half = nullptr;
      }
    }
    if (cands.empty()) return 0;

    // L-image layout: one block per j with a live space at alpha - e_j
    std::vector<int> offs(size_t(n), -1);
    std::vector<int> tgt(size_t(n), -1);  // space indices, stable under growth
    int ltot = 0;
    for (int j = 0; j < n; ++j) {
      if (alpha[size_t(j)] < 1) continue;
      RootKey r = alpha;
      r[size_t(j)] -= 1;
      auto it = index.find(r);
      if (it == index.end()) continue;
      offs[size_t(j)] = ltot;
      tgt[size_t(j)] = it->second;
      ltot += spaces[size_t(it->second)].dim();
    }

    EchelonSpan span(ltot);
    std::vector<Vec> accepted_l;          // L-image of each accepted candidate
    std::vector<int> verdicts;            // accepted index or -1
    std::vector<Vec> exprs;               // for dependents
    std::vector<int> accepted_cand;       // candidate index per accepted

    for (size_t ci = 0; ci < cands.size(); ++ci) {
      const Cand& cd = cands[ci];
      Vec L(static_cast<size_t>(ltot));
      Space& src = spaces[size_t(cd.src)];
      if (!cd.issq) {
        RootKey beta = src.root;
        int i = cd.i;
        for (int j = 0; j < n; ++j) {
          if (offs[size_t(j)] < 0) continue;
          int off = offs[size_t(j)];
          if (i == j) {
            // delta_{ij} sigma_i (A beta)_i u
            Scalar c = sigma(i) * arow(i, beta);
            L[size_t(off + cd.local)] = L[size_t(off + cd.local)] + c;
          }
          if (src.height == 1) {
            int k = cd.src;  // space index == generator index for height 1
            CF_CHECK(spaces[size_t(k)].root == src.root, "generator space misindexed");
            if (j == k) {
              // [e_i, [f_k, e_k]] = sigma_k [e_i, h_k] = -sigma_k A_{ki} e_i
              Scalar c = sgn_pair(i, j) * sigma(k) * (sc(-1) * S.at(k, i));
              // target space is V_{e_i}, one-dimensional
              L[size_t(off)] = L[size_t(off)] + c;
            }
            continue;
          }
          const Mat& Lw = src.lower[size_t(j)];
          if (Lw.cols() == 0) continue;
          RootKey down = beta;
          down[size_t(j)] -= 1;
          Space* D = at(down);
          CF_CHECK(D != nullptr, "lower table points at a missing space");
          const Mat& R = D->raise[size_t(i)];
          if (R.cols() == 0) continue;
          Scalar g = sgn_pair(i, j);
          for (int w = 0; w < Lw.cols(); ++w) {
            const Scalar& cw = Lw.at(cd.local, w);
            if (cw.is_zero()) continue;
            for (int t = 0; t < R.cols(); ++t) {
              Scalar add = g * cw * R.at(w, t);
              L[size_t(off + t)] = L[size_t(off + t)] + add;
            }
          }
        }
      } else {
        // square candidate: L_j(b^2) = [[f_j, b], b]
        for (int j = 0; j < n; ++j) {
          if (offs[size_t(j)] < 0) continue;
          int off = offs[size_t(j)];
          if (src.height == 1) {
            int k = cd.src;
            if (j == k) {
              Scalar c = sigma(k) * S.at(k, k);
              L[size_t(off)] = L[size_t(off)] + c;
            }
            continue;
          }
          const Mat& Lw = src.lower[size_t(j)];
          if (Lw.cols() == 0) continue;
          RootKey down = src.root;
          down[size_t(j)] -= 1;
          Space* D = at(down);
          CF_CHECK(D != nullptr, "lower table points at a missing space");
          int bid = src.ids[size_t(cd.local)];
          std::vector<int> dids = D->ids;
          for (int w = 0; w < int(dids.size()); ++w) {
            const Scalar& cw = Lw.at(cd.local, w);
            if (cw.is_zero()) continue;
            Combo cb = crosspos(dids[size_t(w)], bid);
            for (const auto& [rid, rc] : cb) {
              auto [rs, rl] = loc[size_t(rid - base)];
              CF_CHECK(rs == tgt[size_t(j)], "square image escaped its block");
              L[size_t(off + rl)] = L[size_t(off + rl)] + cw * rc;
            }
          }
        }
      }
      Vec expr;
      int idx = span.insert(L, &expr);
      verdicts.push_back(idx);
      if (idx >= 0) {
        accepted_l.push_back(L);
        accepted_cand.push_back(int(ci));
        exprs.emplace_back();
      } else {
        exprs.push_back(expr);
      }
    }

    int dim = span.size();
    int spi = -1;
    if (dim > 0) {
      Space sp;
      sp.root = alpha;
      sp.height = m;
      sp.par = root_parity(alpha);
      sp.lower.resize(size_t(n));
      sp.raise.resize(size_t(n));
      for (int r = 0; r < dim; ++r) {
        int gid = base + int(pos.size());
        sp.ids.push_back(gid);
        const Cand& cd = cands[size_t(accepted_cand[size_t(r)])];
        Space& src = spaces[size_t(cd.src)];
        BasisElement be;
        be.id = gid;
        be.root = alpha;
        be.kind = ElemKind::Positive;
        be.parity = sp.par;
        if (!cd.issq) {
          be.word = "[e" + std::to_string(cd.i + 1) + "," +
                    pos[size_t(src.ids[size_t(cd.local)] - base)].word + "]";
          prov.push_back({Prov::Brk, cd.i, src.ids[size_t(cd.local)]});
        } else {
          be.word = "sq(" + pos[size_t(src.ids[size_t(cd.local)] - base)].word + ")";
          prov.push_back({Prov::Sq, -1, src.ids[size_t(cd.local)]});
        }
        pos.push_back(be);
        loc.emplace_back(-1, r);  // space index patched below
      }
      for (int j = 0; j < n; ++j) {
        if (offs[size_t(j)] < 0) continue;
        int td = spaces[size_t(tgt[size_t(j)])].dim();
        Mat lw(dim, td);
        for (int r = 0; r < dim; ++r)
          for (int t = 0; t < td; ++t)
            lw.at(r, t) = accepted_l[size_t(r)][size_t(offs[size_t(j)] + t)];
        sp.lower[size_t(j)] = std::move(lw);
      }
      index[alpha] = int(spaces.size());
      spi = int(spaces.size());
      spaces.push_back(std::move(sp));
      for (int r = 0; r < dim; ++r)
        loc[size_t(spaces[size_t(spi)].ids[size_t(r)] - base)] = {spi, r};
    }

    // record raise/sq rows for every candidate
    for (size_t ci = 0; ci < cands.size(); ++ci) {
      const Cand& cd = cands[ci];
      Space& src = spaces[size_t(cd.src)];
      Mat& table = cd.issq ? src.sq : src.raise[size_t(cd.i)];
      if (table.rows() != src.dim() || table.cols() != dim) table = Mat(src.dim(), dim);
      int v = verdicts[ci];
      if (v >= 0) {
        table.at(cd.local, v) = sc(1);
      } else {
        const Vec& e = exprs[ci];
        for (size_t k = 0; k < e.size(); ++k) table.at(cd.local, int(k)) = e[k];
      }
    }
    return dim;
  }
};

// ---------------------------------------------------------------------------
// structure-table assembly
// ---------------------------------------------------------------------------

struct Assembler {
  Grower& G;
  AlgebraBuild& b;
  int base, P;
  std::map<std::pair<int, int>, Combo> pnmemo;

  Assembler(Grower& g, AlgebraBuild& bb) : G(g), b(bb), base(g.base), P(int(g.pos.size())) {}

  bool is_h(int id) const { return id < G.n; }
  bool is_d(int id) const { return id >= G.n && id < base; }
  bool is_pos(int id) const { return id >= base && id < base + P; }
  bool is_neg(int id) const { return id >= base + P; }
  int posof(int id) const { return id - P; }  // negative -> positive partner
  Parity par(int id) const { return b.basis[size_t(id)].parity; }
  const RootKey& root(int id) const { return b.basis[size_t(id)].root; }
  Scalar sc(int v) const { return G.sc(v); }

  Combo mirror_combo(const Combo& c) const {
    Combo out;
    for (const auto& [id, v] : c) out.emplace(id + P, v);
    return out;
  }

  // [f_j, u] for positive u; lands in positives or the Cartan block
  Combo act_f_pos(int j, int u) {
    auto [si, li] = G.loc[size_t(u - base)];
    const Space& sp = G.spaces[size_t(si)];
    Combo out;
    if (sp.height == 1) {
      if (si == j) out.emplace(j, G.sigma(j));  // sigma_j h_j
      return out;
    }
    const Mat& L = sp.lower[size_t(j)];
    if (L.cols() == 0) return out;
    RootKey down = sp.root;
    down[size_t(j)] -= 1;
    Space* D = G.at(down);
    for (int t = 0; t < L.cols(); ++t) combo_add(out, D->ids[size_t(t)], L.at(li, t));
    return out;
  }

  // [e_i, vbar] for a mirrored element vbar
  Combo act_e_neg(int i, int vb) {
    int v = posof(vb);
    auto [si, li] = G.loc[size_t(v - base)];
    const Space& sp = G.spaces[size_t(si)];
    Combo out;
    if (sp.height == 1) {
      if (si == i) out.emplace(i, sc(1));  // [e_i, f_i] = h_i
      return out;
    }
    const Mat& L = sp.lower[size_t(i)];
    if (L.cols() == 0) return out;
    RootKey down = sp.root;
    down[size_t(i)] -= 1;
    Space* D = G.at(down);
    Scalar eps = sc(G.odd(i) ? -1 : 1);
    for (int t = 0; t < L.cols(); ++t) combo_add(out, D->ids[size_t(t)] + P, eps * L.at(li, t));
    return out;
  }

  // [u, y] for positive u and arbitrary basis id y
  Combo cross_any(int u, int y) {
    if (is_h(y)) {
      Combo out;
      out.emplace(u, sc(-1) * G.arow(y, root(u)));
      return out;
    }
    if (is_d(y)) {
      Combo out;
      out.emplace(u, sc(-1) * G.brow(y - G.n, root(u)));
      return out;
    }
    if (is_pos(y)) return G.crosspos(u, y);
    return crossmix(u, y);
  }

  Combo act_e_combo(int i, const Combo& x) {
    Combo out;
    for (const auto& [y, c] : x) {
      if (is_h(y)) {
        combo_add(out, base + i, sc(-1) * G.S.at(y, i) * c);
      } else if (is_d(y)) {
        combo_add(out, base + i, sc(-1) * G.B.at(y - G.n, i) * c);
      } else if (is_pos(y)) {
        Combo single;
        single.emplace(y, c);
        combo_add(out, G.raise_combo(i, single), sc(1));
      } else {
        combo_add(out, act_e_neg(i, y), c);
      }
    }
    return out;
  }

  // [u, vbar], positive u against mirrored vbar
  Combo crossmix(int u, int vb) {
    auto key = std::make_pair(u, vb);
    auto hit = pnmemo.find(key);
    if (hit != pnmemo.end()) return hit->second;
    Combo out;
    const Prov& pu = G.prov[size_t(u - base)];
    int v = posof(vb);
    int vh = root_height(root(v));
    if (pu.kind == Prov::Gen) {
      out = act_e_neg(pu.i, vb);
    } else if (vh == 1) {
      // [u, f_k] = -(-1)^{p_u p_k} [f_k, u]
      int k = v - base;
      bool both = par(u) == Parity::Odd && G.odd(k);
      Combo t = act_f_pos(k, u);
      combo_add(out, t, sc(both ? 1 : -1));
    } else if (pu.kind == Prov::Brk) {
      int w = pu.arg;
      Combo t1 = crossmix(w, vb);
      out = act_e_combo(pu.i, t1);
      Combo t2 = act_e_neg(pu.i, vb);
      bool both = G.odd(pu.i) && par(w) == Parity::Odd;
      Scalar coeff = sc(both ? 1 : -1);
      for (const auto& [y, c] : t2) {
        CF_CHECK(is_neg(y), "raising a mirror left the negative side");
        combo_add(out, crossmix(w, y), coeff * c);
      }
    } else {
      int c = pu.arg;
      Combo t = crossmix(c, vb);
      for (const auto& [y, cf] : t) combo_add(out, cross_any(c, y), cf);
    }
    pnmemo.emplace(key, out);
    return out;
  }

  void run() {
    StructAlgebra& A = b.alg;
    int D = base + 2 * P;
    A.p = G.p;
    A.parity.resize(size_t(D));
    A.roots.resize(size_t(D));
    for (int i = 0; i < D; ++i) {
      A.parity[size_t(i)] = b.basis[size_t(i)].parity;
      A.roots[size_t(i)] = b.basis[size_t(i)].root;
    }
    A.bracket.assign(size_t(D), std::vector<Combo>(size_t(D)));
    A.square.assign(size_t(D), Combo{});

    // Cartan actions
    for (int c = 0; c < base; ++c) {
      for (int x = base; x < D; ++x) {
        Scalar cf = is_h(c) ? G.arow(c, root(x)) : G.brow(c - G.n, root(x));
        if (cf.is_zero()) continue;
        A.bracket[size_t(c)][size_t(x)].emplace(x, cf);
        A.bracket[size_t(x)][size_t(c)].emplace(x, sc(-1) * cf);
      }
    }

    // positive x positive, mirrored to negative x negative
    for (int u = base; u < base + P; ++u) {
      for (int v = u; v < base + P; ++v) {
        Combo c;
        if (u == v) {
          if (G.p != 2 && par(u) == Parity::Odd) c = G.crosspos(u, v);
        } else {
          c = G.crosspos(u, v);
        }
        if (c.empty()) continue;
        bool both = par(u) == Parity::Odd && par(v) == Parity::Odd;
        A.bracket[size_t(u)][size_t(v)] = c;
        A.bracket[size_t(u + P)][size_t(v + P)] = mirror_combo(c);
        if (u != v) {
          Combo rc, rcm;
          combo_add(rc, c, sc(both ? 1 : -1));
          combo_add(rcm, mirror_combo(c), sc(both ? 1 : -1));
          A.bracket[size_t(v)][size_t(u)] = rc;
          A.bracket[size_t(v + P)][size_t(u + P)] = rcm;
        }
      }
    }

    // positive x negative
    for (int u = base; u < base + P; ++u) {
      for (int vb = base + P; vb < D; ++vb) {
        Combo c = crossmix(u, vb);
        if (c.empty()) continue;
        bool both = par(u) == Parity::Odd && par(vb) == Parity::Odd;
        A.bracket[size_t(u)][size_t(vb)] = c;
        Combo rc;
        combo_add(rc, c, sc(both ? 1 : -1));
        A.bracket[size_t(vb)][size_t(u)] = rc;
      }
    }

    // squaring tables
    if (G.p == 2) {
      for (const Space& sp : G.spaces) {
        if (sp.par != Parity::Odd || sp.sq.cols() == 0) continue;
        RootKey dbl = root_add(sp.root, sp.root);
        Space* T = G.at(dbl);
        CF_CHECK(T != nullptr, "square table points at a missing space");
        for (int k = 0; k < sp.dim(); ++k) {
          Combo c;
          for (int t = 0; t < sp.sq.cols(); ++t)
            combo_add(c, T->ids[size_t(t)], sp.sq.at(k, t));
          A.square[size_t(sp.ids[size_t(k)])] = c;
          A.square[size_t(sp.ids[size_t(k)] + P)] = mirror_combo(c);
        }
      }
    }
  }
};

// ---------------------------------------------------------------------------
// graded subspace machinery
// ---------------------------------------------------------------------------

struct Blocks {
  std::vector<RootKey> keys;
  std::map<RootKey, int> idx;
  std::vector<std::vector<int>> ids;
  std::vector<std::pair<int, int>> loc;  // id -> (block, local)

  explicit Blocks(const StructAlgebra& a) {
    loc.resize(size_t(a.dim()));
    for (int i = 0; i < a.dim(); ++i) {
      const RootKey& r = a.roots[size_t(i)];
      auto it = idx.find(r);
      int bi;
      if (it == idx.end()) {
        bi = int(keys.size());
        idx.emplace(r, bi);
        keys.push_back(r);
        ids.emplace_back();
      } else {
        bi = it->second;
      }
      loc[size_t(i)] = {bi, int(ids[size_t(bi)].size())};
      ids[size_t(bi)].push_back(i);
    }
  }
  int count() const { return int(keys.size()); }
};

Mat rows_rref(std::vector<Vec> rows, int width) {
  Mat m(int(rows.size()), width);
  for (size_t r = 0; r < rows.size(); ++r)
    for (int c = 0; c < width; ++c) m.at(int(r), c) = rows[r][size_t(c)];
  rref(m);
  int nz = 0;
  for (int r = 0; r < m.rows(); ++r) {
    bool any = false;
    for (int c = 0; c < width; ++c)
      if (!m.at(r, c).is_zero()) any = true;
    if (any) ++nz;
  }
  Mat out(nz, width);
  for (int r = 0; r < nz; ++r)
    for (int c = 0; c < width; ++c) out.at(r, c) = m.at(r, c);
  return out;
}

// subspace per block, rows in RREF over block-local coordinates
using Subspace = std::vector<Mat>;

Subspace sub_full(const StructAlgebra& a, const Blocks& bl) {
  Subspace w;
  for (int b = 0; b < bl.count(); ++b) w.push_back(Mat::identity(int(bl.ids[size_t(b)].size()), a.p));
  return w;
}

int sub_dim(const Subspace& w) {
  int d = 0;
  for (const Mat& m : w) d += m.rows();
  return d;
}

Combo row_to_combo(const Blocks& bl, int block, const Mat& m, int r) {
  Combo c;
  for (int t = 0; t < m.cols(); ++t)
    if (!m.at(r, t).is_zero()) c.emplace(bl.ids[size_t(block)][size_t(t)], m.at(r, t));
  return c;
}

void bucket_combo(const Blocks& bl, const Combo& c,
                  std::map<int, std::vector<std::pair<int, Scalar>>>& out) {
  for (const auto& [id, v] : c) {
    auto [b, t] = bl.loc[size_t(id)];
    out[b].emplace_back(t, v);
  }
}

// parity-pure basis of a block row space; width = block size
std::vector<Vec> parity_rows(const StructAlgebra& a, const Blocks& bl, int block, const Mat& m,
                             Parity want) {
  std::vector<Vec> out;
  if (m.rows() == 0) return out;
  const std::vector<int>& ids = bl.ids[size_t(block)];
  bool pure = true;
  for (size_t k = 1; k < ids.size(); ++k)
    if (a.parity[size_t(ids[k])] != a.parity[size_t(ids[0])]) pure = false;
  if (pure) {
    if (a.parity[size_t(ids[0])] != want) return out;
    for (int r = 0; r < m.rows(); ++r) {
      Vec v(size_t(m.cols()));
      for (int c = 0; c < m.cols(); ++c) v[size_t(c)] = m.at(r, c);
      out.push_back(v);
    }
    return out;
  }
  // combinations of rows with zero coordinates on the other parity
  std::vector<int> other;
  for (size_t k = 0; k < ids.size(); ++k)
    if (a.parity[size_t(ids[k])] != want) other.push_back(int(k));
  Mat restr(m.rows(), int(other.size()));
  for (int r = 0; r < m.rows(); ++r)
    for (size_t c = 0; c < other.size(); ++c) restr.at(r, int(c)) = m.at(r, other[c]);
  std::vector<Vec> kern = left_kernel(restr);
  for (const Vec& coef : kern) {
    Vec v(size_t(m.cols()));
    for (int r = 0; r < m.rows(); ++r)
      for (int c = 0; c < m.cols(); ++c) v[size_t(c)] = v[size_t(c)] + coef[size_t(r)] * m.at(r, c);
    out.push_back(v);
  }
  return out;
}

std::pair<int, int> sub_sdim(const StructAlgebra& a, const Blocks& bl, const Subspace& w) {
  int ev = 0, od = 0;
  for (int b = 0; b < bl.count(); ++b) {
    ev += int(parity_rows(a, bl, b, w[size_t(b)], Parity::Even).size());
    od += int(parity_rows(a, bl, b, w[size_t(b)], Parity::Odd).size());
  }
  return {ev, od};
}

Subspace collect_subspace(const Blocks& bl, const std::vector<Combo>& gens) {
  std::map<int, std::vector<Vec>> buckets;
  for (const Combo& c : gens) {
    std::map<int, std::vector<std::pair<int, Scalar>>> parts;
    bucket_combo(bl, c, parts);
    for (auto& [b, entries] : parts) {
      Vec v(bl.ids[size_t(b)].size());
      for (auto& [t, s] : entries) v[size_t(t)] = v[size_t(t)] + s;
      buckets[b].push_back(v);
    }
  }
  Subspace out;
  for (int b = 0; b < bl.count(); ++b) {
    auto it = buckets.find(b);
    if (it == buckets.end())
      out.push_back(Mat(0, int(bl.ids[size_t(b)].size())));
    else
      out.push_back(rows_rref(it->second, int(bl.ids[size_t(b)].size())));
  }
  return out;
}

Subspace derived_step(const StructAlgebra& a, const Blocks& bl, const Subspace& w) {
  std::vector<Combo> gens;
  std::vector<std::vector<Combo>> rows(size_t(bl.count()));
  for (int b = 0; b < bl.count(); ++b)
    for (int r = 0; r < w[size_t(b)].rows(); ++r)
      rows[size_t(b)].push_back(row_to_combo(bl, b, w[size_t(b)], r));
  for (int b1 = 0; b1 < bl.count(); ++b1)
    for (int b2 = b1; b2 < bl.count(); ++b2)
      for (size_t r1 = 0; r1 < rows[size_t(b1)].size(); ++r1) {
        size_t start = (b1 == b2) ? r1 : 0;
        for (size_t r2 = start; r2 < rows[size_t(b2)].size(); ++r2) {
          Combo c = a.bracket_vec(rows[size_t(b1)][r1], rows[size_t(b2)][r2]);
          if (!c.empty()) gens.push_back(std::move(c));
        }
      }
  if (a.p == 2) {
    for (int b = 0; b < bl.count(); ++b) {
      for (const Vec& v : parity_rows(a, bl, b, w[size_t(b)], Parity::Odd)) {
        Combo c;
        for (size_t t = 0; t < v.size(); ++t)
          if (!v[t].is_zero()) c.emplace(bl.ids[size_t(b)][t], v[t]);
        Combo s = a.square_vec(c);
        if (!s.empty()) gens.push_back(std::move(s));
      }
    }
  }
  return collect_subspace(bl, gens);
}

std::vector<Combo> center_in(const StructAlgebra& a, const Blocks& bl, const Subspace& w) {
  std::vector<std::vector<Combo>> rows(size_t(bl.count()));
  for (int b = 0; b < bl.count(); ++b)
    for (int r = 0; r < w[size_t(b)].rows(); ++r)
      rows[size_t(b)].push_back(row_to_combo(bl, b, w[size_t(b)], r));
  std::vector<Combo> out;
  for (int b = 0; b < bl.count(); ++b) {
    int rb = int(rows[size_t(b)].size());
    if (rb == 0) continue;
    // constraints: sum_k lambda_k [x_k, y] = 0 for every row y of w
    std::vector<Vec> cons;
    for (int c = 0; c < bl.count(); ++c) {
      for (const Combo& y : rows[size_t(c)]) {
        std::vector<Combo> imgs;
        std::set<int> support;
        for (int k = 0; k < rb; ++k) {
          imgs.push_back(a.bracket_vec(rows[size_t(b)][size_t(k)], y));
          for (const auto& [id, v] : imgs.back()) {
            (void)v;
            support.insert(id);
          }
        }
        for (int id : support) {
          Vec row(static_cast<size_t>(rb));
          for (int k = 0; k < rb; ++k) {
            auto it = imgs[size_t(k)].find(id);
            if (it != imgs[size_t(k)].end()) row[size_t(k)] = it->second;
          }
          cons.push_back(row);
        }
      }
    }
    Mat conm(int(cons.size()), rb);
    for (size_t r = 0; r < cons.size(); ++r)
      for (int k = 0; k < rb; ++k) conm.at(int(r), k) = cons[r][size_t(k)];
    for (const Vec& lam : right_kernel(conm)) {
      Combo z;
      for (int k = 0; k < rb; ++k) combo_add(z, rows[size_t(b)][size_t(k)], lam[size_t(k)]);
      if (!z.empty()) out.push_back(z);
    }
  }
  return out;
}

std::vector<std::pair<int, int>> derived_list(const StructAlgebra& a) {
  Blocks bl(a);
  Subspace w = sub_full(a, bl);
  std::vector<std::pair<int, int>> out{a.sdim()};
  while (true) {
    if (out.back() == std::make_pair(0, 0)) break;
    Subspace nx = derived_step(a, bl, w);
    out.push_back(sub_sdim(a, bl, nx));
    if (out.back() == out[out.size() - 2]) break;
    w = std::move(nx);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------------

AlgebraBuild build(const CartanSpec& spec, const Caps& caps) {
  CF_CHECK(is_indecomposable(spec), "build requires an indecomposable matrix");
  AlgebraBuild b;
  b.spec = spec;
  b.bmat = grading_completion(spec);
  b.n = spec.n;
  b.l = b.bmat.rows();

  Grower g(spec, b.bmat);
  g.seed_generators();

  bool finite = false;
  int last_nonzero = 1;
  for (int m = 2; ; ++m) {
    if (m > caps.height_cap) break;
    std::set<RootKey> roots;
    for (const Space& sp : g.spaces) {
      if (sp.height == m - 1) {
        for (int i = 0; i < g.n; ++i) {
          RootKey r = sp.root;
          r[size_t(i)] += 1;
          roots.insert(r);
        }
      }
      if (g.p == 2 && sp.height * 2 == m && sp.par == Parity::Odd)
        roots.insert(root_add(sp.root, sp.root));
    }
    if (roots.empty()) {
      finite = true;
      break;
    }
    int grown = 0;
    for (const RootKey& r : roots) grown += g.grow_root(r);
    if (grown == 0) {
      finite = true;
      break;
    }
    last_nonzero = m;
    int total = g.base + 2 * int(g.pos.size());
    if (total > caps.dim_cap) break;
  }
  b.height_reached = last_nonzero;

  // basis: h, d, positives, mirrored negatives
  RootKey zero(size_t(g.n), 0);
  for (int i = 0; i < g.n; ++i) {
    BasisElement be;
    be.id = i;
    be.root = zero;
    be.kind = ElemKind::CartanH;
    be.parity = Parity::Even;
    be.word = "h" + std::to_string(i + 1);
    b.basis.push_back(be);
  }
  for (int k = 0; k < b.l; ++k) {
    BasisElement be;
    be.id = g.n + k;
    be.root = zero;
    be.kind = ElemKind::CartanD;
    be.parity = Parity::Even;
    be.word = "d" + std::to_string(k + 1);
    b.basis.push_back(be);
  }
  int P = int(g.pos.size());
  b.pos_count = P;
  for (const BasisElement& be : g.pos) b.basis.push_back(be);
  for (const BasisElement& be : g.pos) {
    BasisElement mb = be;
    mb.id = be.id + P;
    mb.root = root_neg(be.root);
    mb.kind = ElemKind::Negative;
    for (char& ch : mb.word)
      if (ch == 'e') ch = 'f';
    b.basis.push_back(mb);
  }

  int ev = g.base, od = 0;
  for (const Space& sp : g.spaces) {
    auto& m = b.mults[sp.root];
    auto& mn = b.mults[root_neg(sp.root)];
    if (sp.par == Parity::Even) {
      m.first += sp.dim();
      mn.first += sp.dim();
      ev += 2 * sp.dim();
    } else {
      m.second += sp.dim();
      mn.second += sp.dim();
      od += 2 * sp.dim();
    }
  }
  b.sdim = {ev, od};
  b.verdict = finite ? Verdict::Finite : Verdict::ExceededCap;

  if (finite) {
    Assembler as(g, b);
    as.run();
    // null-freeness: per root space the stacked f_j actions have full rank
    for (const Space& sp : g.spaces) {
      if (sp.height == 1) continue;
      int cols = 0;
      for (int j = 0; j < g.n; ++j) cols += sp.lower[size_t(j)].cols();
      Mat st(sp.dim(), cols);
      int off = 0;
      for (int j = 0; j < g.n; ++j) {
        const Mat& L = sp.lower[size_t(j)];
        for (int r = 0; r < sp.dim(); ++r)
          for (int c = 0; c < L.cols(); ++c) st.at(r, off + c) = L.at(r, c);
        off += L.cols();
      }
      CF_CHECK(rank(st) == sp.dim(), "null vector survived the quotient");
    }
  }
  return b;
}

RootSystem root_system(const AlgebraBuild& b) {
  CF_CHECK(b.verdict == Verdict::Finite, "operation needs a finite build");
  RootSystem rs;
  rs.mults = b.mults;
  std::set<RootKey> posroots;
  for (const auto& [r, m] : b.mults) {
    (void)m;
    bool pos = true;
    for (int c : r)
      if (c < 0) pos = false;
    if (pos) posroots.insert(r);
  }
  for (const RootKey& r : posroots) {
    bool sum = false;
    for (const RootKey& a : posroots) {
      bool le = true, proper = false;
      for (size_t k = 0; k < r.size(); ++k) {
        if (a[k] > r[k]) le = false;
        if (a[k] < r[k]) proper = true;
      }
      if (!le || !proper) continue;
      RootKey d(r.size());
      for (size_t k = 0; k < r.size(); ++k) d[k] = r[k] - a[k];
      if (root_height(d) > 0 && posroots.count(d)) {
        sum = true;
        break;
      }
    }
    if (!sum) rs.simple.push_back(r);
  }
  // integer rank via fraction-free elimination
  std::vector<std::vector<long long>> m;
  for (const RootKey& r : rs.simple) m.emplace_back(r.begin(), r.end());
  size_t rk = 0;
  for (size_t col = 0; col < size_t(b.n) && rk < m.size(); ++col) {
    size_t piv = rk;
    while (piv < m.size() && m[piv][col] == 0) ++piv;
    if (piv == m.size()) continue;
    std::swap(m[rk], m[piv]);
    for (size_t r = rk + 1; r < m.size(); ++r) {
      if (m[r][col] == 0) continue;
      long long a = m[rk][col], c = m[r][col];
      for (size_t k = 0; k < size_t(b.n); ++k) m[r][k] = m[r][k] * a - m[rk][k] * c;
    }
    ++rk;
  }
  rs.simple_independent = (rk == rs.simple.size());
  return rs;
}

std::vector<std::pair<int, int>> derived_series(const StructAlgebra& a) { return derived_list(a); }

std::vector<std::pair<int, int>> derived_series(const AlgebraBuild& b) {
  CF_CHECK(b.verdict == Verdict::Finite, "operation needs a finite build");
  return derived_list(b.alg);
}

std::vector<Combo> center(const StructAlgebra& a) {
  Blocks bl(a);
  return center_in(a, bl, sub_full(a, bl));
}

namespace {

// quotient of the span of W by the span of C (C contained in W, both graded);
// returns a standalone presentation with parity-pure basis
StructAlgebra quotient_presentation(const StructAlgebra& a, const Blocks& bl, const Subspace& w,
                                    const Subspace& c) {
  // complement representatives per block and parity
  struct QRow {
    int block;
    Vec v;  // block-local
    Parity par;
  };
  std::vector<QRow> qrows;
  for (int b = 0; b < bl.count(); ++b) {
    for (Parity q : {Parity::Even, Parity::Odd}) {
      std::vector<Vec> wr = parity_rows(a, bl, b, w[size_t(b)], q);
      std::vector<Vec> cr = parity_rows(a, bl, b, c[size_t(b)], q);
      int width = int(bl.ids[size_t(b)].size());
      std::vector<Vec> kept;
      Mat acc = rows_rref(cr, width);
      for (const Vec& v : wr) {
        // reduce v against acc; keep if independent
        std::vector<Vec> stack;
        for (int r = 0; r < acc.rows(); ++r) {
          Vec row(static_cast<size_t>(width));
          for (int t = 0; t < width; ++t) row[size_t(t)] = acc.at(r, t);
          stack.push_back(row);
        }
        stack.push_back(v);
        Mat m2 = rows_rref(stack, width);
        if (m2.rows() > acc.rows()) {
          kept.push_back(v);
          acc = m2;
        }
      }
      for (const Vec& v : kept) qrows.push_back({b, v, q});
    }
  }
  // new presentation
  StructAlgebra out;
  out.p = a.p;
  int Q = int(qrows.size());
  out.parity.resize(size_t(Q));
  out.roots.resize(size_t(Q));
  for (int i = 0; i < Q; ++i) {
    out.parity[size_t(i)] = qrows[size_t(i)].par;
    out.roots[size_t(i)] = bl.keys[size_t(qrows[size_t(i)].block)];
  }
  out.bracket.assign(size_t(Q), std::vector<Combo>(size_t(Q)));
  out.square.assign(size_t(Q), Combo{});

  // per block: stacked (C rows; Q rows) basis for coordinate extraction
  struct BlockBasis {
    std::vector<Vec> crows;
    std::vector<std::pair<int, Vec>> qrows;  // (new id, vector)
  };
  std::vector<BlockBasis> bb(size_t(bl.count()));
  for (int b = 0; b < bl.count(); ++b) {
    for (Parity q : {Parity::Even, Parity::Odd})
      for (const Vec& v : parity_rows(a, bl, b, c[size_t(b)], q)) bb[size_t(b)].crows.push_back(v);
  }
  for (int i = 0; i < Q; ++i) bb[size_t(qrows[size_t(i)].block)].qrows.emplace_back(i, qrows[size_t(i)].v);

  auto project = [&](const Combo& full) {
    // express full modulo C in the q-row coordinates
    Combo res;
    std::map<int, std::vector<std::pair<int, Scalar>>> parts;
    bucket_combo(bl, full, parts);
    for (auto& [b, entries] : parts) {
      int width = int(bl.ids[size_t(b)].size());
      Vec v(static_cast<size_t>(width));
      for (auto& [t, s] : entries) v[size_t(t)] = v[size_t(t)] + s;
      // solve v = sum mu_k c_k + sum nu_i q_i via an augmented system
      const BlockBasis& bas = bb[size_t(b)];
      int nc = int(bas.crows.size()), nq = int(bas.qrows.size());
      Mat aug(width, nc + nq + 1);
      for (int t = 0; t < width; ++t) {
        for (int k = 0; k < nc; ++k) aug.at(t, k) = bas.crows[size_t(k)][size_t(t)];
        for (int k = 0; k < nq; ++k) aug.at(t, nc + k) = bas.qrows[size_t(k)].second[size_t(t)];
        aug.at(t, nc + nq) = v[size_t(t)];
      }
      std::vector<int> piv = rref(aug);
      Vec sol(size_t(nc + nq));
      for (size_t r = 0; r < piv.size(); ++r) {
        // a pivot in the last column would mean the value escapes the span
        CF_CHECK(piv[r] < nc + nq, "bracket image not inside the subspace");
        sol[size_t(piv[r])] = aug.at(int(r), nc + nq);
      }
      for (int k = 0; k < nq; ++k)
        if (!sol[size_t(nc + k)].is_zero()) combo_add(res, bas.qrows[size_t(k)].first, sol[size_t(nc + k)]);
    }
    return res;
  };

  auto lift = [&](int i) {
    const QRow& qr = qrows[size_t(i)];
    Combo c0;
    for (size_t t = 0; t < qr.v.size(); ++t)
      if (!qr.v[t].is_zero()) c0.emplace(bl.ids[size_t(qr.block)][t], qr.v[t]);
    return c0;
  };

  for (int i = 0; i < Q; ++i) {
    Combo li = lift(i);
    for (int j = 0; j < Q; ++j) {
      Combo br = a.bracket_vec(li, lift(j));
      if (!br.empty()) out.bracket[size_t(i)][size_t(j)] = project(br);
    }
    if (a.p == 2 && out.parity[size_t(i)] == Parity::Odd) {
      Combo sq = a.square_vec(li);
      if (!sq.empty()) out.square[size_t(i)] = project(sq);
    }
  }
  return out;
}

}  // namespace

SimpleCore simple_subquotient(const AlgebraBuild& b) {
  CF_CHECK(b.verdict == Verdict::Finite, "operation needs a finite build");
  const StructAlgebra& a = b.alg;
  Blocks bl(a);
  Subspace w = sub_full(a, bl);
  std::pair<int, int> cur = a.sdim();
  for (int step = 0; ; ++step) {
    if (step > 5) raise(Err::NotStabilized, "derived series did not stabilize in 5 steps");
    Subspace nx = derived_step(a, bl, w);
    std::pair<int, int> d = sub_sdim(a, bl, nx);
    if (d == cur) break;
    w = std::move(nx);
    cur = d;
    if (cur == std::make_pair(0, 0)) break;
  }
  std::vector<Combo> zc = center_in(a, bl, w);
  Subspace c = collect_subspace(bl, zc);
  SimpleCore core;
  core.alg = quotient_presentation(a, bl, w, c);
  core.sdim = core.alg.sdim();
  return core;
}

bool is_simple(const StructAlgebra& a) {
  int D = a.dim();
  if (D <= 1) return false;
  Blocks bl(a);

  // generating set for ad-closure: simple-root blocks both signs plus Cartan
  std::vector<int> gens;
  {
    std::set<int> gset;
    for (int b = 0; b < bl.count(); ++b) {
      const RootKey& r = bl.keys[size_t(b)];
      int h = root_height(r);
      int nz = 0;
      for (int v : r)
        if (v != 0) ++nz;
      bool simple_pm = (nz == 1 && (h == 1 || h == -1));
      bool cartan = (nz == 0);
      if (simple_pm || cartan)
        for (int id : bl.ids[size_t(b)]) gset.insert(id);
    }
    gens.assign(gset.begin(), gset.end());
    if (gens.empty())
      for (int i = 0; i < D; ++i) gens.push_back(i);
  }

  auto closure = [&](int seed, const std::vector<int>& act, Subspace& w) {
    std::vector<std::pair<Combo, Parity>> work;
    Combo s0;
    s0.emplace(seed, Scalar::of_int(a.p, 1));
    std::vector<std::vector<Vec>> rows(size_t(bl.count()));
    std::vector<Mat> mats;
    for (int b = 0; b < bl.count(); ++b) mats.push_back(Mat(0, int(bl.ids[size_t(b)].size())));
    int total = 0;
    auto insert = [&](const Combo& c, Parity q) {
      std::map<int, std::vector<std::pair<int, Scalar>>> parts;
      bucket_combo(bl, c, parts);
      bool grew = false;
      for (auto& [b, entries] : parts) {
        int width = int(bl.ids[size_t(b)].size());
        Vec v(static_cast<size_t>(width));
        for (auto& [t, sv] : entries) v[size_t(t)] = v[size_t(t)] + sv;
        rows[size_t(b)].push_back(v);
        Mat m2 = rows_rref(rows[size_t(b)], width);
        if (m2.rows() > mats[size_t(b)].rows()) {
          mats[size_t(b)] = m2;
          grew = true;
          ++total;
          work.emplace_back(c, q);
        } else {
          rows[size_t(b)].pop_back();
        }
      }
      return grew;
    };
    insert(s0, a.parity[size_t(seed)]);
    size_t head = 0;
    while (head < work.size() && total < D) {
      auto [v, q] = work[head++];
      for (int y : act) {
        Combo ys;
        ys.emplace(y, Scalar::of_int(a.p, 1));
        Combo br = a.bracket_vec(v, ys);
        if (!br.empty()) insert(br, Parity((int(q) + int(a.parity[size_t(y)])) % 2));
      }
      if (a.p == 2 && q == Parity::Odd) {
        Combo sq = a.square_vec(v);
        if (!sq.empty()) insert(sq, Parity::Even);
      }
    }
    w = mats;
    return total;
  };

  std::vector<int> all;
  for (int i = 0; i < D; ++i) all.push_back(i);
  for (int seed = 0; seed < D; ++seed) {
    Subspace w;
    int got = closure(seed, gens, w);
    if (got == D) continue;
    // the generating set may be incomplete; redo with the full basis
    got = closure(seed, all, w);
    if (got < D) return false;
  }
  return true;
}

bool is_solvable(const StructAlgebra& a) {
  Blocks bl(a);
  Subspace w = sub_full(a, bl);
  int cur = sub_dim(w);
  while (cur > 0) {
    Subspace nx = derived_step(a, bl, w);
    int d = sub_dim(nx);
    if (d == cur) return false;
    w = std::move(nx);
    cur = d;
  }
  return true;
}

StructAlgebra even_part(const StructAlgebra& a) {
  std::vector<int> keep, back(size_t(a.dim()), -1);
  for (int i = 0; i < a.dim(); ++i)
    if (a.parity[size_t(i)] == Parity::Even) {
      back[size_t(i)] = int(keep.size());
      keep.push_back(i);
    }
  StructAlgebra out;
  out.p = a.p;
  int Q = int(keep.size());
  out.parity.assign(size_t(Q), Parity::Even);
  out.roots.resize(size_t(Q));
  out.bracket.assign(size_t(Q), std::vector<Combo>(size_t(Q)));
  out.square.assign(size_t(Q), Combo{});
  for (int i = 0; i < Q; ++i) {
    out.roots[size_t(i)] = a.roots[size_t(keep[size_t(i)])];
    for (int j = 0; j < Q; ++j) {
      const Combo& c = a.bracket[size_t(keep[size_t(i)])][size_t(keep[size_t(j)])];
      Combo& dst = out.bracket[size_t(i)][size_t(j)];
      for (const auto& [id, v] : c) {
        CF_CHECK(back[size_t(id)] >= 0, "even bracket left the even part");
        dst.emplace(back[size_t(id)], v);
      }
    }
  }
  return out;
}

std::vector<OddHighestWeight> odd_highest_weights(const AlgebraBuild& b) {
  CF_CHECK(b.verdict == Verdict::Finite, "operation needs a finite build");
  const StructAlgebra& a = b.alg;
  Blocks bl(a);
  std::vector<int> raisers;
  for (const BasisElement& be : b.basis)
    if (be.kind == ElemKind::Positive && be.parity == Parity::Even) raisers.push_back(be.id);

  std::vector<OddHighestWeight> out;
  for (int blk = 0; blk < bl.count(); ++blk) {
    const std::vector<int>& ids = bl.ids[size_t(blk)];
    if (ids.empty() || a.parity[size_t(ids[0])] != Parity::Odd) continue;
    int dimb = int(ids.size());
    std::vector<Vec> cons;
    for (int x : raisers) {
      Combo xs;
      xs.emplace(x, Scalar::of_int(a.p, 1));
      std::vector<Combo> imgs;
      std::set<int> support;
      for (int t = 0; t < dimb; ++t) {
        Combo zs;
        zs.emplace(ids[size_t(t)], Scalar::of_int(a.p, 1));
        imgs.push_back(a.bracket_vec(xs, zs));
        for (const auto& [id, v] : imgs.back()) {
          (void)v;
          support.insert(id);
        }
      }
      for (int id : support) {
        Vec row(static_cast<size_t>(dimb));
        for (int t = 0; t < dimb; ++t) {
          auto it = imgs[size_t(t)].find(id);
          if (it != imgs[size_t(t)].end()) row[size_t(t)] = it->second;
        }
        cons.push_back(row);
      }
    }
    Mat conm(int(cons.size()), dimb);
    for (size_t r = 0; r < cons.size(); ++r)
      for (int t = 0; t < dimb; ++t) conm.at(int(r), t) = cons[r][size_t(t)];
    for (const Vec& lam : right_kernel(conm)) {
      OddHighestWeight hw;
      hw.root = bl.keys[size_t(blk)];
      for (int t = 0; t < dimb; ++t) combo_add(hw.vec, ids[size_t(t)], lam[size_t(t)]);
      if (hw.vec.empty()) continue;
      for (int i = 0; i < b.n; ++i) {
        Scalar acc = Scalar::of_int(a.p, 0);
        for (int m = 0; m < b.n; ++m)
          acc = acc + b.spec.at(i, m) * Scalar::of_int(a.p, hw.root[size_t(m)]);
        hw.weight.push_back(acc);
      }
      for (int k = 0; k < b.l; ++k) {
        Scalar acc = Scalar::of_int(a.p, 0);
        for (int m = 0; m < b.n; ++m)
          acc = acc + b.bmat.at(k, m) * Scalar::of_int(a.p, hw.root[size_t(m)]);
        hw.weight.push_back(acc);
      }
      out.push_back(std::move(hw));
    }
  }
  return out;
}

Combo square(const AlgebraBuild& b, const Combo& v) {
  CF_CHECK(b.verdict == Verdict::Finite, "operation needs a finite build");
  return b.alg.square_vec(v);
}

std::string build_report(const AlgebraBuild& b, bool audit) {
  nlohmann::json j;
  j["verdict"] = b.verdict == Verdict::Finite ? "finite" : "exceeded_cap";
  j["sdim"] = {{"even", b.sdim.first}, {"odd", b.sdim.second}};
  j["corank"] = b.l;
  if (b.verdict == Verdict::Finite) {
    nlohmann::json der = nlohmann::json::array();
    for (auto [ev, od] : derived_series(b)) der.push_back({{"even", ev}, {"odd", od}});
    j["derived"] = der;
    j["center"] = int(center(b.alg).size());
    SimpleCore core = simple_subquotient(b);
    j["simple_core"] = {{"even", core.sdim.first}, {"odd", core.sdim.second}};
    std::vector<std::pair<RootKey, std::pair<int, int>>> roots(b.mults.begin(), b.mults.end());
    std::sort(roots.begin(), roots.end(), [](const auto& x, const auto& y) {
      int hx = root_height(x.first), hy = root_height(y.first);
      if (hx != hy) return hx < hy;
      return x.first < y.first;
    });
    nlohmann::json jr = nlohmann::json::array();
    for (const auto& [r, m] : roots)
      jr.push_back({{"coords", r}, {"even", m.first}, {"odd", m.second}});
    j["roots"] = jr;
    nlohmann::json hw = nlohmann::json::array();
    for (const OddHighestWeight& h : odd_highest_weights(b)) {
      nlohmann::json w = nlohmann::json::array();
      for (const Scalar& s : h.weight) w.push_back(s.str());
      hw.push_back({{"root", h.root}, {"weight", w}});
    }
    j["hw_odd"] = hw;
  } else {
    j["height_reached"] = b.height_reached;
  }
  if (audit) {
    nlohmann::json ba = nlohmann::json::array();
    for (const BasisElement& be : b.basis) {
      const char* kind = be.kind == ElemKind::CartanH   ? "h"
                         : be.kind == ElemKind::CartanD ? "d"
                         : be.kind == ElemKind::Positive ? "pos"
                                                          : "neg";
      ba.push_back({{"id", be.id},
                    {"word", be.word},
                    {"root", be.root},
                    {"parity", be.parity == Parity::Even ? "ev" : "od"},
                    {"kind", kind}});
    }
    j["basis"] = ba;
  }
  return j.dump();
}

}  // namespace cf
