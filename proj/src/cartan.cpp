#include "cartanforge/cartan.hpp"

#include <json.hpp>

#include <algorithm>
#include <queue>

namespace cf {

Scalar mark_value(Mark m, int p) {
  switch (m) {
    case Mark::Two: return Scalar::of_int(p, 2);
    case Mark::Od: return Scalar::one(p);
    case Mark::Ev: return Scalar::zero(p);
    case Mark::One: return Scalar::one(p);
    case Mark::Zero: return Scalar::zero(p);
  }
  raise(Err::InternalInconsistency, "bad mark");
}

const char* mark_token(Mark m) {
  switch (m) {
    case Mark::Two: return "2";
    case Mark::Od: return "od";
    case Mark::Ev: return "ev";
    case Mark::One: return "1";
    case Mark::Zero: return "0";
  }
  raise(Err::InternalInconsistency, "bad mark");
}

bool CartanSpec::operator==(const CartanSpec& o) const {
  return p == o.p && n == o.n && parity == o.parity && diag == o.diag && entries == o.entries;
}

namespace {

void check_zero_pattern(const Mat& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = i + 1; j < m.cols(); ++j)
      if (m.at(i, j).is_zero() != m.at(j, i).is_zero())
        raise(Err::ZeroPatternAsymmetric,
              "entry (" + std::to_string(i) + "," + std::to_string(j) + ") breaks the zero pattern");
}

Mark classify_diag(Parity par, const Scalar& v, int p) {
  if (par == Parity::Odd) return v.is_zero() ? Mark::Zero : Mark::One;
  if (v.is_zero()) return Mark::Ev;
  return p == 2 ? Mark::Od : Mark::Two;
}

}  // namespace

CartanSpec normalize(const Mat& raw, const std::vector<Parity>& parity, int p) {
  int n = raw.rows();
  if (raw.cols() != n || int(parity.size()) != n)
    raise(Err::WrongShape, "normalize expects a square matrix with one parity per row");
  check_zero_pattern(raw);

  // forced multipliers bring nonzero diagonals to their target mark
  std::vector<Scalar> mult(n);
  std::vector<bool> forced(n, false);
  for (int i = 0; i < n; ++i) {
    const Scalar& d = raw.at(i, i);
    if (d.is_zero()) {
      mult[i] = Scalar::one(p);
      continue;
    }
    forced[i] = true;
    Scalar target = parity[i] == Parity::Odd ? Scalar::one(p)
                    : p == 2                 ? Scalar::one(p)
                                             : Scalar::of_int(p, 2);
    mult[i] = target / d;
  }

  // symmetrize with the remaining freedom: propagate per component, fall back
  // to multiplier 1 for the free rows of a component whose constraints clash
  std::vector<int> comp(n, -1);
  for (int start = 0; start < n; ++start) {
    if (comp[start] >= 0) continue;
    std::vector<int> members;
    std::queue<int> q;
    q.push(start);
    comp[start] = start;
    while (!q.empty()) {
      int i = q.front();
      q.pop();
      members.push_back(i);
      for (int j = 0; j < n; ++j)
        if (j != i && comp[j] < 0 && !raw.at(i, j).is_zero()) {
          comp[j] = start;
          q.push(j);
        }
    }
    std::vector<Scalar> lam(n);
    std::vector<bool> set(n, false);
    std::queue<int> bfs;
    for (int i : members)
      if (forced[i]) {
        lam[i] = mult[i];
        set[i] = true;
        bfs.push(i);
      }
    if (bfs.empty()) {
      lam[members.front()] = Scalar::one(p);
      set[members.front()] = true;
      bfs.push(members.front());
    }
    bool ok = true;
    while (!bfs.empty() && ok) {
      int i = bfs.front();
      bfs.pop();
      for (int j = 0; j < n && ok; ++j) {
        if (j == i || raw.at(i, j).is_zero()) continue;
        Scalar want = lam[i] * raw.at(i, j) / raw.at(j, i);
        if (!set[j]) {
          lam[j] = want;
          set[j] = true;
          bfs.push(j);
        } else if (lam[j] != want) {
          ok = false;
        }
      }
    }
    if (ok)
      for (int i : members)
        if (!forced[i]) mult[i] = lam[i];
  }

  CartanSpec s;
  s.p = p;
  s.n = n;
  s.parity = parity;
  s.entries = Mat(n, n);
  s.diag.resize(n);
  s.parametric = false;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      s.entries.at(i, j) = mult[i] * raw.at(i, j);
      if (!s.entries.at(i, j).is_param_free()) s.parametric = true;
    }
    s.diag[i] = classify_diag(parity[i], s.entries.at(i, i), p);
    Scalar want = mark_value(s.diag[i], p);
    if (s.entries.at(i, i) != want)
      raise(Err::NotNormalizable, "diagonal entry " + std::to_string(i) + " cannot reach its mark");
  }
  return s;
}

bool is_indecomposable(const CartanSpec& s) {
  if (s.n == 0) return false;
  std::vector<bool> seen(s.n, false);
  std::queue<int> q;
  q.push(0);
  seen[0] = true;
  int count = 0;
  while (!q.empty()) {
    int i = q.front();
    q.pop();
    ++count;
    for (int j = 0; j < s.n; ++j)
      if (j != i && !seen[j] && !s.at(i, j).is_zero()) {
        seen[j] = true;
        q.push(j);
      }
  }
  return count == s.n;
}

std::optional<std::vector<Scalar>> symmetrizer(const CartanSpec& s) {
  std::vector<Scalar> d(s.n);
  std::vector<bool> set(s.n, false);
  d[0] = Scalar::one(s.p);
  set[0] = true;
  std::queue<int> q;
  q.push(0);
  while (!q.empty()) {
    int i = q.front();
    q.pop();
    for (int j = 0; j < s.n; ++j) {
      if (j == i || s.at(i, j).is_zero() || set[j]) continue;
      d[j] = d[i] * s.at(i, j) / s.at(j, i);
      set[j] = true;
      q.push(j);
    }
  }
  for (int i = 0; i < s.n; ++i) {
    CF_CHECK(set[i], "symmetrizer requires an indecomposable spec");
    for (int j = 0; j < s.n; ++j)
      if (d[i] * s.at(i, j) != d[j] * s.at(j, i)) return std::nullopt;
  }
  return d;
}

namespace {

// One position of the canonical-search key: node header then the gauged new
// entries this position reveals (row k over earlier cols, earlier rows over
// col k, interleaved in column order).
struct StepKey {
  int parity;
  int mark;
  std::vector<Scalar> vals;
};

int cmp_step(const StepKey& a, const StepKey& b) {
  if (a.parity != b.parity) return a.parity < b.parity ? -1 : 1;
  if (a.mark != b.mark) return a.mark < b.mark ? -1 : 1;
  CF_CHECK(a.vals.size() == b.vals.size(), "step key shape mismatch");
  for (size_t i = 0; i < a.vals.size(); ++i) {
    int c = a.vals[i].cmp(b.vals[i]);
    if (c) return c;
  }
  return 0;
}

struct CanonSearch {
  const CartanSpec& s;
  int n;
  std::vector<int> perm;          // perm[k] = old row at position k
  std::vector<bool> used;
  std::vector<Scalar> mult;       // gauge multiplier per old row
  std::vector<bool> mult_set;
  std::vector<StepKey> best;
  std::vector<int> best_perm;
  std::vector<Scalar> best_mult;
  std::vector<bool> best_mult_set;

  explicit CanonSearch(const CartanSpec& spec)
      : s(spec), n(spec.n), perm(spec.n, -1), used(spec.n, false), mult(spec.n),
        mult_set(spec.n, false) {}

  // gauged value of entry (old row r, old col c); may set r's gauge
  Scalar gauged(int r, int c, std::vector<int>* journal) {
    const Scalar& v = s.at(r, c);
    if (!s.free_row(r)) return v;
    if (!mult_set[r]) {
      if (v.is_zero()) return v;
      mult[r] = v.invert();
      mult_set[r] = true;
      journal->push_back(r);
      return Scalar::one(s.p);
    }
    return mult[r] * v;
  }

  StepKey eval(int k, int cand, std::vector<int>* journal) {
    StepKey sk;
    sk.parity = int(s.parity[cand]);
    sk.mark = int(s.diag[cand]);
    sk.vals.reserve(size_t(k) * 2);
    for (int l = 0; l < k; ++l) {
      sk.vals.push_back(gauged(cand, perm[l], journal));
      sk.vals.push_back(gauged(perm[l], cand, journal));
    }
    return sk;
  }

  void undo(const std::vector<int>& journal) {
    for (int r : journal) mult_set[r] = false;
  }

  void dfs(int k) {
    if (k == n) {
      best_perm = perm;
      best_mult = mult;
      best_mult_set = mult_set;
      return;
    }
    for (int cand = 0; cand < n; ++cand) {
      if (used[cand]) continue;
      std::vector<int> journal;
      StepKey sk = eval(k, cand, &journal);
      if (int(best.size()) > k) {
        int c = cmp_step(sk, best[k]);
        if (c > 0) {
          undo(journal);
          continue;
        }
        if (c < 0) best.resize(size_t(k));
      }
      if (int(best.size()) == k) best.push_back(sk);
      used[cand] = true;
      perm[k] = cand;
      dfs(k + 1);
      used[cand] = false;
      perm[k] = -1;
      undo(journal);
    }
  }
};

}  // namespace

CartanSpec canonical_form(const CartanSpec& s) {
  if (s.n > 10) raise(Err::SizeTooLarge, "canonical_form supports n <= 10");
  CanonSearch search(s);
  search.dfs(0);
  CF_CHECK(int(search.best_perm.size()) == s.n, "canonical search found no labeling");
  CartanSpec out;
  out.p = s.p;
  out.n = s.n;
  out.entries = Mat(s.n, s.n);
  out.parity.resize(s.n);
  out.diag.resize(s.n);
  out.parametric = s.parametric;
  for (int k = 0; k < s.n; ++k) {
    int r = search.best_perm[k];
    out.parity[k] = s.parity[r];
    out.diag[k] = s.diag[r];
    Scalar m = search.best_mult_set[r] && s.free_row(r) ? search.best_mult[r] : Scalar::one(s.p);
    for (int l = 0; l < s.n; ++l) out.entries.at(k, l) = m * s.at(r, search.best_perm[l]);
  }
  return out;
}

Mat left_kernel(const CartanSpec& s) {
  std::vector<Vec> rows = left_kernel(s.entries);
  Mat t(int(rows.size()), s.n);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < s.n; ++j) t.at(int(i), j) = rows[i][j];
  return t;
}

Mat grading_completion(const CartanSpec& s) {
  EchelonSpan span(s.n);
  for (int i = 0; i < s.n; ++i) {
    Vec row(size_t(s.n));
    for (int j = 0; j < s.n; ++j) row[size_t(j)] = s.at(i, j);
    span.insert(row);
  }
  std::vector<int> picks;
  for (int j = 0; j < s.n && span.size() < s.n; ++j) {
    Vec ej(size_t(s.n));
    for (int m = 0; m < s.n; ++m) ej[size_t(m)] = Scalar::of_int(s.p, m == j ? 1 : 0);
    if (span.insert(ej) >= 0) picks.push_back(j);
  }
  CF_CHECK(span.size() == s.n, "grading completion failed to reach full rank");
  Mat b(int(picks.size()), s.n);
  for (size_t i = 0; i < picks.size(); ++i)
    for (int j = 0; j < s.n; ++j) b.at(int(i), j) = Scalar::of_int(s.p, j == picks[i] ? 1 : 0);
  return b;
}

std::string spec_to_json(const CartanSpec& s) {
  nlohmann::json out;
  out["p"] = s.p;
  nlohmann::json rows = nlohmann::json::array();
  for (int i = 0; i < s.n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < s.n; ++j)
      row.push_back(i == j ? std::string(mark_token(s.diag[i])) : s.at(i, j).str());
    rows.push_back(row);
  }
  out["matrix"] = rows;
  nlohmann::json par = nlohmann::json::array();
  for (Parity q : s.parity) par.push_back(q == Parity::Even ? "ev" : "od");
  out["parity"] = par;
  return out.dump();
}

CartanSpec spec_from_json(const std::string& text) {
  nlohmann::json in;
  try {
    in = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    raise(Err::ParseError, std::string("bad spec JSON: ") + e.what());
  }
  if (!in.contains("p") || !in.contains("matrix") || !in.contains("parity"))
    raise(Err::ParseError, "spec JSON needs p, matrix, parity");
  int p = in["p"].get<int>();
  auto rows = in["matrix"];
  int n = int(rows.size());
  std::vector<Parity> parity;
  for (const auto& tok : in["parity"]) {
    std::string t = tok.get<std::string>();
    if (t == "ev") parity.push_back(Parity::Even);
    else if (t == "od") parity.push_back(Parity::Odd);
    else raise(Err::ParseError, "parity token must be ev or od: " + t);
  }
  if (int(parity.size()) != n) raise(Err::ParseError, "parity length mismatch");
  Mat raw(n, n);
  for (int i = 0; i < n; ++i) {
    if (int(rows[i].size()) != n) raise(Err::ParseError, "matrix is not square");
    for (int j = 0; j < n; ++j) {
      std::string cell = rows[i][j].get<std::string>();
      if (cell == "ev" || cell == "od") {
        if (i != j || parity[i] != Parity::Even)
          raise(Err::NotNormalizable, "mark " + cell + " is legal only on even diagonal nodes");
        raw.at(i, j) = cell == "ev" ? Scalar::zero(p) : Scalar::one(p);
      } else {
        raw.at(i, j) = parse_scalar(p, cell);
      }
    }
  }
  return normalize(raw, parity, p);
}

}  // namespace cf
