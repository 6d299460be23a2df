#include "cartanforge/scalars.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace cf {

const char* err_name(Err e) {
  switch (e) {
    case Err::DivisionByZero: return "DivisionByZero";
    case Err::PoleAtValue: return "PoleAtValue";
    case Err::NotNormalizable: return "NotNormalizable";
    case Err::ZeroPatternAsymmetric: return "ZeroPatternAsymmetric";
    case Err::SizeTooLarge: return "SizeTooLarge";
    case Err::InternalInconsistency: return "InternalInconsistency";
    case Err::UndefinedReflection: return "UndefinedReflection";
    case Err::NonIntegerCoefficient: return "NonIntegerCoefficient";
    case Err::NotIsotropic: return "NotIsotropic";
    case Err::OrbitCapExceeded: return "OrbitCapExceeded";
    case Err::NotASymmetry: return "NotASymmetry";
    case Err::ExtensionFailure: return "ExtensionFailure";
    case Err::WrongCharacteristic: return "WrongCharacteristic";
    case Err::NotOdd: return "NotOdd";
    case Err::Degenerate: return "Degenerate";
    case Err::InvalidParams: return "InvalidParams";
    case Err::WrongShape: return "WrongShape";
    case Err::NotStabilized: return "NotStabilized";
    case Err::ExpectationFileInvalid: return "ExpectationFileInvalid";
    case Err::ParseError: return "ParseError";
  }
  return "UnknownError";
}

Prime::Prime(int p_) : p(p_) {
  if (p < 2) raise(Err::InvalidParams, "characteristic must be a prime");
  for (int d = 2; d * d <= p; ++d)
    if (p % d == 0) raise(Err::InvalidParams, "characteristic must be a prime");
}

namespace {

inline uint8_t addm(int p, int a, int b) { return uint8_t((a + b) % p); }
inline uint8_t subm(int p, int a, int b) { return uint8_t(((a - b) % p + p) % p); }
inline uint8_t mulm(int p, int a, int b) { return uint8_t((a * b) % p); }

uint8_t invm(int p, int a) {
  if (a == 0) raise(Err::DivisionByZero, "inverse of 0 in GF(p)");
  int r = 1, base = a % p, e = p - 2;  // Fermat
  while (e) {
    if (e & 1) r = r * base % p;
    base = base * base % p;
    e >>= 1;
  }
  return uint8_t(r);
}

void ptrim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly padd(int p, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < r.size(); ++i) {
    int v = (i < a.size() ? a[i] : 0) + (i < b.size() ? b[i] : 0);
    r[i] = uint8_t(v % p);
  }
  ptrim(r);
  return r;
}

Poly psub(int p, const Poly& a, const Poly& b) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < r.size(); ++i) {
    int v = (i < a.size() ? a[i] : 0) - (i < b.size() ? b[i] : 0);
    r[i] = uint8_t(((v % p) + p) % p);
  }
  ptrim(r);
  return r;
}

Poly pmul(int p, const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = addm(p, r[i + j], mulm(p, a[i], b[j]));
  ptrim(r);
  return r;
}

Poly pscale(int p, const Poly& a, int c) {
  Poly r = a;
  for (auto& x : r) x = mulm(p, x, c);
  ptrim(r);
  return r;
}

// a = q*b + r with deg r < deg b; returns {q, r}
std::pair<Poly, Poly> pdivmod(int p, Poly a, const Poly& b) {
  CF_CHECK(!b.empty(), "poly division by zero");
  Poly q;
  int lb = invm(p, b.back());
  while (a.size() >= b.size()) {
    int d = int(a.size() - b.size());
    uint8_t c = mulm(p, a.back(), lb);
    if (int(q.size()) < d + 1) q.resize(d + 1, 0);
    q[d] = addm(p, q[d], c);
    for (size_t i = 0; i < b.size(); ++i) a[d + i] = subm(p, a[d + i], mulm(p, c, b[i]));
    ptrim(a);
    if (a.empty()) break;
  }
  ptrim(q);
  return {q, a};
}

Poly pgcd(int p, Poly a, Poly b) {
  while (!b.empty()) {
    Poly r = pdivmod(p, a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty() && a.back() != 1) a = pscale(p, a, invm(p, a.back()));
  return a;
}

// monic inverse of a modulo m (gcd(a, m) = 1 required)
Poly pinvmod(int p, const Poly& a, const Poly& m) {
  // extended Euclid: r0 = m, r1 = a
  Poly r0 = m, r1 = a, t0 = {}, t1 = {1};
  while (!r1.empty()) {
    auto [q, r] = pdivmod(p, r0, r1);
    Poly t = psub(p, t0, pmul(p, q, t1));
    r0 = std::move(r1);
    r1 = std::move(r);
    t0 = std::move(t1);
    t1 = std::move(t);
  }
  CF_CHECK(r0.size() == 1, "element not invertible in extension field");
  return pscale(p, t0, invm(p, r0[0]));
}

Poly pmulmod(int p, const Poly& a, const Poly& b, const Poly& m) {
  return pdivmod(p, pmul(p, a, b), m).second;
}

bool poly_irreducible(int p, const Poly& f) {
  // trial division by all monic polys of degree 1..deg/2
  int deg = int(f.size()) - 1;
  for (int d = 1; 2 * d <= deg; ++d) {
    long long count = 1;
    for (int i = 0; i < d; ++i) count *= p;
    for (long long idx = 0; idx < count; ++idx) {
      Poly g(d + 1, 0);
      long long t = idx;
      for (int i = 0; i < d; ++i) {
        g[i] = uint8_t(t % p);
        t /= p;
      }
      g[d] = 1;
      if (pdivmod(p, f, g).second.empty()) return false;
    }
  }
  return true;
}

int cmp_poly(const Poly& a, const Poly& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (size_t i = a.size(); i-- > 0;)
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  return 0;
}

}  // namespace

const Poly& ext_modulus(int p, int k) {
  static std::map<std::pair<int, int>, Poly> cache;
  auto key = std::make_pair(p, k);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (k < 2 || k > 4) raise(Err::InvalidParams, "extension degree must be in [2,4]");
  long long count = 1;
  for (int i = 0; i < k; ++i) count *= p;
  for (long long idx = 0; idx < count; ++idx) {
    Poly f(k + 1, 0);
    long long t = idx;
    for (int i = 0; i < k; ++i) {
      f[i] = uint8_t(t % p);
      t /= p;
    }
    f[k] = 1;
    if (poly_irreducible(p, f)) return cache.emplace(key, f).first->second;
  }
  raise(Err::InternalInconsistency, "no irreducible polynomial found");
}

std::vector<Scalar> ext_field_elements(int p, int k) {
  long long count = 1;
  for (int i = 0; i < k; ++i) count *= p;
  std::vector<Scalar> out;
  out.reserve(size_t(count));
  for (long long idx = 0; idx < count; ++idx) {
    Poly c(k, 0);
    long long t = idx;
    for (int i = 0; i < k; ++i) {
      c[i] = uint8_t(t % p);
      t /= p;
    }
    out.push_back(Scalar::ext(p, k, c));
  }
  return out;
}

Scalar Scalar::of_int(int p, long long v) {
  Prime check(p);
  Scalar s;
  s.p_ = p;
  s.kind_ = Kind::Const;
  s.c_ = uint8_t(((v % p) + p) % p);
  return s;
}

Scalar Scalar::param(int p) {
  Prime check(p);
  Scalar s;
  s.p_ = p;
  s.kind_ = Kind::Rat;
  s.num_ = {0, 1};
  s.den_ = {1};
  return s;
}

Scalar Scalar::rational(int p, Poly num, Poly den) {
  Prime check(p);
  Scalar s;
  s.p_ = p;
  s.kind_ = Kind::Rat;
  s.num_ = std::move(num);
  s.den_ = std::move(den);
  ptrim(s.num_);
  ptrim(s.den_);
  if (s.den_.empty()) raise(Err::DivisionByZero, "zero denominator");
  s.canon_rat();
  return s;
}

// Constants stay tagged Ext so the field context survives arithmetic chains.
Scalar Scalar::ext(int p, int k, Poly coeffs) {
  Prime check(p);
  for (auto& x : coeffs) x = uint8_t(x % p);
  ptrim(coeffs);
  CF_CHECK(int(coeffs.size()) <= k, "extension element degree too high");
  Scalar s;
  s.p_ = p;
  s.k_ = k;
  s.kind_ = Kind::Ext;
  s.ext_ = std::move(coeffs);
  return s;
}

void Scalar::canon_rat() {
  for (auto& x : num_) x = uint8_t(x % p_);
  for (auto& x : den_) x = uint8_t(x % p_);
  ptrim(num_);
  ptrim(den_);
  if (den_.empty()) raise(Err::DivisionByZero, "zero denominator");
  Poly g = pgcd(p_, num_, den_);
  if (g.size() > 1 || (g.size() == 1 && g[0] != 1)) {
    num_ = pdivmod(p_, num_, g).first;
    den_ = pdivmod(p_, den_, g).first;
  }
  if (den_.back() != 1) {
    int inv = invm(p_, den_.back());
    num_ = pscale(p_, num_, inv);
    den_ = pscale(p_, den_, inv);
  }
  if (num_.empty()) den_ = {1};
  // demote constants to the fast path
  if (num_.size() <= 1 && den_.size() == 1 && den_[0] == 1) {
    kind_ = Kind::Const;
    c_ = num_.empty() ? 0 : num_[0];
    num_.clear();
    den_.clear();
  }
}

bool Scalar::is_zero() const {
  switch (kind_) {
    case Kind::Const: return c_ == 0;
    case Kind::Ext: return ext_.empty();
    case Kind::Rat: return num_.empty();
  }
  return false;
}

bool Scalar::is_one() const {
  switch (kind_) {
    case Kind::Const: return c_ == 1;
    case Kind::Ext: return ext_.size() == 1 && ext_[0] == 1;
    case Kind::Rat: return false;  // canonical constants are Kind::Const
  }
  return false;
}

int Scalar::residue() const {
  if (kind_ == Kind::Const) return c_;
  if (kind_ == Kind::Ext && ext_.size() <= 1) return ext_.empty() ? 0 : ext_[0];
  raise(Err::NonIntegerCoefficient, "scalar is not a GF(p) constant: " + str());
}

const Poly& Scalar::num() const {
  CF_CHECK(kind_ == Kind::Rat, "num() requires a rational-function scalar");
  return num_;
}

const Poly& Scalar::den() const {
  CF_CHECK(kind_ == Kind::Rat, "den() requires a rational-function scalar");
  return den_;
}

void Scalar::align(Scalar& a, Scalar& b) {
  if (a.p_ == 0 && b.p_ == 0) return;
  if (a.p_ == 0) {
    a.p_ = b.p_;
    a.k_ = b.k_;
    a.kind_ = b.kind_ == Kind::Ext ? Kind::Ext : Kind::Const;
    a.c_ = 0;
    a.ext_.clear();
  }
  if (b.p_ == 0) align(b, a);
  CF_CHECK(a.p_ == b.p_, "mixed characteristics");
  // promote Const to match the partner's kind
  if (a.kind_ != b.kind_) {
    auto promote = [](Scalar& x, const Scalar& like) {
      CF_CHECK(x.kind_ == Kind::Const, "cannot mix GF(p^k) with GF(p)(a)");
      if (like.kind_ == Kind::Ext) {
        x.kind_ = Kind::Ext;
        x.k_ = like.k_;
        x.ext_ = x.c_ ? Poly{x.c_} : Poly{};
      } else {
        x.kind_ = Kind::Rat;
        x.num_ = x.c_ ? Poly{x.c_} : Poly{};
        x.den_ = {1};
      }
    };
    if (a.kind_ == Kind::Const) promote(a, b);
    else if (b.kind_ == Kind::Const) promote(b, a);
    else raise(Err::InternalInconsistency, "cannot mix GF(p^k) with GF(p)(a)");
  }
  if (a.kind_ == Kind::Ext) CF_CHECK(a.k_ == b.k_, "mixed extension degrees");
}

Scalar Scalar::operator+(const Scalar& o) const {
  Scalar a = *this, b = o;
  align(a, b);
  if (a.p_ == 0) return a;
  switch (a.kind_) {
    case Kind::Const: return of_int(a.p_, a.c_ + b.c_);
    case Kind::Ext: return ext(a.p_, a.k_, padd(a.p_, a.ext_, b.ext_));
    case Kind::Rat:
      return rational(a.p_, padd(a.p_, pmul(a.p_, a.num_, b.den_), pmul(a.p_, b.num_, a.den_)),
                      pmul(a.p_, a.den_, b.den_));
  }
  return a;
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator-() const {
  if (p_ == 0) return *this;
  switch (kind_) {
    case Kind::Const: return of_int(p_, -int(c_));
    case Kind::Ext: return ext(p_, k_, pscale(p_, ext_, p_ - 1));
    case Kind::Rat: {
      Scalar s = *this;
      s.num_ = pscale(p_, s.num_, p_ - 1);
      return s;
    }
  }
  return *this;
}

Scalar Scalar::operator*(const Scalar& o) const {
  Scalar a = *this, b = o;
  align(a, b);
  if (a.p_ == 0) return a;
  switch (a.kind_) {
    case Kind::Const: return of_int(a.p_, a.c_ * b.c_);
    case Kind::Ext:
      return ext(a.p_, a.k_, pmulmod(a.p_, a.ext_, b.ext_, ext_modulus(a.p_, a.k_)));
    case Kind::Rat:
      return rational(a.p_, pmul(a.p_, a.num_, b.num_), pmul(a.p_, a.den_, b.den_));
  }
  return a;
}

Scalar Scalar::invert() const {
  if (is_zero()) raise(Err::DivisionByZero, "inverse of zero");
  switch (kind_) {
    case Kind::Const: return of_int(p_, invm(p_, c_));
    case Kind::Ext: return ext(p_, k_, pinvmod(p_, ext_, ext_modulus(p_, k_)));
    case Kind::Rat: return rational(p_, den_, num_);
  }
  return *this;
}

Scalar Scalar::operator/(const Scalar& o) const { return *this * o.invert(); }

Scalar Scalar::pow(long long e) const {
  if (e < 0) return invert().pow(-e);
  CF_CHECK(p_ != 0 || e > 0, "0^0 with no field context");
  if (p_ == 0) return *this;
  Scalar r = kind_ == Kind::Ext ? ext(p_, k_, {1}) : one(p_);
  Scalar base = *this;
  while (e) {
    if (e & 1) r = r * base;
    base = base * base;
    e >>= 1;
  }
  return r;
}

bool Scalar::operator==(const Scalar& o) const { return cmp(o) == 0; }

int Scalar::cmp(const Scalar& o) const {
  // the p=0 zero equals any zero
  if (p_ == 0 || o.p_ == 0) {
    bool za = is_zero(), zb = o.is_zero();
    if (za && zb) return 0;
    if (za) return -1;
    if (zb) return 1;
  }
  if (kind_ != o.kind_) {
    // a Const can equal an Ext constant with the same residue
    if (kind_ == Kind::Const && o.kind_ == Kind::Ext && o.ext_.size() <= 1)
      return c_ == (o.ext_.empty() ? 0 : o.ext_[0]) ? 0 : (c_ < (o.ext_.empty() ? 0 : o.ext_[0]) ? -1 : 1);
    if (kind_ == Kind::Ext && o.kind_ == Kind::Const) return -o.cmp(*this);
    return int(kind_) < int(o.kind_) ? -1 : 1;
  }
  switch (kind_) {
    case Kind::Const: return c_ == o.c_ ? 0 : (c_ < o.c_ ? -1 : 1);
    case Kind::Ext: return cmp_poly(ext_, o.ext_);
    case Kind::Rat: {
      int c = cmp_poly(num_, o.num_);
      if (c) return c;
      return cmp_poly(den_, o.den_);
    }
  }
  return 0;
}

Scalar Scalar::specialize(const Scalar& value) const {
  if (kind_ != Kind::Rat) return *this;
  CF_CHECK(value.p() == p_, "specialization point has wrong characteristic");
  auto eval = [&](const Poly& poly) {
    Scalar acc = value.kind() == Kind::Ext ? Scalar::ext(p_, value.ext_degree(), {}) : Scalar::zero(p_);
    for (size_t i = poly.size(); i-- > 0;) acc = acc * value + Scalar::of_int(p_, poly[i]);
    return acc;
  };
  Scalar d = eval(den_);
  if (d.is_zero()) raise(Err::PoleAtValue, "denominator vanishes at specialization point");
  return eval(num_) / d;
}

namespace {

std::string poly_str(const Poly& poly) {
  if (poly.empty()) return "0";
  std::string out;
  for (size_t i = poly.size(); i-- > 0;) {
    if (poly[i] == 0) continue;
    if (!out.empty()) out += "+";
    if (i == 0) {
      out += std::to_string(int(poly[i]));
      continue;
    }
    if (poly[i] != 1) out += std::to_string(int(poly[i])) + "*";
    out += "a";
    for (size_t j = 1; j < i; ++j) out += "*a";
  }
  return out;
}

}  // namespace

std::string Scalar::str() const {
  switch (kind_) {
    case Kind::Const: return std::to_string(int(c_));
    case Kind::Ext: {
      std::string s = "[";
      for (size_t i = 0; i < ext_.size(); ++i) s += (i ? "," : "") + std::to_string(int(ext_[i]));
      return s + "]";
    }
    case Kind::Rat: {
      std::string n = poly_str(num_);
      if (den_.size() == 1 && den_[0] == 1) return n;
      return "(" + n + ")/(" + poly_str(den_) + ")";
    }
  }
  return "?";
}

namespace {

struct Parser {
  int p;
  const std::string& s;
  size_t i = 0;

  void skip() {
    while (i < s.size() && isspace((unsigned char)s[i])) ++i;
  }
  bool eat(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }

  Scalar expr() {
    Scalar v = term();
    for (;;) {
      skip();
      if (eat('+')) v = v + term();
      else if (eat('-')) v = v - term();
      else return v;
    }
  }
  Scalar term() {
    Scalar v = factor();
    for (;;) {
      skip();
      if (eat('*')) v = v * factor();
      else if (eat('/')) v = v / factor();
      else return v;
    }
  }
  Scalar factor() {
    skip();
    if (eat('-')) return -factor();
    if (eat('(')) {
      Scalar v = expr();
      if (!eat(')')) raise(Err::ParseError, "expected ')' in scalar: " + s);
      return v;
    }
    if (i < s.size() && s[i] == 'a') {
      ++i;
      return Scalar::param(p);
    }
    if (i < s.size() && isdigit((unsigned char)s[i])) {
      long long v = 0;
      while (i < s.size() && isdigit((unsigned char)s[i])) v = v * 10 + (s[i++] - '0');
      return Scalar::of_int(p, v);
    }
    raise(Err::ParseError, "unexpected character in scalar: " + s);
  }
};

}  // namespace

Scalar parse_scalar(int p, const std::string& text) {
  Parser ps{p, text};
  Scalar v = ps.expr();
  ps.skip();
  if (ps.i != text.size()) raise(Err::ParseError, "trailing characters in scalar: " + text);
  return v;
}

}  // namespace cf
