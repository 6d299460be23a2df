#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cartanforge/error.hpp"

namespace cf {

// Coefficient sequence mod p, lowest degree first, no trailing zeros; empty = 0.
using Poly = std::vector<uint8_t>;

struct Prime {
  int p;
  explicit Prime(int p_);
};

// Exact element of GF(p), of GF(p^k) (specialization sampling only, k <= 4),
// or of the rational-function field GF(p)(a) in the single formal parameter a.
// Canonical form: gcd(num, den) = 1, den monic; GF(p^k) coeff vector has
// degree < k. Default-constructed value is a characteristic-less zero that
// adopts the field of its first arithmetic partner.
class Scalar {
public:
  enum class Kind : uint8_t { Const, Ext, Rat };

  Scalar() : p_(0), k_(1), kind_(Kind::Const), c_(0) {}

  static Scalar zero(int p) { return of_int(p, 0); }
  static Scalar one(int p) { return of_int(p, 1); }
  static Scalar of_int(int p, long long v);
  static Scalar param(int p);                          // the generator a of GF(p)(a)
  static Scalar rational(int p, Poly num, Poly den);   // canonicalized
  static Scalar ext(int p, int k, Poly coeffs);        // element of GF(p^k)

  int p() const { return p_; }
  int ext_degree() const { return k_; }
  Kind kind() const { return kind_; }

  bool is_zero() const;
  bool is_one() const;
  bool is_const() const { return kind_ == Kind::Const; }
  bool is_param_free() const { return kind_ != Kind::Rat; }
  // Residue of a GF(p) constant (also accepts constant rational functions).
  int residue() const;

  const Poly& num() const;
  const Poly& den() const;
  const Poly& ext_coeffs() const { return ext_; }

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar operator/(const Scalar& o) const;  // DivisionByZero
  Scalar operator-() const;
  Scalar& operator+=(const Scalar& o) { return *this = *this + o; }
  Scalar& operator-=(const Scalar& o) { return *this = *this - o; }
  Scalar& operator*=(const Scalar& o) { return *this = *this * o; }

  Scalar invert() const;  // DivisionByZero
  Scalar pow(long long e) const;

  bool operator==(const Scalar& o) const;
  bool operator!=(const Scalar& o) const { return !(*this == o); }

  // Total order used for canonical forms: Const < Ext < Rat, then payload.
  int cmp(const Scalar& o) const;

  // Exact evaluation at a GF(p) or GF(p^k) point; PoleAtValue if den vanishes.
  Scalar specialize(const Scalar& value) const;

  std::string str() const;  // round-trips through parse_scalar

private:
  void canon_rat();
  static void align(Scalar& a, Scalar& b);  // adopt fields across the p=0 zero

  int p_;
  int k_;        // extension degree (1 unless Kind::Ext)
  Kind kind_;
  uint8_t c_;    // Kind::Const payload
  Poly ext_;     // Kind::Ext payload, degree < k_
  Poly num_, den_;  // Kind::Rat payload
};

// Grammar: signed integer literals, the identifier `a`, + - * /, parentheses.
Scalar parse_scalar(int p, const std::string& text);

// Monic irreducible of degree k over GF(p) (deterministic, verified at startup).
const Poly& ext_modulus(int p, int k);

// All elements of GF(p^k) in a deterministic order (lex on coeff vectors).
std::vector<Scalar> ext_field_elements(int p, int k);

}  // namespace cf
