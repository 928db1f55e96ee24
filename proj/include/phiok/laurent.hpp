// Exact truncated Laurent series over F.
//
// TL: sparse multivariate model (up to 4 variables), truncated by total
// degree: a series "known to degree N" stores exactly its monomials of total
// degree < N.  Coordinates are tagged Y/Z/T; phi and the O_K^x-action act
// through the tags (phi(Y_i) = Y_{i-1}^p, phi(Z_i) = Z_{i-1}^p,
// phi(T_i) = T_i^p, all F-linear on coefficients).
//
// USeries: dense univariate Laurent model for F((T)), used on the Lubin-Tate
// side and as the target of the trace surjection.

#pragma once

#include <functional>
#include <string>
#include <vector>

#include "phiok/gf.hpp"
#include "phiok/padic.hpp"

namespace phiok {

enum class Coord : u8 { Y, Z, T, UT };

constexpr u32 kMaxVars = 4;
using ExpVec = std::array<i32, kMaxVars>;

inline i32 expvec_deg(const ExpVec& e, u32 nv) {
  i32 d = 0;
  for (u32 i = 0; i < nv; ++i) d += e[i];
  return d;
}

struct Term {
  i32 deg;
  u64 key;
  FF c;
};

class TL {
 public:
  TL() = default;
  TL(const GF* F, Coord tag, u32 nv, i32 N)
      : F_(F), tag_(tag), nv_(nv), N_(N) {}

  static TL zero(const GF& F, Coord tag, u32 nv, i32 N) {
    return TL(&F, tag, nv, N);
  }
  static TL constant(const GF& F, Coord tag, u32 nv, i32 N, const FF& c);
  static TL one(const GF& F, Coord tag, u32 nv, i32 N) {
    return constant(F, tag, nv, N, F.one());
  }
  static TL monomial(const GF& F, Coord tag, u32 nv, i32 N, const ExpVec& e,
                     const FF& c);

  const GF& field() const { return *F_; }
  Coord tag() const { return tag_; }
  u32 nvars() const { return nv_; }
  i32 cap() const { return N_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }
  const std::vector<Term>& terms() const { return terms_; }
  bool fq_only() const { return fq_only_; }
  // minimal total degree of a stored monomial (N if zero)
  i32 vmin() const { return terms_.empty() ? N_ : terms_.front().deg; }

  static u64 pack(const ExpVec& e, u32 nv);
  static ExpVec unpack(u64 key, u32 nv);

  FF coeff(const ExpVec& e) const;
  bool is_one() const;
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].deg == 0 && terms_[0].key == pack(ExpVec{}, nv_)); }

  TL with_cap(i32 newN) const;  // drop terms with deg >= newN
  TL retag(Coord t) const;      // relabel coordinates (no arithmetic)

  TL add(const TL& o) const;
  TL sub(const TL& o) const;
  TL neg() const;
  TL scale(const FF& s) const;
  TL mul(const TL& o) const;
  // product truncated at an explicit degree cap (avoids computing the tail
  // the natural cap rule would keep)
  TL mul_capped(const TL& o, i32 ncap) const;
  // multiply by a single monomial
  TL mono_mul(const ExpVec& e, const FF& c) const;
  // x -> x^{p^k} (ring Frobenius power; exact in char p)
  TL frobenius_pow(u32 k) const;
  // phi^k with the tag's rule; coefficients unchanged (F-linear)
  TL phi_map(u32 k = 1) const;
  // inverse of phi_map (throws if not in the image)
  TL phi_inv_map() const;
  // (this)^x for x in Z/p^M via base-p digits; this must be 1 + (val >= 1).
  TL zp_power(const OKRing& ok, u64 x) const;
  // integer power of a (monomial x unit); n may be negative.
  TL pow_int(const OKRing& ok, i64 n) const;
  // inverse of c*Z^v*(1+w), val(w) >= 1; result capped at ncap
  TL inverse(i32 ncap) const;
  // substitute variable linear forms: var i := sum_j mat[i][j] * (new var j).
  // Requires polynomial support (all exponents >= 0).
  TL substitute_linear(const std::vector<std::vector<FF>>& mat,
                       Coord newtag) const;

  bool operator==(const TL& o) const;

  // sorted (exponent vector, coefficient) pairs
  std::string to_string() const;

  // builder interface
  void add_term(const ExpVec& e, const FF& c);
  void finalize();  // sort, merge, drop zeros / deg >= N

 private:
  const GF* F_ = nullptr;
  Coord tag_ = Coord::Z;
  u32 nv_ = 1;
  i32 N_ = 0;
  bool fq_only_ = true;
  std::vector<Term> terms_;  // sorted by (deg, key)

  friend class TLAccum;
};

// Open-addressing accumulator used by TL::mul.
class TLAccum {
 public:
  explicit TLAccum(size_t expect);
  void add(u64 key, i32 deg, const FF& c, const GF& F);
  void move_into(TL& out);

 private:
  struct Slot {
    u64 key;
    i32 deg;
    bool used;
    FF c;
  };
  std::vector<Slot> slots_;
  u64 mask_;
  size_t count_ = 0;
  void grow();
};

// Dense univariate Laurent series over F: sum c[i] T^{lo+i}, degrees < N.
class USeries {
 public:
  USeries() = default;
  USeries(const GF* F, i32 N) : F_(F), N_(N) {}

  static USeries zero(const GF& F, i32 N) { return USeries(&F, N); }
  static USeries one(const GF& F, i32 N);
  static USeries monomial(const GF& F, i32 N, i32 k, const FF& c);

  const GF& field() const { return *F_; }
  i32 cap() const { return N_; }
  bool is_zero() const { return c_.empty(); }
  i32 lo() const { return lo_; }
  i32 hi() const { return lo_ + i32(c_.size()); }  // one past last stored
  FF coeff(i32 k) const;
  void set_coeff(i32 k, const FF& v);
  void trim();

  USeries with_cap(i32 newN) const;
  USeries add(const USeries& o) const;
  USeries sub(const USeries& o) const;
  USeries neg() const;
  USeries scale(const FF& s) const;
  USeries mul(const USeries& o) const;
  USeries shift(i32 k) const;  // multiply by T^k
  USeries inverse(i32 ncap) const;
  USeries pow_int(const OKRing& ok, i64 n) const;
  USeries zp_power(const OKRing& ok, u64 x) const;
  USeries frobenius_pow(u32 k) const;
  // T -> T^q, coefficients unchanged
  USeries stretch(u32 q) const;
  // x(s(T)) for val(s) >= 1; if x has negative exponents s must have val 1.
  USeries compose(const USeries& s) const;

  bool operator==(const USeries& o) const;
  std::string to_string() const;

 private:
  const GF* F_ = nullptr;
  i32 N_ = 0;
  i32 lo_ = 0;
  std::vector<FF> c_;
};

}  // namespace phiok
