// Finite field tower F_p < F_q = F_{p^f} < F = F_{q^e}.
//
// F_q is built as F_p[x]/(m(x)) with m the first monic irreducible of degree f
// in lexicographic order, F as F_q[u]/(k(u)) with k the first irreducible of
// the form u^e - c (c a power of the chosen generator g of F_q^x), falling
// back to a lexicographic scan.  Elements of F are stored flattened over F_p:
// limb (i + f*j) is the coefficient of x^i u^j.  Elements of F_q live in the
// j = 0 block, so the embedding sigma_0 : F_q -> F is the identity on limbs
// and sigma_i = sigma_0 o (x -> x^{p^i}).

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace phiok {

using u8 = uint8_t;
using u32 = uint32_t;
using u64 = uint64_t;
using i32 = int32_t;
using i64 = int64_t;

constexpr u32 kMaxFLimbs = 8;  // supports f*e <= 8

// One element of F (or of a subfield, in the low limbs).
struct FF {
  std::array<u32, kMaxFLimbs> c{};

  bool operator==(const FF&) const = default;
};

class GF {
 public:
  GF(u32 p, u32 f, u32 e);

  u32 p() const { return p_; }
  u32 f() const { return f_; }
  u32 e() const { return e_; }
  u32 deg() const { return f_ * e_; }    // [F : F_p]
  u64 q() const { return q_; }           // p^f
  u64 order() const { return card_; }    // p^{f e}

  FF zero() const { return FF{}; }
  FF one() const;
  FF from_int(u64 n) const;  // image of n in F_p
  // Generator of F_q^x (an F_q element).
  FF gen_fq() const { return g_; }
  // Coefficients of the F_q minimal polynomial m(x) (degree f, monic; the
  // stored vector holds the lower coefficients m_0..m_{f-1}).
  const std::vector<u32>& fq_minpoly() const { return fq_min_; }

  bool is_zero(const FF& a) const;
  bool in_fq(const FF& a) const;  // lies in the j = 0 block

  FF add(const FF& a, const FF& b) const;
  FF sub(const FF& a, const FF& b) const;
  FF neg(const FF& a) const;
  FF mul(const FF& a, const FF& b) const;
  FF scal(const FF& a, u32 s) const;  // multiply by an F_p scalar
  FF inv(const FF& a) const;
  FF pow(const FF& a, i64 n) const;
  FF pow_u(const FF& a, u64 n) const;
  FF frob(const FF& a) const { return pow_u(a, p_); }  // x -> x^p
  FF frob_k(const FF& a, u32 k) const;                 // x -> x^{p^k}

  // sigma_i(a) for a in F_q: a^{p^i} placed in F.
  FF sigma(u32 i, const FF& a) const { return frob_k(a, i % f_); }
  // Norm F_q -> F_p of an F_q element, returned as an F_p residue.
  u32 norm_fq(const FF& a) const;

  // Multiplicative order (element must be nonzero).
  u64 mult_order(const FF& a) const;
  // Enumerate F_q^x as g^k.
  FF gq_pow(u64 k) const { return pow_u(g_, k); }

  // A square root of a, if one exists in F.
  bool sqrt(const FF& a, FF& out) const;

  std::string to_string(const FF& a) const;

 private:
  u32 p_, f_, e_;
  u64 q_, card_;
  std::vector<u32> fq_min_;              // m_0..m_{f-1}
  std::vector<std::vector<u32>> xred_;   // x^{f+t} mod m, t < f-1
  std::vector<FF> ured_;                 // u^{e+t} mod k, t < e-1 (F_q coeffs per limb block)
  FF g_;

  u32 padd(u32 a, u32 b) const { u32 s = a + b; return s >= p_ ? s - p_ : s; }
  u32 psub(u32 a, u32 b) const { return a >= b ? a - b : a + p_ - b; }
  u32 pmul(u32 a, u32 b) const { return u32((u64(a) * b) % p_); }

  void fq_mul_raw(const u32* a, const u32* b, u32* out) const;  // F_q block mult
  std::vector<u32> find_fq_minpoly() const;
  void find_ext();
  FF find_generator_fq() const;
};

// Trial-division factorization of a small integer.
std::vector<u64> prime_factors(u64 n);

}  // namespace phiok
