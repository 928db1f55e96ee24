// Truncated unramified p-adic arithmetic: O_K / p^M with O_K = W(F_q).
//
// Elements are stored in the power basis 1, X, ..., X^{f-1} of
// (Z/p^M)[X]/(m0(X)), where m0 is the lift of the F_q minimal polynomial with
// coefficients in [0,p).  The Z_p-basis used for coordinates is
// alpha_j = [g]^j (Teichmueller lift of the chosen generator g of F_q^x).

#pragma once

#include <optional>
#include <vector>

#include "phiok/gf.hpp"

namespace phiok {

using u128 = unsigned __int128;

struct OKElem {
  std::vector<u64> x;  // length f, residues mod p^M in the X-power basis
};

class OKRing {
 public:
  // M limited so that p^M < 2^62.
  OKRing(const GF& F, u32 M);

  const GF& field() const { return F_; }
  u32 p() const { return F_.p(); }
  u32 f() const { return F_.f(); }
  u32 M() const { return M_; }
  u64 pM() const { return pM_; }

  OKElem zero() const { return OKElem{std::vector<u64>(f(), 0)}; }
  OKElem one() const;
  OKElem from_int(u64 n) const;
  OKElem from_int_signed(i64 n) const;

  bool is_zero(const OKElem& a) const;
  OKElem add(const OKElem& a, const OKElem& b) const;
  OKElem sub(const OKElem& a, const OKElem& b) const;
  OKElem neg(const OKElem& a) const;
  OKElem mul(const OKElem& a, const OKElem& b) const;
  OKElem scal(const OKElem& a, u64 s) const;
  OKElem pow_u(OKElem a, u64 n) const;
  // Inverse of a unit (reduction mod p nonzero); throws otherwise.
  OKElem inv(const OKElem& a) const;
  bool is_unit(const OKElem& a) const;

  // Reduction mod p into F_q (as an FF in the F_q block).
  FF reduce(const OKElem& a) const;

  // Teichmueller lift of an F_q element (x^q = x, x = lambda mod p).
  OKElem teichmuller(const FF& lambda) const;

  // Coordinates in the basis alpha_j = gamma^j, gamma = [g]:
  // x = sum_j coords[j] * alpha_j with coords[j] in Z/p^M.
  std::vector<u64> basis_coords(const OKElem& a) const;
  OKElem from_coords(const std::vector<u64>& c) const;
  const OKElem& alpha(u32 j) const { return alpha_[j]; }

  // Arithmetic Frobenius phi (lift of x -> x^p); phi(gamma^j) = gamma^{pj}.
  OKElem frobenius(const OKElem& a) const;
  // Tr_{K/Qp}(a) mod p^M (sum of Frobenius conjugates; a Z/p^M scalar).
  u64 trace(const OKElem& a) const;

  // Matrix of multiplication by a in the alpha-basis (column j = coords(a*alpha_j)).
  std::vector<std::vector<u64>> mult_matrix(const OKElem& a) const;

  // binomial(x, k) mod p for any integer congruent to x mod p^M (Lucas on the
  // canonical representative).  Requires p^M > p*k (precision error otherwise).
  u32 binomial_mod_p(u64 x, u64 k) const;

  u64 zmod_add(u64 a, u64 b) const { u64 s = a + b; return s >= pM_ ? s - pM_ : s; }
  u64 zmod_sub(u64 a, u64 b) const { return a >= b ? a - b : a + pM_ - b; }
  u64 zmod_mul(u64 a, u64 b) const { return u64((u128(a) * b) % pM_); }
  u64 zmod_neg(u64 a) const { return a ? pM_ - a : 0; }
  u64 zmod_pow(u64 a, u64 n) const;
  // Inverse of a unit in Z/p^M.
  u64 zmod_inv(u64 a) const;
  u64 zmod_from_signed(i64 n) const;

 private:
  const GF& F_;
  u32 M_;
  u64 pM_;
  std::vector<u64> m0_;           // lift of fq_minpoly, length f
  OKElem gamma_;                  // [g]
  std::vector<OKElem> alpha_;     // gamma^j, j < f
  std::vector<std::vector<u64>> basis_inv_;  // inverse of the alpha-basis matrix
  std::vector<u32> binom_tab_;    // Pascal triangle mod p

  void reduce_conv(std::vector<u128>& conv, OKElem& out) const;
};

}  // namespace phiok
