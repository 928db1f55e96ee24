// The Lubin-Tate formal group for the uniformizer p, in the coordinate whose
// logarithm is l(T) = sum_{n>=0} p^{-n} T^{q^n}.
//
// [a](T) is computed exactly as l^{-1}(a l(T)) over the unramified ring with
// big-integer coordinates and tracked p-power denominators, verified against
// the functional equation l([a](T)) = a l(T), then reduced mod p.  In this
// coordinate [zeta](T) = zeta T for Teichmueller zeta and [p](T) = T^q mod p.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include "phiok/laurent.hpp"

namespace phiok {

using bigint = boost::multiprecision::cpp_int;

class LubinTate {
 public:
  // N: output truncation degree for the mod-p series.
  LubinTate(const GF& F, const OKRing& ok, i32 N);

  const GF& field() const { return F_; }
  const OKRing& ok() const { return ok_; }
  i32 N() const { return N_; }
  u32 denom_budget() const { return B_; }

  // reduction mod p of [a](T) to degree < N, coefficients via sigma_0
  USeries action(const OKElem& a) const;
  USeries action_p() const;  // [p](T) mod p
  // f_a^LT = sigma_0(abar) T / [a](T), a unit
  USeries f_a(const OKElem& a) const;

  // the ring action a(x) = x([a](T)) on the univariate model
  USeries act_on(const OKElem& a, const USeries& x) const;

 private:
  const GF& F_;
  const OKRing& ok_;
  i32 N_;
  u32 B_;

  // scaled element of the lifted unramified ring: p^{-scale} * sum c_i x^i
  struct QOK {
    std::vector<bigint> c;
    i32 scale = 0;
  };
  std::vector<bigint> m0_;          // integer lift of the F_q minimal polynomial
  std::vector<std::vector<QOK>> ginv_pows_;  // unused cache slot
  std::vector<QOK> ell_;            // l coefficients, degree < N
  std::vector<QOK> ginv_;           // l^{-1} coefficients, degree < N

  QOK qok_zero() const;
  QOK qok_int(i64 v) const;
  QOK lift(const OKElem& a) const;
  QOK qadd(const QOK& a, const QOK& b) const;
  QOK qmul(const QOK& a, const QOK& b) const;
  QOK qscale_p(const QOK& a, i32 k) const;  // multiply by p^k
  bool qis_zero(const QOK& a) const;
  // reduce to an OKElem (throws if not integral)
  OKElem qreduce(const QOK& a) const;

  std::vector<QOK> series_mul(const std::vector<QOK>& a,
                              const std::vector<QOK>& b) const;
  std::vector<QOK> solve_action(const OKElem& a) const;
};

// Explicit Lubin-Tate (phi_q, O_K^x)-modules over F((T_{K,sigma_0})), on the
// [F_q^x]-fixed model F((T^{q-1})).
struct DKShape {
  enum Kind { CHARACTER, IRRED, SPLIT } kind;
  i64 h = 0;      // h_chi (character) or h (irred / split)
  u32 d = 1;      // dimension (irred)
  FF lam{};       // lambda_chi or lambda (irred)
  FF lam0{}, lam1{};  // split scalars
};

class DKModule {
 public:
  // Throws std::domain_error when (d, h) has the excluded shape
  // h = m (q^d-1)/(q^{d'}-1).
  DKModule(const LubinTate& lt, const DKShape& shape);

  u32 rank() const { return rank_; }
  const LubinTate& lt() const { return lt_; }
  // phi_q matrix entry (row, col): phi_q(e_col) = sum_row frob(row,col) e_row
  const USeries& frob(u32 row, u32 col) const { return frob_[row][col]; }
  // diagonal a-action: a(e_i) = (f_a^LT)^{expo_i} e_i (Z_p exponent mod p^M)
  u64 action_exponent(u32 i) const { return expo_[i]; }
  USeries action_entry(const OKElem& a, u32 i) const;

  // a(phi_q(e_i)) = phi_q(a(e_i)) for all basis vectors, exact to degree N
  bool check_commutation(const OKElem& a, std::string* witness) const;
  // determinant of the Frobenius matrix is monomial*unit with the expected
  // valuation
  bool check_etale(i64* val_out) const;

 private:
  const LubinTate& lt_;
  DKShape shape_;
  u32 rank_;
  std::vector<std::vector<USeries>> frob_;
  std::vector<u64> expo_;
};

}  // namespace phiok
