// The ring A as a computational object.
//
// A is the completed localization of F[[O_K]] at Y_0...Y_{f-1}; here it is
// modelled by truncated Laurent series in the Z-coordinates (Z_j is the
// linear form in the T_i = [alpha_i]-1 with the same leading form as Y_j).
// Elements produced by group-ring expansions (the Y_j themselves, a(Y_j),
// the units f_{a,j}) are expanded to total degree < N.
//
// Exact maps used throughout:
//   phi(Z_j) = Z_{j-1}^p,  phi(T_j) = T_j^p   (F-linear),
//   f_{a,i} = phi^{-1}(f_{a,i-1}^p),          Y_i = phi^{-1}(Y_{i-1}^p).

#pragma once

#include <map>
#include <memory>

#include "phiok/laurent.hpp"

namespace phiok {

// M = ceil(log_p N) + 2, the default p-adic working precision for degree N.
u32 default_precision(u32 p, i32 N);

class ARing {
 public:
  ARing(const GF& F, const OKRing& ok, i32 N);

  const GF& field() const { return F_; }
  const OKRing& ok() const { return ok_; }
  u32 p() const { return F_.p(); }
  u32 f() const { return F_.f(); }
  i32 N() const { return N_; }

  // Z_j = sum_i zmat[i][j] T_i;  T_i = sum_j tmat[i][j] Z_j.
  const std::vector<std::vector<FF>>& zmat() const { return zmat_; }
  const std::vector<std::vector<FF>>& tmat() const { return tmat_; }

  const TL& Y(u32 i) const { return Yz_[i]; }
  const TL& Y_unit(u32 i) const { return Yu_[i]; }  // Y_i / Z_i
  // Expansion of Y^v (moderate exponents only; |v_i| <= ~4N).
  TL y_monomial(const ExpVec& v) const;

  TL zero() const { return TL::zero(F_, Coord::Z, f(), N_); }
  TL one() const { return TL::one(F_, Coord::Z, f(), N_); }
  TL z_monomial(const ExpVec& v, const FF& c) const {
    return TL::monomial(F_, Coord::Z, f(), N_, v, c);
  }

  // coordinate conversions (polynomial support)
  TL t_to_z(const TL& x) const;
  TL z_to_t(const TL& x) const;

  // group element prod_j (1+T_j)^{c_j} for coordinates c in (Z/p^M)^f,
  // expanded in T-coordinates to degree < N
  TL group_elem_T(const std::vector<u64>& coords) const;

  // O_K^x-action; the per-unit cache is keyed by the element value.
  struct UnitCache {
    OKElem a;
    FF abar;                    // reduction of a (F_q block)
    std::vector<TL> aY;         // a(Y_i), Z-coords
    std::vector<TL> fa;         // f_{a,i}
    std::vector<TL> fratio;     // f_{a,0} / phi(f_{a,0}) (index 0 only)
    std::map<u32, TL> sq;       // cached (base-1)^2, key = kind*8 + idx
    std::map<std::pair<u32, i64>, TL> zpow;  // a(Z_j)^k cache
    std::vector<TL> aZ;         // a(Z_j)
  };
  UnitCache& unit(const OKElem& a);
  void drop_unit_caches() { units_.clear(); }

  TL f_a_sigma(const OKElem& a, u32 i) { return unit(a).fa[i]; }
  // f_{a,0}/phi(f_{a,0}), the base of all zp-power actions
  const TL& f_phi_ratio(const OKElem& a);
  // base^{expo} for base = f_{a,0}/phi(f_{a,0}) (fratio) or f_{a,idx},
  // with a cached square backing the quadratic fast path
  TL unit_power(const OKElem& a, bool fratio, u32 idx, u64 expo);
  // valuation of base - 1 (for skipping phi-twisted factors)
  i32 unit_corr_val(const OKElem& a, bool fratio, u32 idx);

  // One factor phi^{twist}(base^{expo}) of a product of 1-units.
  struct PowFactor {
    bool fratio = false;
    u32 idx = 0;
    u32 twist = 0;
    u64 expo = 0;
  };
  // Accumulates the factor into sum form: S += c1 v + c2 v^2, Q += c1^2 v^2
  // (only valid when every surviving v^3 term is beyond N).  Returns false
  // when the factor is not eligible for the quadratic form.
  bool power_sum_form(const OKElem& a, const PowFactor& fc, TL& S, TL& Q);
  // Compare scal_l * prod(L) with scal_r * prod(R); uses the sum form when
  // every factor is eligible, otherwise evaluates the products directly.
  bool compare_power_products(const OKElem& a, const FF& scal_l,
                              const std::vector<PowFactor>& L,
                              const FF& scal_r,
                              const std::vector<PowFactor>& R);
  // direct evaluation of scal * prod(factors), truncated at N
  TL eval_power_product(const OKElem& a, const FF& scal,
                        const std::vector<PowFactor>& fac);

  // generic action on x (Z-coords, moderate exponents)
  TL ok_act(const OKElem& a, const TL& x);
  // fast action on T-polynomial elements (group-ring route)
  TL ok_act_T(const OKElem& a, const TL& x_in_T);

  // psi: the canonical left inverse of phi (Z-coords; cap drops to ceil(N/p))
  TL psi(const TL& x);
  // psi with one nonzero representative folded into the identity component
  // (negative-control hook; wrong on purpose)
  TL psi_wrong(const TL& x, const std::vector<u32>& merged_rep);

  // mu(x) = coefficient of Z^{-1} in x * prod_j (1+T_j)^{-1}
  FF mu(const TL& x) const;
  // prod_j (1+T_j) expanded in Z-coordinates (h(Z) of the basis-independence check)
  TL h_of_z() const;

  // trace surjection A ->> F((T)): (1+T_j) -> (1+T)^{Tr(alpha_j)}
  USeries trace_to_zp(const TL& x, i32 ncap) const;
  USeries trace_of_y_monomial(const ExpVec& v, i32 ncap) const;

  // embedding F((T^{q-1})) -> A, T^{q-1} -> phi(Y_0)/Y_0
  TL recette_embed(const USeries& x) const;

  // delta_n = prod_j (1+T_j)^{i_j} (or its inverse) in Z-coordinates
  TL delta_rep(const std::vector<u32>& digits, bool inverse) const;

  // psi(Z^rho) for 0 <= rho < p componentwise (memoized)
  const TL& psi_table(const std::vector<u32>& rho);

 private:
  const GF& F_;
  const OKRing& ok_;
  i32 N_;
  std::vector<std::vector<FF>> zmat_, tmat_;
  std::vector<TL> Yz_, Yu_;
  std::vector<OKElem> teich_pow_;              // gamma^k, k < q-1
  std::vector<std::vector<u64>> teich_coords_;  // coords(gamma^k)
  std::map<std::vector<u64>, UnitCache> units_;
  std::map<u64, TL> psi_cache_;
  mutable std::vector<std::vector<USeries>> trace_pow_;  // tr(Z_j)^k cache
  mutable std::vector<u64> trace_alpha_;                 // Tr(alpha_i) mod p^M
  std::vector<u32> fact_;  // factorials mod p

  TL dense_pass(const std::vector<std::vector<u64>>& coords_per_lambda,
                u32 sigma_index) const;
  TL compute_aY0(const OKElem& a) const;
  TL make_unit_f(const TL& y, const TL& ay, const FF& scale) const;
};

}  // namespace phiok
