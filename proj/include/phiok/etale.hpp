// Etale (phi, O_K^x)- and (phi_q, O_K^x)-modules over the truncated A-model.
//
// Structure constants are kept in the split form  scalar-unit * Y^{yexp},
// with the Y-monomial exponent vector symbolic (it can be far beyond any
// expandable degree) and the unit part a truncated series in Z-coordinates.
// All module Frobenii handled here are generalized permutation matrices, so
// products never require adding elements with different symbolic exponents.

#pragma once

#include "phiok/aring.hpp"
#include "phiok/lubin_tate.hpp"
#include "phiok/weights.hpp"

namespace phiok {

// scalar * Y^{yexp} * u, u a series in Z-coordinates (usually a 1-unit)
struct AElem {
  std::array<i64, kMaxVars> yexp{};
  TL u;

  bool is_zero() const { return u.is_zero(); }
};

AElem aelem_const(const ARing& A, const FF& c);
AElem aelem_mono(const ARing& A, const std::array<i64, kMaxVars>& v, const FF& c);
AElem aelem_mul(const ARing& A, const AElem& a, const AElem& b);
AElem aelem_phi(const ARing& A, const AElem& a, u32 k = 1);
AElem aelem_inv(const ARing& A, const AElem& a);
// expand to a plain TL (throws when yexp is too large to expand)
TL aelem_expand(const ARing& A, const AElem& a);
// equality to the common knowledge window
bool aelem_eq(const ARing& A, const AElem& a, const AElem& b);
// the action of a unit on a split element whose u-part is constant
AElem aelem_act(ARing& A, const OKElem& a, const AElem& x);

class EtaleModule {
 public:
  enum Semilinearity { PHI, PHIQ };

  // one diagonal action factor: phi^{phi_twist}(base^{expo}), base either
  // f_{a,0}/phi(f_{a,0}) or f_{a,idx}
  struct ActFactor {
    enum Base { FRATIO, FA } base = FRATIO;
    u32 idx = 0;
    u32 phi_twist = 0;
    u64 expo = 0;  // Z_p exponent, residue mod p^M
  };
  // a(e_i) = scal * sigma_0(abar)^{abar_exp} * prod(factors) * e_i
  struct ActSpec {
    u64 abar_exp = 0;  // mod q-1
    FF scal{};
    std::vector<ActFactor> fac;
  };

  ARing* A = nullptr;
  Semilinearity semi = PHIQ;
  u32 rank = 0;
  std::vector<std::vector<AElem>> frob;  // frob[row][col]
  std::vector<ActSpec> act;              // diagonal O_K^x action
  std::vector<std::string> basis_names;

  u32 phi_steps() const { return semi == PHIQ ? A->f() : 1; }

  // evaluate the action entry for basis vector i as (scalar, unit series)
  TL action_series(const OKElem& a, u32 i) const;
  // apply the module Frobenius to a coefficient vector
  std::vector<AElem> apply_frob(const std::vector<AElem>& x) const;
  // psi (left inverse of the module Frobenius; PHI-semilinearity only)
  std::vector<AElem> apply_psi(const std::vector<AElem>& x) const;

  // checks
  bool is_gen_perm() const;
  bool check_etale() const;
  // phi o a = a o phi on all basis vectors; returns a witness on failure
  bool check_equivariance(const OKElem& a, std::string* witness) const;
  // membership a(e_i) in (1 + F_{q^i(1-p)} A) e_i
  bool check_action_membership(std::string* witness) const;
};

// constructors (A-model); shape as in lubin_tate.hpp
EtaleModule build_semisimple_module(ARing& A, const DKShape& shape);
EtaleModule build_DA_otimes(ARing& A, const EtaleModule& base);
EtaleModule twist_by_character(const EtaleModule& D, i64 h_chi, const FF& lam_chi);
EtaleModule dual_module(const EtaleModule& D);

// C_0 = (f/phi f)^{h} phi_q^d(C_0) fixed-point equation for the irreducible
// constructor (exact to degree N)
bool check_c0_fixed_point(ARing& A, const OKElem& a, i64 h, u32 d,
                          std::string* witness);

// trace base change to F((T)) with the Z_p^x-subaction
struct TracedModule {
  const GF* F = nullptr;
  u32 rank = 0;
  std::vector<std::vector<USeries>> frob;
};
TracedModule trace_base_change(const EtaleModule& D, i32 ncap);
// traced action entry for a in Z_p^x (a given as an O_K element with
// Z_p-coordinates)
USeries traced_action_series(const EtaleModule& D, const OKElem& a, u32 i,
                             i32 ncap);

// ---------------------------------------------------------------------------
// Main-isomorphism verifier

struct IsoCheck {
  std::string id;
  bool pass = false;
  std::string witness;
};

struct IsoWitness {
  std::vector<FF> mu;        // mu_sigma per subset J (witness assignment)
  std::vector<FF> alpha;     // alpha_J per subset J
  std::vector<std::string> diag;  // diagonal map entries, serialized
  bool solvable = false;
};

struct MainIsoOptions {
  u32 n_units = 10;
  u64 seed = 1;
  i32 perturb_b_slot = -1;  // >= 0: negative-control hook, adds 1 to b_{J0,slot}
  bool nongeneric_override = false;
};

// Verifies that E_{i_J} -> alpha_J Y^{b_J - 1} x_J^* intertwines the built
// tensor module with the dual-basis module (Frobenius exactly, the
// O_K^x-action on sampled units to degree N).
std::vector<IsoCheck> verify_main_isomorphism(ARing& A,
                                              const weights::Params& WP,
                                              const MainIsoOptions& opt,
                                              IsoWitness* witness_out);

}  // namespace phiok
