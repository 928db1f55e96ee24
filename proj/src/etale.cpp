#include "phiok/etale.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "phiok/rng.hpp"

namespace phiok {

namespace {

std::string yexp_str(const std::array<i64, kMaxVars>& v, u32 f) {
  std::ostringstream os;
  os << "Y^(";
  for (u32 i = 0; i < f; ++i) os << (i ? "," : "") << v[i];
  os << ")";
  return os.str();
}

}  // namespace

AElem aelem_const(const ARing& A, const FF& c) {
  AElem r;
  r.u = TL::constant(A.field(), Coord::Z, A.f(), A.N(), c);
  return r;
}

AElem aelem_mono(const ARing& A, const std::array<i64, kMaxVars>& v,
                 const FF& c) {
  AElem r = aelem_const(A, c);
  r.yexp = v;
  return r;
}

AElem aelem_mul(const ARing& A, const AElem& a, const AElem& b) {
  AElem r;
  for (u32 i = 0; i < kMaxVars; ++i) r.yexp[i] = a.yexp[i] + b.yexp[i];
  r.u = a.u.mul(b.u).with_cap(std::min<i32>(A.N(), std::min(a.u.cap(), b.u.cap())));
  return r;
}

AElem aelem_phi(const ARing& A, const AElem& a, u32 k) {
  AElem r;
  u32 f = A.f();
  std::array<i64, kMaxVars> v = a.yexp;
  i64 pk = 1;
  for (u32 t = 0; t < k; ++t) pk *= A.p();
  for (u32 i = 0; i < f; ++i) r.yexp[i] = pk * v[(i + k) % f];
  r.u = a.u.phi_map(k).with_cap(A.N());
  return r;
}

AElem aelem_inv(const ARing& A, const AElem& a) {
  AElem r;
  for (u32 i = 0; i < kMaxVars; ++i) r.yexp[i] = -a.yexp[i];
  r.u = a.u.inverse(A.N());
  return r;
}

TL aelem_expand(const ARing& A, const AElem& a) {
  ExpVec e{};
  for (u32 i = 0; i < A.f(); ++i) {
    if (std::llabs(a.yexp[i]) > 8 * i64(A.N()))
      throw std::domain_error("aelem_expand: exponent too large");
    e[i] = i32(a.yexp[i]);
  }
  return A.y_monomial(e).mul(a.u).with_cap(A.N());
}

bool aelem_eq(const ARing& A, const AElem& a, const AElem& b) {
  std::array<i64, kMaxVars> d{};
  bool same = true, small = true;
  for (u32 i = 0; i < A.f(); ++i) {
    d[i] = a.yexp[i] - b.yexp[i];
    same = same && d[i] == 0;
    small = small && std::llabs(d[i]) <= 8 * i64(A.N());
  }
  i32 cap = std::min(a.u.cap(), b.u.cap());
  if (same) return a.u.with_cap(cap) == b.u.with_cap(cap);
  if (!small) return false;
  ExpVec e{};
  for (u32 i = 0; i < A.f(); ++i) e[i] = i32(d[i]);
  TL lhs = a.u.mul(A.y_monomial(e)).with_cap(cap);
  return lhs == b.u.with_cap(lhs.cap()).with_cap(cap);
}

AElem aelem_act(ARing& A, const OKElem& a, const AElem& x) {
  const GF& F = A.field();
  u64 qm1 = F.q() - 1;
  AElem r;
  r.yexp = x.yexp;
  // a(Y^v) = abar^{sum p^j v_j} Y^v prod_j f_{a,j}^{-v_j}
  u64 e = 0, pw = 1;
  for (u32 j = 0; j < A.f(); ++j) {
    i64 vj = x.yexp[j] % i64(qm1);
    if (vj < 0) vj += i64(qm1);
    e = (e + u64(vj) * pw) % qm1;
    pw = (pw * F.p()) % qm1;
  }
  FF ab = F.sigma(0, A.unit(a).abar);
  TL acc = x.u.scale(F.pow_u(ab, e));
  if (!x.u.is_constant()) {
    // general elements go through the full action on the unit part
    acc = A.ok_act(a, x.u).scale(F.pow_u(ab, e));
  }
  for (u32 j = 0; j < A.f(); ++j) {
    if (!x.yexp[j]) continue;
    TL fj = A.unit_power(a, false, j, A.ok().zmod_from_signed(-x.yexp[j]));
    acc = acc.mul(fj).with_cap(A.N());
  }
  r.u = acc;
  return r;
}

TL EtaleModule::action_series(const OKElem& a, u32 i) const {
  const GF& F = A->field();
  const ActSpec& sp = act[i];
  FF ab = F.sigma(0, A->unit(a).abar);
  TL r = TL::constant(F, Coord::Z, A->f(), A->N(),
                      F.mul(sp.scal, F.pow_u(ab, sp.abar_exp % (F.q() - 1))));
  for (const ActFactor& fc : sp.fac) {
    bool fr = fc.base == ActFactor::FRATIO;
    if (fc.phi_twist) {
      // the twisted factor is trivial when p^{twist} val(base-1) >= N
      i64 scaled = A->unit_corr_val(a, fr, fc.idx);
      for (u32 t = 0; t < fc.phi_twist && scaled < A->N(); ++t) scaled *= A->p();
      if (scaled >= A->N()) continue;
    }
    TL v = A->unit_power(a, fr, fc.idx, fc.expo);
    if (fc.phi_twist) v = v.phi_map(fc.phi_twist).with_cap(A->N());
    r = r.mul(v).with_cap(A->N());
  }
  return r;
}

std::vector<AElem> EtaleModule::apply_frob(const std::vector<AElem>& x) const {
  std::vector<AElem> y(rank, aelem_const(*A, FF{}));
  u32 steps = phi_steps();
  for (u32 c = 0; c < rank; ++c) {
    if (x[c].is_zero()) continue;
    AElem px = aelem_phi(*A, x[c], steps);
    for (u32 r = 0; r < rank; ++r) {
      if (frob[r][c].is_zero()) continue;
      AElem term = aelem_mul(*A, frob[r][c], px);
      if (y[r].is_zero())
        y[r] = term;
      else {
        // generalized permutation matrices never hit this path
        TL sum = aelem_expand(*A, y[r]).add(aelem_expand(*A, term));
        y[r] = AElem{{}, sum};
      }
    }
  }
  return y;
}

std::vector<AElem> EtaleModule::apply_psi(const std::vector<AElem>& x) const {
  if (semi != PHI)
    throw std::logic_error("apply_psi: psi lives on phi-modules");
  // solve Phi w = x for the generalized permutation Phi, then ring-psi
  std::vector<AElem> w(rank, aelem_const(*A, FF{}));
  for (u32 c = 0; c < rank; ++c) {
    i32 row = -1;
    for (u32 r = 0; r < rank; ++r)
      if (!frob[r][c].is_zero()) {
        if (row >= 0) throw std::logic_error("apply_psi: not gen-perm");
        row = i32(r);
      }
    if (row < 0) throw std::logic_error("apply_psi: singular Frobenius");
    if (x[size_t(row)].is_zero()) continue;
    w[c] = aelem_mul(*A, aelem_inv(*A, frob[size_t(row)][c]), x[size_t(row)]);
  }
  std::vector<AElem> out(rank, aelem_const(*A, FF{}));
  u32 f = A->f(), p = A->p();
  for (u32 c = 0; c < rank; ++c) {
    if (w[c].is_zero()) continue;
    // psi(Y^v u) = Y^s psi(Y^rho u) with v = p delta(s) + rho
    std::array<i64, kMaxVars> v = w[c].yexp;
    ExpVec rho{};
    std::array<i64, kMaxVars> s{};
    for (u32 j = 0; j < f; ++j) {
      i64 r = ((v[j] % p) + p) % p;
      rho[j] = i32(r);
      s[(j + 1) % f] = (v[j] - r) / p;
    }
    TL inner = A->y_monomial(rho).mul(w[c].u).with_cap(A->N());
    ARing* Am = const_cast<ARing*>(A);
    AElem res;
    res.yexp = s;
    res.u = Am->psi(inner);
    out[c] = res;
  }
  return out;
}

bool EtaleModule::is_gen_perm() const {
  std::vector<bool> used(rank, false);
  for (u32 c = 0; c < rank; ++c) {
    i32 row = -1;
    for (u32 r = 0; r < rank; ++r)
      if (!frob[r][c].is_zero()) {
        if (row >= 0) return false;
        row = i32(r);
      }
    if (row < 0 || used[size_t(row)]) return false;
    used[size_t(row)] = true;
  }
  return true;
}

bool EtaleModule::check_etale() const {
  if (!is_gen_perm()) return false;
  for (u32 c = 0; c < rank; ++c)
    for (u32 r = 0; r < rank; ++r)
      if (!frob[r][c].is_zero()) {
        const TL& u = frob[r][c].u;
        if (u.is_zero()) return false;
        // unit part must be a unit: single minimal monomial
        if (u.vmin() != 0) return false;
      }
  return true;
}

bool EtaleModule::check_equivariance(const OKElem& a,
                                     std::string* witness) const {
  const GF& F = A->field();
  ARing* Am = const_cast<ARing*>(A);
  u64 qm1 = F.q() - 1;
  u32 steps = phi_steps();
  FF ab = F.sigma(0, Am->unit(a).abar);
  // factor list of the action on basis vector i (with an extra phi twist)
  auto factors_of = [&](u32 i, u32 extra_twist, FF& scal_out) {
    const ActSpec& sp = act[i];
    scal_out = F.mul(sp.scal, F.pow_u(ab, sp.abar_exp % qm1));
    std::vector<ARing::PowFactor> fac;
    for (const ActFactor& fc : sp.fac)
      fac.push_back({fc.base == ActFactor::FRATIO, fc.idx,
                     fc.phi_twist + extra_twist, fc.expo});
    return fac;
  };
  for (u32 c = 0; c < rank; ++c) {
    for (u32 r = 0; r < rank; ++r) {
      const AElem& e = frob[r][c];
      if (e.is_zero()) continue;
      if (!e.u.is_constant())
        throw std::logic_error("check_equivariance: non-monomial entry");
      // phi(a(e_c)) vs a(phi(e_c)) at row r, with Y^{v} divided out:
      // phi^{steps}(G_c) = abar^{sum p^j v_j} prod_j f_{a,j}^{-v_j} G_r
      FF sl{}, sr{};
      std::vector<ARing::PowFactor> L = factors_of(c, steps, sl);
      std::vector<ARing::PowFactor> R = factors_of(r, 0, sr);
      u64 ex = 0, pw = 1;
      for (u32 j = 0; j < A->f(); ++j) {
        i64 vj = e.yexp[j] % i64(qm1);
        if (vj < 0) vj += i64(qm1);
        ex = (ex + u64(vj) * pw) % qm1;
        pw = (pw * F.p()) % qm1;
        if (e.yexp[j])
          R.push_back({false, j, 0, A->ok().zmod_from_signed(-e.yexp[j])});
      }
      sr = F.mul(sr, F.pow_u(ab, ex));
      if (!Am->compare_power_products(a, sl, L, sr, R)) {
        if (witness) {
          std::ostringstream os;
          os << "basis " << c << " row " << r << " " << yexp_str(e.yexp, A->f())
             << ": phi(G_c) != a(Y^v)-twisted G_r";
          *witness = os.str();
        }
        return false;
      }
    }
  }
  return true;
}

bool EtaleModule::check_action_membership(std::string* witness) const {
  // the constructors install exponents with p-adic valuation >= f*i at slot
  // i, which forces a(e_i) - e_i into F_{q^i(1-p)}
  const GF& F = A->field();
  SplitMix64 rng(0x5eed);
  OKElem a = rng.unit(A->ok());
  ARing* Am = const_cast<ARing*>(A);
  (void)Am;
  for (u32 i = 0; i < rank; ++i) {
    TL g = action_series(a, i);
    TL d = g.sub(TL::one(F, Coord::Z, A->f(), g.cap()));
    if (d.is_zero()) continue;
    // find the declared level: smallest q^i(p-1) consistent with the factor
    // exponents; conservative check of (2.21): val >= p-1 always
    if (d.vmin() < i32(F.p() - 1)) {
      if (witness) {
        std::ostringstream os;
        os << "a(e_" << i << ") - e_" << i << " has valuation " << d.vmin()
           << " < p-1";
        *witness = os.str();
      }
      return false;
    }
  }
  return true;
}

EtaleModule build_semisimple_module(ARing& A, const DKShape& shape) {
  const GF& F = A.field();
  const OKRing& ok = A.ok();
  u32 f = A.f();
  EtaleModule D;
  D.A = &A;
  D.semi = EtaleModule::PHIQ;
  auto zero = aelem_const(A, FF{});
  // (Y_0/phi(Y_0))^h = Y^{h e_0 - p h e_{f-1}}
  auto ypart = [&](i64 h) {
    std::array<i64, kMaxVars> v{};
    v[0] += h;
    v[f - 1] -= i64(F.p()) * h;
    return v;
  };
  u64 qm1_modpM = (F.q() - 1) % ok.pM();
  switch (shape.kind) {
    case DKShape::CHARACTER: {
      D.rank = 1;
      D.frob.assign(1, {aelem_mono(A, ypart(shape.h), shape.lam)});
      EtaleModule::ActSpec sp;
      sp.scal = F.one();
      u64 e = ok.zmod_mul(ok.zmod_from_signed(shape.h),
                          ok.zmod_inv(ok.zmod_sub(1, F.q() % ok.pM())));
      sp.fac.push_back({EtaleModule::ActFactor::FRATIO, 0, 0, e});
      D.act = {sp};
      D.basis_names = {"e_chi"};
      break;
    }
    case DKShape::SPLIT: {
      D.rank = 2;
      D.frob.assign(2, std::vector<AElem>(2, zero));
      D.frob[0][0] = aelem_mono(A, ypart(shape.h), shape.lam0);
      D.frob[1][1] = aelem_const(A, shape.lam1);
      EtaleModule::ActSpec s0, s1;
      s0.scal = s1.scal = F.one();
      u64 e = ok.zmod_mul(ok.zmod_from_signed(shape.h),
                          ok.zmod_inv(ok.zmod_sub(1, F.q() % ok.pM())));
      s0.fac.push_back({EtaleModule::ActFactor::FRATIO, 0, 0, e});
      D.act = {s0, s1};
      D.basis_names = {"e_0", "e_1"};
      break;
    }
    case DKShape::IRRED: {
      u32 d = shape.d;
      for (u32 dp = 1; dp < d; ++dp) {
        weights::bigint qd = 1, qdp = 1;
        for (u32 t = 0; t < d; ++t) qd *= F.q();
        for (u32 t = 0; t < dp; ++t) qdp *= F.q();
        if (weights::bigint(shape.h) * (qdp - 1) % (qd - 1) == 0)
          throw std::domain_error(
              "build_semisimple_module: h has the excluded form");
      }
      D.rank = d;
      D.frob.assign(d, std::vector<AElem>(d, zero));
      for (u32 i = 0; i + 1 < d; ++i)
        D.frob[i + 1][i] = aelem_const(A, F.one());
      D.frob[0][d - 1] = aelem_mono(A, ypart(shape.h), F.pow_u(shape.lam, d));
      u64 qd = 1;
      for (u32 t = 0; t < d; ++t) qd = ok.zmod_mul(qd, F.q() % ok.pM());
      u64 den = ok.zmod_inv(ok.zmod_sub(1, qd));  // 1/(1-q^d)
      D.act.resize(d);
      u64 qi = 1;
      for (u32 i = 0; i < d; ++i) {
        D.act[i].scal = F.one();
        u64 e = ok.zmod_mul(ok.zmod_from_signed(shape.h), qi);
        e = ok.zmod_mul(e, den);
        D.act[i].fac.push_back({EtaleModule::ActFactor::FRATIO, 0, 0, e});
        D.basis_names.push_back("e_" + std::to_string(i));
        qi = ok.zmod_mul(qi, F.q() % ok.pM());
      }
      break;
    }
  }
  (void)qm1_modpM;
  return D;
}

EtaleModule build_DA_otimes(ARing& A, const EtaleModule& base) {
  if (base.semi != EtaleModule::PHIQ)
    throw std::invalid_argument("build_DA_otimes: base must be phi_q type");
  const GF& F = A.field();
  u32 f = A.f();
  u32 d = base.rank;
  u64 rank = 1;
  for (u32 j = 0; j < f; ++j) rank *= d;
  EtaleModule D;
  D.A = &A;
  D.semi = EtaleModule::PHI;
  D.rank = u32(rank);
  D.frob.assign(rank, std::vector<AElem>(rank, aelem_const(A, FF{})));
  D.act.resize(rank);
  // index = sum_j i_j d^j (slot j carries phi^{f-1-j}(e_{i_j}))
  auto digit = [&](u64 idx, u32 j) { return u32(idx / [&] { u64 s = 1; for (u32 t = 0; t < j; ++t) s *= d; return s; }()) % d; };
  for (u64 col = 0; col < rank; ++col) {
    u32 i0 = digit(col, 0);
    // phi(E_i) = sum_m frob_base[m][i0] E_{(i_1,...,i_{f-1},m)}
    u64 shifted = col / d;  // digits (i_1, ..., i_{f-1}) in low positions
    u64 dpow = 1;
    for (u32 t = 0; t + 1 < f; ++t) dpow *= d;
    for (u32 m = 0; m < d; ++m) {
      const AElem& e = base.frob[m][i0];
      if (e.is_zero()) continue;
      u64 row = shifted + u64(m) * dpow;
      D.frob[row][col] = e;
    }
    // diagonal action: prod_j phi^{f-1-j}(G_{i_j})
    EtaleModule::ActSpec sp;
    sp.scal = F.one();
    sp.abar_exp = 0;
    for (u32 j = 0; j < f; ++j) {
      const EtaleModule::ActSpec& bs = base.act[digit(col, j)];
      sp.scal = F.mul(sp.scal, bs.scal);
      sp.abar_exp = (sp.abar_exp + bs.abar_exp) % (F.q() - 1);
      for (EtaleModule::ActFactor fc : bs.fac) {
        fc.phi_twist += f - 1 - j;
        sp.fac.push_back(fc);
      }
    }
    D.act[u64(col)] = sp;
    std::ostringstream nm;
    nm << "E_(";
    for (u32 j = 0; j < f; ++j) nm << (j ? "," : "") << digit(col, j);
    nm << ")";
    D.basis_names.push_back(nm.str());
  }
  return D;
}

EtaleModule twist_by_character(const EtaleModule& D, i64 h_chi,
                               const FF& lam_chi) {
  const GF& F = D.A->field();
  EtaleModule T = D;
  for (u32 r = 0; r < D.rank; ++r)
    for (u32 c = 0; c < D.rank; ++c)
      if (!T.frob[r][c].is_zero())
        T.frob[r][c].u = T.frob[r][c].u.scale(lam_chi);
  u64 qm1 = F.q() - 1;
  i64 hm = h_chi % i64(qm1);
  if (hm < 0) hm += i64(qm1);
  for (auto& sp : T.act) sp.abar_exp = (sp.abar_exp + u64(hm)) % qm1;
  return T;
}

EtaleModule dual_module(const EtaleModule& D) {
  if (!const_cast<EtaleModule&>(D).is_gen_perm())
    throw std::invalid_argument("dual_module: generalized permutation only");
  const ARing& A = *D.A;
  const GF& F = A.field();
  EtaleModule T;
  T.A = D.A;
  T.semi = D.semi;
  T.rank = D.rank;
  T.frob.assign(D.rank, std::vector<AElem>(D.rank, aelem_const(A, FF{})));
  // Phi^dual = (Phi^{-1})^T: entry at (c, r) = inverse of entry at (r, c)
  for (u32 c = 0; c < D.rank; ++c)
    for (u32 r = 0; r < D.rank; ++r)
      if (!D.frob[r][c].is_zero())
        T.frob[c][r] = aelem_inv(A, D.frob[r][c]);
  // dual action: G^dual = (G^{-1})^T (diagonal)
  u64 qm1 = F.q() - 1;
  T.act = D.act;
  for (auto& sp : T.act) {
    sp.abar_exp = (qm1 - sp.abar_exp % qm1) % qm1;
    sp.scal = F.inv(sp.scal);
    for (auto& fc : sp.fac) fc.expo = A.ok().zmod_neg(fc.expo);
  }
  T.basis_names = D.basis_names;
  for (auto& n : T.basis_names) n += "*";
  return T;
}

bool check_c0_fixed_point(ARing& A, const OKElem& a, i64 h, u32 d,
                          std::string* witness) {
  const OKRing& ok = A.ok();
  u64 qd = 1;
  for (u32 t = 0; t < d; ++t) qd = ok.zmod_mul(qd, A.field().q() % ok.pM());
  u64 e = ok.zmod_mul(ok.zmod_from_signed(h), ok.zmod_inv(ok.zmod_sub(1, qd)));
  FF one = A.field().one();
  std::vector<ARing::PowFactor> L{{true, 0, 0, e}};
  std::vector<ARing::PowFactor> R{{true, 0, 0, ok.zmod_from_signed(h)},
                                  {true, 0, d * A.f(), e}};
  if (A.compare_power_products(a, one, L, one, R)) return true;
  if (witness) *witness = "C_0 != (f/phi f)^h phi_q^d(C_0)";
  return false;
}

TracedModule trace_base_change(const EtaleModule& D, i32 ncap) {
  const ARing& A = *D.A;
  TracedModule T;
  T.F = &A.field();
  T.rank = D.rank;
  T.frob.assign(D.rank, std::vector<USeries>(D.rank, USeries::zero(A.field(), ncap)));
  for (u32 r = 0; r < D.rank; ++r)
    for (u32 c = 0; c < D.rank; ++c) {
      const AElem& e = D.frob[r][c];
      if (e.is_zero()) continue;
      ExpVec v{};
      for (u32 i = 0; i < A.f(); ++i) {
        if (std::llabs(e.yexp[i]) > (1 << 20))
          throw std::domain_error("trace_base_change: exponent too large");
        v[i] = i32(e.yexp[i]);
      }
      USeries base = A.trace_of_y_monomial(v, ncap);
      USeries rest = A.trace_to_zp(e.u, ncap);
      T.frob[r][c] = base.mul(rest).with_cap(ncap);
    }
  return T;
}

USeries traced_action_series(const EtaleModule& D, const OKElem& a, u32 i,
                             i32 ncap) {
  ARing* A = D.A;
  TL g = D.action_series(a, i);
  return A->trace_to_zp(g, ncap);
}

// ---------------------------------------------------------------------------
// main isomorphism

std::vector<IsoCheck> verify_main_isomorphism(ARing& A,
                                              const weights::Params& WPin,
                                              const MainIsoOptions& opt,
                                              IsoWitness* witness_out) {
  std::vector<IsoCheck> out;
  const GF& F = A.field();
  const OKRing& ok = A.ok();
  u32 f = A.f(), p = A.p();
  u64 q = F.q(), qm1 = q - 1;
  if (WPin.f != f || WPin.p != p)
    throw std::invalid_argument("verify_main_isomorphism: params mismatch");
  if (A.N() < i32(2 * (p - 1) + 2))
    throw std::invalid_argument("verify_main_isomorphism: N >= 2(p-1)+2 required");
  if (auto g = weights::genericity_violation(WPin)) {
    if (!opt.nongeneric_override)
      throw std::invalid_argument("genericity violation: " + *g);
  }
  if (auto d = weights::dictionary_violation(WPin))
    throw std::invalid_argument("weight dictionary invalid: " + *d);

  // normalize det(rhobar)(p) = 1
  weights::Params WP = WPin;
  FF lam_irr{}, lam0{}, lam1{};
  if (WP.irreducible) {
    FF negone = F.neg(F.one());
    if (!F.sqrt(negone, lam_irr))
      throw std::invalid_argument("no square root of -1 in F; enlarge e");
    WP.detp = F.one();
  } else {
    FF prod = F.mul(WPin.lam0, WPin.lam1);
    FF mu2 = F.inv(prod);
    FF mu{};
    if (!F.sqrt(mu2, mu))
      throw std::invalid_argument(
          "cannot normalize det(rhobar)(p)=1 in F; enlarge e");
    lam0 = F.mul(WPin.lam0, mu);
    lam1 = F.mul(WPin.lam1, mu);
    WP.lam0 = lam0;
    WP.lam1 = lam1;
  }

  i64 h = WP.h();
  u32 nsub = 1u << f;

  // build the tensor module
  DKShape shape;
  if (WP.irreducible) {
    shape.kind = DKShape::IRRED;
    shape.d = 2;
    shape.h = h;
    shape.lam = lam_irr;
  } else {
    shape.kind = DKShape::SPLIT;
    shape.h = h;
    shape.lam0 = lam0;
    shape.lam1 = lam1;
  }
  EtaleModule base = build_semisimple_module(A, shape);
  EtaleModule D = build_DA_otimes(A, base);

  // subset <-> column index
  auto col_of = [&](u32 J) -> u32 {
    return WP.irreducible ? J : ((~J) & (nsub - 1));
  };

  // weight data per subset
  std::vector<std::vector<i64>> bJ(nsub), c1(nsub), svec(nsub);
  std::vector<u32> Jnext(nsub);
  for (u32 J = 0; J < nsub; ++J) {
    bJ[J] = weights::b_exponents(WP, J);
    if (opt.perturb_b_slot >= 0 && J == 1)
      bJ[J][u32(opt.perturb_b_slot) % f] += 1;
    c1[J] = weights::c1_vector(WP, J);
    svec[J] = weights::weight_from_subset(WP, J);
    Jnext[J] = weights::delta_subset(WP, J);
  }

  // mu witness and alpha solve, per orbit
  IsoWitness W;
  W.mu.assign(nsub, F.one());
  W.alpha.assign(nsub, F.one());
  W.solvable = true;
  std::vector<bool> seen(nsub, false);
  std::string alpha_witness;
  for (u32 J0 = 0; J0 < nsub; ++J0) {
    if (seen[J0]) continue;
    weights::Orbit orb = weights::orbit_of(WP, J0);
    FF lam_sigma = weights::lambda_sigma(WP, J0);
    for (u32 t = 0; t < orb.d; ++t) {
      seen[orb.js[t]] = true;
      W.mu[orb.js[t]] = (t + 1 == orb.d) ? F.inv(lam_sigma) : F.one();
    }
    // propagate alpha around the orbit; closure <=> solvability
    FF alpha = F.one();
    for (u32 t = 0; t < orb.d; ++t) {
      u32 J = orb.js[t];
      W.alpha[J] = alpha;
      FF eps;
      if (WP.irreducible)
        eps = (((f - 1) + ((J >> 0) & 1)) % 2) ? F.neg(F.one()) : F.one();
      else {
        eps = ((f - 1) % 2) ? F.neg(F.one()) : F.one();
        eps = F.mul(eps, F.inv(((J >> 0) & 1) ? lam0 : lam1));
      }
      alpha = F.mul(alpha, F.mul(eps, W.mu[J]));
    }
    if (!(alpha == F.one())) {
      W.solvable = false;
      alpha_witness = "orbit of J=" + std::to_string(J0) +
                      ": monodromy = " + F.to_string(alpha);
    }
  }
  out.push_back({"alpha_system_solvable", W.solvable, alpha_witness});

  // Frobenius intertwining per subset (exact monomial identity)
  for (u32 J = 0; J < nsub; ++J) {
    IsoCheck ck{"frobenius_intertwine_J" + std::to_string(J), true, ""};
    u32 col = col_of(J), rowexp = col_of(Jnext[J]);
    i32 row = -1;
    for (u32 r = 0; r < D.rank; ++r)
      if (!D.frob[r][col].is_zero()) row = i32(r);
    if (row != i32(rowexp)) {
      ck.pass = false;
      ck.witness = "tensor Frobenius does not map E_{i_J} to E_{i_J'}";
      out.push_back(ck);
      continue;
    }
    // theta_X = alpha_X Y^{b_X - 1}
    auto theta = [&](u32 X) {
      std::array<i64, kMaxVars> v{};
      for (u32 i = 0; i < f; ++i) v[i] = bJ[X][i] - 1;
      return aelem_mono(A, v, W.alpha[X]);
    };
    AElem lhs = aelem_mul(A, D.frob[size_t(rowexp)][col], theta(Jnext[J]));
    std::array<i64, kMaxVars> cv{};
    for (u32 i = 0; i < f; ++i) cv[i] = c1[J][i];
    FF sgn = ((f - 1) % 2) ? F.neg(W.mu[J]) : W.mu[J];
    AElem rhs = aelem_mul(A, aelem_phi(A, theta(J), 1), aelem_mono(A, cv, sgn));
    if (!aelem_eq(A, lhs, rhs)) {
      ck.pass = false;
      std::ostringstream os;
      os << "J=" << J << ": lhs " << yexp_str(lhs.yexp, f) << " * "
         << lhs.u.to_string() << " != rhs " << yexp_str(rhs.yexp, f) << " * "
         << rhs.u.to_string();
      ck.witness = os.str();
    }
    out.push_back(ck);
  }

  // a-action intertwining on sampled units
  SplitMix64 rng(opt.seed);
  std::vector<OKElem> units;
  for (u32 t = 0; t < opt.n_units; ++t) units.push_back(rng.unit(ok));
  // chi_sigma exponent and target zp-exponents per subset
  for (u32 J = 0; J < nsub; ++J) {
    IsoCheck ck{"action_intertwine_J" + std::to_string(J), true, ""};
    // chi exponent: (1/2)(sum p^i (r_i + s_i) + (q-1) 1_J(f-1)) mod q-1
    weights::bigint X = 0, pw = 1;
    for (u32 i = 0; i < f; ++i) {
      X += pw * (WP.r[i] + svec[J][i]);
      pw *= p;
    }
    if ((J >> (f - 1)) & 1) X += qm1;
    if (X % 2 != 0) {
      ck.pass = false;
      ck.witness = "chi_sigma exponent is odd";
      out.push_back(ck);
      continue;
    }
    weights::bigint echi_b = (X / 2) % qm1;
    u64 echi = echi_b.convert_to<u64>();
    // abar exponent of the target action:
    // N(abar) * chi^{-1} * abar^{sum p^i r_i}
    u64 eN = (qm1 / (p - 1)) % qm1;  // 1 + p + ... + p^{f-1}
    weights::bigint er_b = 0;
    pw = 1;
    for (u32 i = 0; i < f; ++i) {
      er_b += pw * WP.r[i];
      pw *= p;
    }
    u64 er = (er_b % qm1).convert_to<u64>();
    u64 target_exp = (eN + qm1 - echi + er) % qm1;
    // target zp exponents a_{d',i}/(1-p^{d'}) mod p^M
    std::vector<u64> tz(f);
    for (u32 i = 0; i < f; ++i) {
      weights::rational cf = weights::a_dprime_closed(WP, J, i);
      weights::bigint num = boost::multiprecision::numerator(cf);
      weights::bigint den = boost::multiprecision::denominator(cf);
      weights::bigint pM = ok.pM();
      if (den % p == 0)
        throw std::logic_error("target exponent denominator divisible by p");
      weights::bigint nr = num % pM;
      if (nr < 0) nr += pM;
      weights::bigint dr = den % pM;
      if (dr < 0) dr += pM;
      tz[i] = ok.zmod_mul(nr.convert_to<u64>(),
                          ok.zmod_inv(dr.convert_to<u64>()));
    }
    u32 col = col_of(J);
    // lhs factor list: the tensor action on E_{i_J}
    std::vector<ARing::PowFactor> L;
    for (const EtaleModule::ActFactor& fc : D.act[col].fac)
      L.push_back({fc.base == EtaleModule::ActFactor::FRATIO, fc.idx,
                   fc.phi_twist, fc.expo});
    // rhs: abar^{sum p^i (b_i - 1)} prod f_{a,i}^{1 - b_i} * target action
    std::vector<ARing::PowFactor> R;
    for (u32 i = 0; i < f; ++i) {
      u64 e1 = ok.zmod_from_signed(1 - bJ[J][i]);
      u64 e = ok.zmod_add(e1, tz[i]);
      if (e) R.push_back({false, i, 0, e});
    }
    weights::bigint eb_b = 0;
    pw = 1;
    for (u32 i = 0; i < f; ++i) {
      eb_b += pw * (bJ[J][i] - 1);
      pw *= p;
    }
    weights::bigint ebm = eb_b % qm1;
    if (ebm < 0) ebm += qm1;
    u64 etot = (ebm.convert_to<u64>() + target_exp) % qm1;
    for (u32 t = 0; t < units.size() && ck.pass; ++t) {
      const OKElem& a = units[t];
      FF ab = F.sigma(0, A.unit(a).abar);
      FF sl = F.mul(D.act[col].scal,
                    F.pow_u(ab, D.act[col].abar_exp % qm1));
      FF sr = F.pow_u(ab, etot);
      if (!A.compare_power_products(a, sl, L, sr, R)) {
        ck.pass = false;
        std::ostringstream os;
        os << "J=" << J << " unit #" << t
           << ": tensor action != dual-basis action";
        ck.witness = os.str();
      }
    }
    out.push_back(ck);
  }

  if (witness_out) {
    for (u32 J = 0; J < nsub; ++J) {
      std::ostringstream os;
      os << "E_" << col_of(J) << " -> alpha*" << "Y^(";
      for (u32 i = 0; i < f; ++i) os << (i ? "," : "") << bJ[J][i] - 1;
      os << ") x*_" << J;
      W.diag.push_back(os.str());
    }
    *witness_out = W;
  }
  return out;
}

}  // namespace phiok
