#include "phiok/aring.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace phiok {

u32 default_precision(u32 p, i32 N) {
  u32 m = 0;
  u64 pm = 1;
  while (pm < u64(N)) {
    pm *= p;
    ++m;
  }
  return m + 2;
}

namespace {

// inverse of a small matrix over F
std::vector<std::vector<FF>> mat_inverse(const GF& F,
                                         std::vector<std::vector<FF>> m) {
  size_t n = m.size();
  std::vector<std::vector<FF>> inv(n, std::vector<FF>(n, FF{}));
  for (size_t i = 0; i < n; ++i) inv[i][i] = F.one();
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && F.is_zero(m[piv][col])) ++piv;
    if (piv == n) throw std::runtime_error("mat_inverse: singular matrix");
    std::swap(m[piv], m[col]);
    std::swap(inv[piv], inv[col]);
    FF d = F.inv(m[col][col]);
    for (size_t j = 0; j < n; ++j) {
      m[col][j] = F.mul(m[col][j], d);
      inv[col][j] = F.mul(inv[col][j], d);
    }
    for (size_t r = 0; r < n; ++r) {
      if (r == col || F.is_zero(m[r][col])) continue;
      FF c = m[r][col];
      for (size_t j = 0; j < n; ++j) {
        m[r][j] = F.sub(m[r][j], F.mul(c, m[col][j]));
        inv[r][j] = F.sub(inv[r][j], F.mul(c, inv[col][j]));
      }
    }
  }
  return inv;
}

}  // namespace

ARing::ARing(const GF& F, const OKRing& ok, i32 N) : F_(F), ok_(ok), N_(N) {
  if (F.p() < 3) throw std::invalid_argument("ARing: requires p >= 3");
  if (F.f() > 3)
    throw std::invalid_argument("ARing: series model supports f <= 3");
  if (&ok.field() != &F) throw std::invalid_argument("ARing: field mismatch");

  fact_.assign(F.p(), 1);
  for (u32 i = 1; i < F.p(); ++i) fact_[i] = u32(u64(fact_[i - 1]) * i % F.p());

  u64 qm1 = F.q() - 1;
  teich_pow_.resize(qm1);
  teich_coords_.resize(qm1);
  OKElem gamma = ok.teichmuller(F.gen_fq());
  OKElem cur = ok.one();
  for (u64 k = 0; k < qm1; ++k) {
    teich_pow_[k] = cur;
    teich_coords_[k] = ok.basis_coords(cur);
    cur = ok.mul(cur, gamma);
  }

  // Y_0 in T-coordinates, one degree of headroom for the unit divisions
  TL y0t = dense_pass(teich_coords_, 0);

  // Z_j = sum_i a_{ij} T_i with a_{i0} the linear coefficient of T_i in Y_0
  u32 f = F.f();
  zmat_.assign(f, std::vector<FF>(f, FF{}));
  for (u32 i = 0; i < f; ++i) {
    ExpVec e{};
    e[i] = 1;
    FF a0 = y0t.coeff(e);
    for (u32 j = 0; j < f; ++j) zmat_[i][j] = F.frob_k(a0, j);
  }
  // T_i = sum_j tmat[i][j] Z_j: invert Z = A^T T
  {
    std::vector<std::vector<FF>> at(f, std::vector<FF>(f, FF{}));
    for (u32 i = 0; i < f; ++i)
      for (u32 j = 0; j < f; ++j) at[j][i] = zmat_[i][j];
    tmat_ = mat_inverse(F, at);
  }

  Yz_.resize(f);
  Yz_[0] = t_to_z(y0t);
  for (u32 i = 1; i < f; ++i)
    Yz_[i] = Yz_[i - 1].frobenius_pow(1).phi_inv_map();
  Yu_.resize(f);
  for (u32 i = 0; i < f; ++i) {
    ExpVec e{};
    e[i] = -1;
    Yu_[i] = Yz_[i].mono_mul(e, F.one());
    if (Yu_[i].vmin() != 0 || F.is_zero(Yu_[i].coeff(ExpVec{}))) {
#ifdef PHIOK_DEBUG_CTOR
      std::fprintf(stderr, "Y_%u low terms:\n", i);
      for (auto& t : Yz_[i].terms()) {
        if (t.deg > 1) break;
        ExpVec ee = TL::unpack(t.key, f);
        std::fprintf(stderr, "  deg %d (%d,%d,%d): %s\n", t.deg, ee[0], ee[1],
                     ee[2], F.to_string(t.c).c_str());
      }
#endif
      throw std::logic_error("ARing: Y_i has unexpected leading form");
    }
  }
}

TL ARing::dense_pass(const std::vector<std::vector<u64>>& cl,
                     u32 sigma_index) const {
  u32 f = F_.f(), p = F_.p();
  i32 NP = N_ + 1;  // headroom degree
  u64 qm1 = F_.q() - 1;
  size_t S;
  if (f == 1)
    S = size_t(NP);
  else if (f == 2)
    S = size_t(NP) * (NP + 1) / 2;
  else
    S = size_t(NP) * (NP + 1) * (NP + 2) / 6;

  std::vector<std::vector<u64>> plane(f, std::vector<u64>(S, 0));
  std::vector<std::vector<u32>> bt(f, std::vector<u32>(NP, 0));

  for (u64 k = 0; k < qm1; ++k) {
    for (u32 j = 0; j < f; ++j)
      for (i32 t = 0; t < NP; ++t)
        bt[j][t] = ok_.binomial_mod_p(cl[k][j], u64(t));
    // weight sigma_i(g^k)^{-1} = g^{-k p^i} in F_q
    u64 pe = 1;
    for (u32 t = 0; t < sigma_index; ++t) pe = (pe * p) % qm1;
    u64 kk = (k % qm1) * pe % qm1;
    FF w = F_.gq_pow((qm1 - kk) % qm1);
    u64 s[kMaxVars] = {0, 0, 0, 0};
    for (u32 c = 0; c < f; ++c) s[c] = w.c[c];

    size_t idx = 0;
    if (f == 1) {
      const u32* b0 = bt[0].data();
      u64* p0 = plane[0].data();
      for (i32 k0 = 0; k0 < NP; ++k0) {
        if (b0[k0]) p0[idx] += u64(b0[k0]) * s[0];
        ++idx;
      }
    } else if (f == 2) {
      const u32* b0 = bt[0].data();
      const u32* b1 = bt[1].data();
      u64* p0 = plane[0].data();
      u64* p1 = plane[1].data();
      for (i32 k0 = 0; k0 < NP; ++k0) {
        u64 w0 = b0[k0];
        for (i32 k1 = 0; k1 < NP - k0; ++k1) {
          u64 wv = (w0 * b1[k1]) % p;
          if (wv) {
            p0[idx] += wv * s[0];
            p1[idx] += wv * s[1];
          }
          ++idx;
        }
      }
    } else {
      const u32* b0 = bt[0].data();
      const u32* b1 = bt[1].data();
      const u32* b2 = bt[2].data();
      u64* p0 = plane[0].data();
      u64* p1 = plane[1].data();
      u64* p2 = plane[2].data();
      for (i32 k0 = 0; k0 < NP; ++k0) {
        u64 w0 = b0[k0];
        for (i32 k1 = 0; k1 < NP - k0; ++k1) {
          u64 w01 = (w0 * b1[k1]) % p;
          i32 lim = NP - k0 - k1;
          if (w01 == 0) {
            idx += size_t(lim);
            continue;
          }
          u64 s0 = w01 * s[0], s1 = w01 * s[1], s2 = w01 * s[2];
          for (i32 k2 = 0; k2 < lim; ++k2) {
            u64 b = b2[k2];
            if (b) {
              p0[idx] += b * s0;
              p1[idx] += b * s1;
              p2[idx] += b * s2;
            }
            ++idx;
          }
        }
      }
    }
  }

  TL out(&F_, Coord::T, f, NP);
  size_t idx = 0;
  auto emit = [&](i32 k0, i32 k1, i32 k2) {
    FF c{};
    bool nz = false;
    for (u32 l = 0; l < f; ++l) {
      c.c[l] = u32(plane[l][idx] % p);
      nz = nz || c.c[l];
    }
    if (nz) {
      ExpVec e{};
      e[0] = k0;
      if (f > 1) e[1] = k1;
      if (f > 2) e[2] = k2;
      out.add_term(e, c);
    }
    ++idx;
  };
  if (f == 1) {
    for (i32 k0 = 0; k0 < NP; ++k0) emit(k0, 0, 0);
  } else if (f == 2) {
    for (i32 k0 = 0; k0 < NP; ++k0)
      for (i32 k1 = 0; k1 < NP - k0; ++k1) emit(k0, k1, 0);
  } else {
    for (i32 k0 = 0; k0 < NP; ++k0)
      for (i32 k1 = 0; k1 < NP - k0; ++k1)
        for (i32 k2 = 0; k2 < NP - k0 - k1; ++k2) emit(k0, k1, k2);
  }
  out.finalize();
  return out;
}

TL ARing::t_to_z(const TL& x) const {
  if (x.tag() != Coord::T) throw std::invalid_argument("t_to_z: not T-coords");
  return x.substitute_linear(tmat_, Coord::Z);
}

TL ARing::z_to_t(const TL& x) const {
  if (x.tag() != Coord::Z) throw std::invalid_argument("z_to_t: not Z-coords");
  u32 f = F_.f();
  std::vector<std::vector<FF>> m(f, std::vector<FF>(f, FF{}));
  for (u32 j = 0; j < f; ++j)
    for (u32 i = 0; i < f; ++i) m[j][i] = zmat_[i][j];
  return x.substitute_linear(m, Coord::T);
}

TL ARing::group_elem_T(const std::vector<u64>& coords) const {
  u32 f = F_.f();
  i32 NP = N_ + 1;
  std::vector<std::vector<u32>> bt(f, std::vector<u32>(NP, 0));
  for (u32 j = 0; j < f; ++j)
    for (i32 t = 0; t < NP; ++t)
      bt[j][t] = ok_.binomial_mod_p(coords[j], u64(t));
  TL out(&F_, Coord::T, f, NP);
  ExpVec e{};
  if (f == 1) {
    for (i32 k0 = 0; k0 < NP; ++k0) {
      if (!bt[0][k0]) continue;
      e[0] = k0;
      out.add_term(e, F_.from_int(bt[0][k0]));
    }
  } else if (f == 2) {
    for (i32 k0 = 0; k0 < NP; ++k0) {
      if (!bt[0][k0]) continue;
      for (i32 k1 = 0; k1 < NP - k0; ++k1) {
        u32 w = u32(u64(bt[0][k0]) * bt[1][k1] % F_.p());
        if (!w) continue;
        e[0] = k0;
        e[1] = k1;
        out.add_term(e, F_.from_int(w));
      }
    }
  } else {
    for (i32 k0 = 0; k0 < NP; ++k0) {
      if (!bt[0][k0]) continue;
      for (i32 k1 = 0; k1 < NP - k0; ++k1) {
        u64 w01 = u64(bt[0][k0]) * bt[1][k1] % F_.p();
        if (!w01) continue;
        for (i32 k2 = 0; k2 < NP - k0 - k1; ++k2) {
          u32 w = u32(w01 * bt[2][k2] % F_.p());
          if (!w) continue;
          e[0] = k0;
          e[1] = k1;
          e[2] = k2;
          out.add_term(e, F_.from_int(w));
        }
      }
    }
  }
  out.finalize();
  return out;
}

TL ARing::compute_aY0(const OKElem& a) const {
  u64 qm1 = F_.q() - 1;
  std::vector<std::vector<u64>> cl(qm1);
  for (u64 k = 0; k < qm1; ++k)
    cl[k] = ok_.basis_coords(ok_.mul(a, teich_pow_[k]));
  return t_to_z(dense_pass(cl, 0));
}

TL ARing::make_unit_f(const TL& y, const TL& ay, const FF& scale) const {
  TL d = y.scale(scale).sub(ay);
  TL one = TL::one(F_, Coord::Z, F_.f(), N_);
  if (d.is_zero()) return one;
  i32 val = d.vmin();
  if (val < i32(F_.p()))
    throw std::logic_error("ARing: f_a correction has too small valuation");
  TL inv = ay.inverse(N_ - val + 1);
  return one.add(d.mul(inv).with_cap(N_));
}

ARing::UnitCache& ARing::unit(const OKElem& a) {
  auto it = units_.find(a.x);
  if (it != units_.end()) return it->second;
  if (!ok_.is_unit(a)) throw std::invalid_argument("ARing::unit: not a unit");
  UnitCache uc;
  uc.a = a;
  uc.abar = ok_.reduce(a);
  u32 f = F_.f();
  uc.aY.resize(f);
  uc.aY[0] = compute_aY0(a);
  uc.fa.resize(f);
  uc.fa[0] = make_unit_f(Yz_[0], uc.aY[0], uc.abar);
  // f_{a,i} = phi^{-1}(f_{a,i-1}^p), and a(Y_i) = phi^{-1}(a(Y_{i-1})^p)
  for (u32 i = 1; i < f; ++i) {
    uc.fa[i] = uc.fa[i - 1].frobenius_pow(1).phi_inv_map();
    uc.aY[i] = uc.aY[i - 1].frobenius_pow(1).phi_inv_map();
  }
  return units_.emplace(a.x, std::move(uc)).first->second;
}

const TL& ARing::f_phi_ratio(const OKElem& a) {
  UnitCache& uc = unit(a);
  if (uc.fratio.empty()) {
    const TL& f0 = uc.fa[0];
    if (i64(F_.p()) * (F_.p() - 1) >= N_) {
      // phi(f_{a,0}) = 1 to this degree
      uc.fratio.push_back(f0);
    } else {
      TL ph = f0.phi_map(1).with_cap(N_);
      uc.fratio.push_back(f0.mul(ph.inverse(N_)).with_cap(N_));
    }
  }
  return uc.fratio[0];
}

TL ARing::unit_power(const OKElem& a, bool fratio, u32 idx, u64 expo) {
  const TL& base = fratio ? f_phi_ratio(a) : unit(a).fa[idx];
  TL one = TL::one(F_, Coord::Z, F_.f(), base.cap());
  TL v = base.sub(one);
  if (v.is_zero() || expo == 0) return one;
  i32 val = v.vmin();
  i32 N = base.cap();
  u64 c1 = ok_.binomial_mod_p(expo, 1);
  if (i64(val) * 2 >= N) return one.add(v.scale(F_.from_int(c1)));
  if (i64(val) * 3 >= N) {
    u64 c2 = ok_.binomial_mod_p(expo, 2);
    TL r = one.add(v.scale(F_.from_int(c1)));
    if (c2) {
      u32 key = (fratio ? 0u : 8u) + idx;
      UnitCache& uc = unit(a);
      auto it = uc.sq.find(key);
      if (it == uc.sq.end())
        it = uc.sq.emplace(key, v.mul_capped(v, N)).first;
      r = r.add(it->second.scale(F_.from_int(c2)));
    }
    return r.with_cap(N);
  }
  return base.zp_power(ok_, expo);
}

i32 ARing::unit_corr_val(const OKElem& a, bool fratio, u32 idx) {
  const TL& base = fratio ? f_phi_ratio(a) : unit(a).fa[idx];
  TL v = base.sub(TL::one(F_, Coord::Z, F_.f(), base.cap()));
  return v.is_zero() ? base.cap() : v.vmin();
}

bool ARing::power_sum_form(const OKElem& a, const PowFactor& fc, TL& S, TL& Q) {
  const TL& base = fc.fratio ? f_phi_ratio(a) : unit(a).fa[fc.idx];
  TL one = TL::one(F_, Coord::Z, F_.f(), base.cap());
  TL v = base.sub(one);
  if (v.is_zero() || fc.expo == 0) return true;
  i32 val = v.vmin();
  i32 N = S.cap();
  if (fc.twist) {
    i64 scaled = val;
    for (u32 t = 0; t < fc.twist && scaled < N; ++t) scaled *= F_.p();
    if (scaled >= N) return true;  // factor is 1 to this degree
    return false;                  // genuinely twisted factor: no sum form
  }
  if (i64(val) * 3 < N) return false;
  u64 c1 = ok_.binomial_mod_p(fc.expo, 1);
  if (c1) S = S.add(v.scale(F_.from_int(u32(c1))).with_cap(N));
  if (i64(val) * 2 < N) {
    u32 key = (fc.fratio ? 0u : 8u) + fc.idx;
    UnitCache& uc = unit(a);
    auto it = uc.sq.find(key);
    if (it == uc.sq.end())
      it = uc.sq.emplace(key, v.mul_capped(v, base.cap())).first;
    u64 c2 = ok_.binomial_mod_p(fc.expo, 2);
    if (c2) S = S.add(it->second.scale(F_.from_int(u32(c2))).with_cap(N));
    u64 c1sq = c1 * c1 % F_.p();
    if (c1sq) Q = Q.add(it->second.scale(F_.from_int(u32(c1sq))).with_cap(N));
  }
  return true;
}

TL ARing::eval_power_product(const OKElem& a, const FF& scal,
                             const std::vector<PowFactor>& fac) {
  TL r = TL::constant(F_, Coord::Z, F_.f(), N_, scal);
  for (const PowFactor& fc : fac) {
    if (fc.twist) {
      i64 scaled = unit_corr_val(a, fc.fratio, fc.idx);
      for (u32 t = 0; t < fc.twist && scaled < N_; ++t) scaled *= F_.p();
      if (scaled >= N_) continue;
    }
    TL v = unit_power(a, fc.fratio, fc.idx, fc.expo);
    if (fc.twist) v = v.phi_map(fc.twist).with_cap(N_);
    r = r.mul(v).with_cap(N_);
  }
  return r;
}

bool ARing::compare_power_products(const OKElem& a, const FF& scal_l,
                                   const std::vector<PowFactor>& L,
                                   const FF& scal_r,
                                   const std::vector<PowFactor>& R) {
  if (!(scal_l == scal_r)) return false;
  TL SL = zero(), QL = zero(), SR = zero(), QR = zero();
  bool fast = true;
  for (const PowFactor& fc : L)
    if (!power_sum_form(a, fc, SL, QL)) {
      fast = false;
      break;
    }
  if (fast)
    for (const PowFactor& fc : R)
      if (!power_sum_form(a, fc, SR, QR)) {
        fast = false;
        break;
      }
  if (fast && SL == SR && QL == QR) {
    // prod(1+X_t) = 1 + S + Q with Q = (S^2 - sum X_t^2)/2; with S_L = S_R
    // the quadratic parts agree iff sum X_t^2 agree
    return true;
  }
  // mismatching sum forms are checked against the honest products
  TL lhs = eval_power_product(a, scal_l, L);
  TL rhs = eval_power_product(a, scal_r, R);
  i32 cap = std::min(lhs.cap(), rhs.cap());
  return lhs.with_cap(cap) == rhs.with_cap(cap);
}

TL ARing::ok_act(const OKElem& a, const TL& x) {
  if (x.tag() == Coord::T) return t_to_z(ok_act_T(a, x));
  if (x.tag() != Coord::Z)
    throw std::invalid_argument("ok_act: Z or T coords expected");
  UnitCache& uc = unit(a);
  u32 f = F_.f();
  if (uc.aZ.empty()) {
    uc.aZ.resize(f);
    for (u32 j = 0; j < f; ++j) {
      TL acc = TL::zero(F_, Coord::Z, f, N_ + 1);
      for (u32 i = 0; i < f; ++i) {
        if (F_.is_zero(zmat_[i][j])) continue;
        std::vector<u64> c = ok_.basis_coords(ok_.mul(a, ok_.alpha(i)));
        TL at =
            t_to_z(group_elem_T(c)).sub(TL::one(F_, Coord::Z, f, N_ + 1));
        acc = acc.add(at.scale(zmat_[i][j]));
      }
      uc.aZ[j] = acc;
    }
  }
  auto zpow = [&](u32 j, i64 k) -> const TL& {
    auto key = std::make_pair(j, k);
    auto pit = uc.zpow.find(key);
    if (pit != uc.zpow.end()) return pit->second;
    TL v = uc.aZ[j].pow_int(ok_, k);
    return uc.zpow.emplace(key, std::move(v)).first->second;
  };
  TL out = zero();
  for (const Term& t : x.terms()) {
    ExpVec e = TL::unpack(t.key, f);
    TL prod = TL::constant(F_, Coord::Z, f, N_ + 1, t.c);
    for (u32 j = 0; j < f; ++j) {
      if (!e[j]) continue;
      prod = prod.mul(zpow(j, e[j])).with_cap(N_ + 1);
    }
    out = out.add(prod.with_cap(N_));
  }
  return out.with_cap(N_);
}

TL ARing::ok_act_T(const OKElem& a, const TL& x) {
  if (x.tag() != Coord::T) throw std::invalid_argument("ok_act_T: T coords");
  u32 f = F_.f();
  // expand x in the group basis U^k = prod_j (1+T_j)^{k_j}
  std::map<std::array<i32, kMaxVars>, FF> ub;
  for (const Term& t : x.terms()) {
    ExpVec e = TL::unpack(t.key, f);
    std::vector<std::array<i32, kMaxVars>> idx{std::array<i32, kMaxVars>{}};
    std::vector<FF> co{t.c};
    for (u32 j = 0; j < f; ++j) {
      if (e[j] < 0) throw std::domain_error("ok_act_T: negative exponent");
      if (e[j] == 0) continue;
      std::vector<std::array<i32, kMaxVars>> nidx;
      std::vector<FF> nco;
      for (size_t s = 0; s < idx.size(); ++s) {
        for (i32 b = 0; b <= e[j]; ++b) {
          u32 binom = ok_.binomial_mod_p(u64(e[j]), u64(b));
          if (!binom) continue;
          FF c = F_.scal(co[s], binom);
          if ((e[j] - b) % 2) c = F_.neg(c);
          auto v = idx[s];
          v[j] += b;
          nidx.push_back(v);
          nco.push_back(c);
        }
      }
      idx = std::move(nidx);
      co = std::move(nco);
    }
    for (size_t s = 0; s < idx.size(); ++s) {
      FF& slot = ub[idx[s]];
      slot = F_.add(slot, co[s]);
    }
  }
  TL acc(&F_, Coord::T, f, x.cap());
  for (const auto& [k, c] : ub) {
    if (F_.is_zero(c)) continue;
    std::vector<u64> coords(f, 0);
    for (u32 j = 0; j < f; ++j) coords[j] = u64(k[j]);
    OKElem arg = ok_.from_coords(coords);
    std::vector<u64> ck = ok_.basis_coords(ok_.mul(a, arg));
    acc = acc.add(group_elem_T(ck).with_cap(x.cap()).scale(c));
  }
  return acc;
}

const TL& ARing::psi_table(const std::vector<u32>& rho) {
  u32 f = F_.f(), p = F_.p();
  u64 code = 0;
  for (u32 j = 0; j < f; ++j) code = code * p + rho[j];
  auto it = psi_cache_.find(code);
  if (it != psi_cache_.end()) return it->second;

  i32 bigcap = i32(f * (p - 1) + 1);
  TL resT(&F_, Coord::T, f, bigcap);
  bool allzero = true;
  for (u32 j = 0; j < f; ++j) allzero = allzero && rho[j] == 0;
  if (allzero) {
    resT = TL::one(F_, Coord::T, f, bigcap);
  } else {
    double est = 1;
    for (u32 j = 0; j < f; ++j) {
      double c = 1;
      for (u32 t = 1; t <= f; ++t) c = c * (rho[j] + t) / t;
      est *= c;
    }
    if (est > 8e7)
      throw std::domain_error(
          "psi: representative expansion too large for this (p,f)");
    std::vector<FF> srow(f, FF{});
    for (u32 j = 0; j < f; ++j)
      for (u32 i = 0; i < f; ++i) srow[j] = F_.add(srow[j], zmat_[i][j]);
    auto inv_mod_p = [&](u32 v) {
      u32 r = 1, b = v, e = p - 2;
      while (e) {
        if (e & 1) r = u32(u64(r) * b % p);
        b = u32(u64(b) * b % p);
        e >>= 1;
      }
      return r;
    };
    std::vector<u32> colsum(f, 0);
    std::map<std::vector<u32>, FF> wmap;
    std::function<void(u32, FF)> rec = [&](u32 j, FF w) {
      if (j == f) {
        bool div = true;
        for (u32 i = 0; i < f; ++i) div = div && (colsum[i] % p == 0);
        if (div) {
          std::vector<u32> key(f);
          for (u32 i = 0; i < f; ++i) key[i] = colsum[i] / p;
          FF& slot = wmap[key];
          slot = F_.add(slot, w);
        }
        return;
      }
      std::vector<u32> row(f, 0);
      std::function<void(u32, u32, FF)> rowrec = [&](u32 i, u32 used, FF wr) {
        if (i == f) {
          u32 rest = rho[j] - used;
          FF wfin = F_.scal(wr, fact_[rho[j]]);
          wfin = F_.scal(wfin, inv_mod_p(fact_[rest]));
          wfin = F_.mul(wfin, F_.pow_u(F_.neg(srow[j]), rest));
          for (u32 t = 0; t < f; ++t) colsum[t] += row[t];
          rec(j + 1, F_.mul(w, wfin));
          for (u32 t = 0; t < f; ++t) colsum[t] -= row[t];
          return;
        }
        for (u32 k = 0; k + used <= rho[j]; ++k) {
          row[i] = k;
          FF w2 = F_.scal(F_.pow_u(zmat_[i][j], k), inv_mod_p(fact_[k]));
          rowrec(i + 1, used + k, F_.mul(wr, w2));
        }
        row[i] = 0;
      };
      rowrec(0, 0, F_.one());
    };
    rec(0, F_.one());
    for (const auto& [m, w] : wmap) {
      if (F_.is_zero(w)) continue;
      std::vector<ExpVec> es{ExpVec{}};
      std::vector<FF> cs{w};
      for (u32 i = 0; i < f; ++i) {
        if (m[i] == 0) continue;
        std::vector<ExpVec> nes;
        std::vector<FF> ncs;
        for (size_t s = 0; s < es.size(); ++s)
          for (u32 b = 0; b <= m[i]; ++b) {
            u32 binom = ok_.binomial_mod_p(m[i], b);
            if (!binom) continue;
            ExpVec v = es[s];
            v[i] += i32(b);
            nes.push_back(v);
            ncs.push_back(F_.scal(cs[s], binom));
          }
        es = std::move(nes);
        cs = std::move(ncs);
      }
      for (size_t s = 0; s < es.size(); ++s) resT.add_term(es[s], cs[s]);
    }
    resT.finalize();
  }
  TL res = t_to_z(resT);
  return psi_cache_.emplace(code, std::move(res)).first->second;
}

TL ARing::psi(const TL& x) {
  if (x.tag() != Coord::Z) throw std::invalid_argument("psi: Z coords");
  u32 f = F_.f(), p = F_.p();
  i32 ncap =
      std::max<i32>(1, (x.cap() - i32(f * (p - 1)) + i32(p) - 1) / i32(p));
  TL acc(&F_, Coord::Z, f, ncap);
  for (const Term& t : x.terms()) {
    ExpVec m = TL::unpack(t.key, f);
    std::vector<u32> rho(f);
    ExpVec s{};
    for (u32 j = 0; j < f; ++j) {
      i32 r = ((m[j] % i32(p)) + i32(p)) % i32(p);
      rho[j] = u32(r);
      s[(j + 1) % f] = (m[j] - r) / i32(p);
    }
    const TL& pt = psi_table(rho);
    acc = acc.add(pt.mono_mul(s, t.c).with_cap(ncap));
  }
  return acc;
}

TL ARing::psi_wrong(const TL& x, const std::vector<u32>& merged_rep) {
  TL shifted = delta_rep(merged_rep, true).mul(x).with_cap(x.cap());
  return psi(x).add(psi(shifted));
}

FF ARing::mu(const TL& x) const {
  if (x.is_zero()) return FF{};
  u32 f = F_.f();
  i32 need = -i32(f) - x.vmin() + 1;
  if (need < 1) return FF{};  // no monomial can reach total degree -f
  // prod_j (1+T_j)^{-1} = sum_k (-1)^{|k|} T^k, converted to Z
  TL gt(&F_, Coord::T, f, need);
  std::function<void(u32, ExpVec, i32)> fill = [&](u32 j, ExpVec e, i32 left) {
    if (j == f) {
      FF c = (expvec_deg(e, f) % 2) ? F_.neg(F_.one()) : F_.one();
      gt.add_term(e, c);
      return;
    }
    for (i32 k = 0; k <= left; ++k) {
      ExpVec e2 = e;
      e2[j] = k;
      fill(j + 1, e2, left - k);
    }
  };
  fill(0, ExpVec{}, need - 1);
  gt.finalize();
  TL gz = t_to_z(gt);
  FF acc{};
  for (const Term& t : x.terms()) {
    ExpVec v = TL::unpack(t.key, f);
    ExpVec w{};
    bool in_range = true;
    for (u32 j = 0; j < f; ++j) {
      w[j] = -1 - v[j];
      if (w[j] < 0) in_range = false;
    }
    if (!in_range) continue;
    acc = F_.add(acc, F_.mul(t.c, gz.coeff(w)));
  }
  return acc;
}

TL ARing::h_of_z() const {
  u32 f = F_.f();
  TL ht(&F_, Coord::T, f, N_);
  std::function<void(u32, ExpVec)> fill = [&](u32 j, ExpVec e) {
    if (j == f) {
      ht.add_term(e, F_.one());
      return;
    }
    for (i32 k = 0; k <= 1; ++k) {
      ExpVec e2 = e;
      e2[j] = k;
      fill(j + 1, e2);
    }
  };
  fill(0, ExpVec{});
  ht.finalize();
  return t_to_z(ht);
}

USeries ARing::trace_to_zp(const TL& x, i32 ncap) const {
  u32 f = F_.f();
  if (trace_alpha_.empty()) {
    trace_alpha_.resize(f);
    for (u32 i = 0; i < f; ++i) trace_alpha_[i] = ok_.trace(ok_.alpha(i));
  }
  i32 work = ncap + 8;
  auto trz = [&](u32 j) {
    USeries r = USeries::zero(F_, work);
    for (u32 i = 0; i < f; ++i) {
      if (F_.is_zero(zmat_[i][j])) continue;
      USeries e = USeries::zero(F_, work);
      for (i32 k = 0; k < work; ++k) {
        u32 b = ok_.binomial_mod_p(trace_alpha_[i], u64(k));
        if (b) e.set_coeff(k, F_.from_int(b));
      }
      e = e.sub(USeries::one(F_, work));  // (1+T)^{t_i} - 1
      r = r.add(e.scale(zmat_[i][j]));
    }
    return r;
  };
  std::vector<USeries> base;
  const TL* src = &x;
  if (x.tag() == Coord::T) {
    for (u32 j = 0; j < f; ++j) {
      USeries e = USeries::zero(F_, work);
      for (i32 k = 0; k < work; ++k) {
        u32 b = ok_.binomial_mod_p(trace_alpha_[j], u64(k));
        if (b) e.set_coeff(k, F_.from_int(b));
      }
      base.push_back(e.sub(USeries::one(F_, work)));  // tr(T_j)
    }
  } else if (x.tag() == Coord::Z) {
    for (u32 j = 0; j < f; ++j) base.push_back(trz(j));
  } else {
    throw std::invalid_argument("trace_to_zp: Z or T coords");
  }
  USeries acc = USeries::zero(F_, ncap);
  for (const Term& t : src->terms()) {
    ExpVec v = TL::unpack(t.key, f);
    USeries prod = USeries::monomial(F_, work, 0, t.c);
    for (u32 j = 0; j < f; ++j) {
      if (!v[j]) continue;
      prod = prod.mul(base[j].pow_int(ok_, v[j])).with_cap(work);
    }
    acc = acc.add(prod.with_cap(ncap));
  }
  return acc.with_cap(ncap);
}

USeries ARing::trace_of_y_monomial(const ExpVec& v, i32 ncap) const {
  u32 f = F_.f();
  u64 qm1 = F_.q() - 1;
  if (trace_alpha_.empty()) {
    trace_alpha_.resize(f);
    for (u32 i = 0; i < f; ++i) trace_alpha_[i] = ok_.trace(ok_.alpha(i));
  }
  i32 work = ncap + 8;
  // tr(Y_i) = sum_lambda sigma_i(lambda)^{-1} (1+T)^{<c(lambda), t>}
  USeries acc = USeries::monomial(F_, work, 0, F_.one());
  for (u32 i = 0; i < f; ++i) {
    if (!v[i]) continue;
    USeries yi = USeries::zero(F_, work);
    for (u64 k = 0; k < qm1; ++k) {
      u64 ex = 0;
      for (u32 j = 0; j < f; ++j)
        ex = ok_.zmod_add(ex,
                          ok_.zmod_mul(teich_coords_[k][j], trace_alpha_[j]));
      u64 pe = 1;
      for (u32 t = 0; t < i; ++t) pe = (pe * F_.p()) % qm1;
      FF w = F_.gq_pow((qm1 - (k * pe) % qm1) % qm1);
      for (i32 d = 0; d < work; ++d) {
        u32 b = ok_.binomial_mod_p(ex, u64(d));
        if (b) yi.set_coeff(d, F_.add(yi.coeff(d), F_.scal(w, b)));
      }
    }
    yi.trim();
    acc = acc.mul(yi.pow_int(ok_, v[i])).with_cap(work);
  }
  return acc.with_cap(ncap);
}

TL ARing::recette_embed(const USeries& x) const {
  u32 f = F_.f(), p = F_.p();
  i64 qm1 = i64(F_.q()) - 1;
  // R = phi(Y_0)/Y_0 = Y_{f-1}^p Y_0^{-1}
  ExpVec rv{};
  rv[0] -= 1;
  rv[f - 1] += i32(p);
  TL R = y_monomial(rv).with_cap(N_);
  TL acc = zero();
  if (x.is_zero()) return acc;
  TL rpow = one();
  for (i32 k = 0; k < x.hi(); ++k) {
    if (k % qm1 != 0) {
      if (!F_.is_zero(x.coeff(k)))
        throw std::domain_error("recette_embed: exponent not divisible by q-1");
      continue;
    }
    FF c = x.coeff(k);
    if (!F_.is_zero(c)) acc = acc.add(rpow.scale(c).with_cap(N_));
    if (k + qm1 < x.hi()) rpow = rpow.mul(R).with_cap(N_);
  }
  if (x.lo() < 0) {
    TL Rinv = R.inverse(N_);
    rpow = Rinv;
    for (i32 k = -i32(qm1); k >= x.lo(); k -= i32(qm1)) {
      FF c = x.coeff(k);
      if (!F_.is_zero(c)) acc = acc.add(rpow.scale(c).with_cap(N_));
      if (k - qm1 >= x.lo()) rpow = rpow.mul(Rinv).with_cap(N_);
    }
    for (i32 k = x.lo(); k < 0; ++k)
      if (k % i32(qm1) != 0 && !F_.is_zero(x.coeff(k)))
        throw std::domain_error("recette_embed: exponent not divisible by q-1");
  }
  return acc;
}

TL ARing::y_monomial(const ExpVec& v) const {
  u32 f = F_.f();
  i32 d = expvec_deg(v, f);
  TL acc = TL::monomial(F_, Coord::Z, f, N_ + d, v, F_.one());
  for (u32 i = 0; i < f; ++i) {
    if (!v[i]) continue;
    if (std::abs(v[i]) > 8 * N_)
      throw std::domain_error("y_monomial: exponent too large to expand");
    acc = acc.mul(Yu_[i].pow_int(ok_, v[i])).with_cap(N_ + d);
  }
  return acc;
}

TL ARing::delta_rep(const std::vector<u32>& digits, bool inverse) const {
  u32 f = F_.f();
  std::vector<u64> coords(f);
  for (u32 j = 0; j < f; ++j)
    coords[j] = inverse ? ok_.zmod_neg(digits[j] % ok_.pM())
                        : (digits[j] % ok_.pM());
  return t_to_z(group_elem_T(coords));
}

}  // namespace phiok
