#include "phiok/lubin_tate.hpp"

#include <sstream>
#include <stdexcept>

namespace phiok {

LubinTate::LubinTate(const GF& F, const OKRing& ok, i32 N)
    : F_(F), ok_(ok), N_(N) {
  if (N < 2) throw std::invalid_argument("LubinTate: N >= 2 required");
  B_ = 0;
  u64 qn = 1;
  while (qn * F.q() < u64(N)) {
    qn *= F.q();
    ++B_;
  }
  // B = max{n : q^n < N}
  if (ok.M() < B_ + 1)
    throw std::invalid_argument("LubinTate: OKRing precision below B+1");
  m0_.assign(F.f(), 0);
  if (F.f() > 1)
    for (u32 i = 0; i < F.f(); ++i) m0_[i] = F.fq_minpoly()[i];

  // l(T) = sum_{n >= 0} p^{-n} T^{q^n}, degree < N
  ell_.assign(size_t(N), qok_zero());
  u64 deg = 1;
  i32 n = 0;
  while (deg < u64(N)) {
    QOK c = qok_int(1);
    c.scale = n;
    ell_[size_t(deg)] = c;
    deg *= F.q();
    ++n;
  }

  // compositional inverse G with G(l(T)) = T, degree < N
  ginv_.assign(size_t(N), qok_zero());
  if (N > 1) ginv_[1] = qok_int(1);
  // incremental powers of l
  std::vector<std::vector<QOK>> lp;
  lp.resize(size_t(N));
  lp[1] = ell_;
  for (i32 k = 2; k < N; ++k) {
    lp[size_t(k)] = series_mul(lp[size_t(k - 1)], ell_);
    // g_k: [T^k] sum_{j<=k} g_j l^j = 0; l^k has leading coeff 1 at T^k
    QOK acc = qok_zero();
    for (i32 j = 1; j < k; ++j) {
      if (qis_zero(ginv_[size_t(j)])) continue;
      acc = qadd(acc, qmul(ginv_[size_t(j)], lp[size_t(j)][size_t(k)]));
    }
    // g_k = -acc
    for (bigint& v : acc.c) v = -v;
    ginv_[size_t(k)] = acc;
  }
}

LubinTate::QOK LubinTate::qok_zero() const {
  QOK r;
  r.c.assign(F_.f(), bigint(0));
  return r;
}

LubinTate::QOK LubinTate::qok_int(i64 v) const {
  QOK r = qok_zero();
  r.c[0] = v;
  return r;
}

LubinTate::QOK LubinTate::lift(const OKElem& a) const {
  QOK r = qok_zero();
  for (u32 i = 0; i < F_.f(); ++i) r.c[i] = bigint(a.x[i]);
  return r;
}

bool LubinTate::qis_zero(const QOK& a) const {
  for (const bigint& v : a.c)
    if (v != 0) return false;
  return true;
}

LubinTate::QOK LubinTate::qscale_p(const QOK& a, i32 k) const {
  QOK r = a;
  r.scale -= k;
  return r;
}

LubinTate::QOK LubinTate::qadd(const QOK& a, const QOK& b) const {
  // align scales
  QOK r = qok_zero();
  i32 s = std::max(a.scale, b.scale);
  bigint fa = 1, fb = 1;
  for (i32 t = a.scale; t < s; ++t) fa *= F_.p();
  for (i32 t = b.scale; t < s; ++t) fb *= F_.p();
  r.scale = s;
  for (u32 i = 0; i < F_.f(); ++i) r.c[i] = a.c[i] * fa + b.c[i] * fb;
  return r;
}

LubinTate::QOK LubinTate::qmul(const QOK& a, const QOK& b) const {
  u32 f = F_.f();
  QOK r = qok_zero();
  r.scale = a.scale + b.scale;
  if (f == 1) {
    r.c[0] = a.c[0] * b.c[0];
    return r;
  }
  std::vector<bigint> conv(2 * f, bigint(0));
  for (u32 i = 0; i < f; ++i) {
    if (a.c[i] == 0) continue;
    for (u32 j = 0; j < f; ++j) conv[i + j] += a.c[i] * b.c[j];
  }
  for (u32 k = 2 * f - 1; k-- > f;) {
    if (conv[k] == 0) continue;
    bigint c = conv[k];
    conv[k] = 0;
    for (u32 j = 0; j < f; ++j) conv[k - f + j] -= c * m0_[j];
  }
  for (u32 i = 0; i < f; ++i) r.c[i] = conv[i];
  return r;
}

OKElem LubinTate::qreduce(const QOK& a) const {
  OKElem r = ok_.zero();
  bigint pM = 1;
  for (u32 i = 0; i < ok_.M(); ++i) pM *= F_.p();
  if (a.scale > 0) {
    bigint d = 1;
    for (i32 t = 0; t < a.scale; ++t) d *= F_.p();
    for (u32 i = 0; i < F_.f(); ++i) {
      if (a.c[i] % d != 0)
        throw std::domain_error(
            "LubinTate: denominator did not clear (precision exhausted)");
      bigint v = (a.c[i] / d) % pM;
      if (v < 0) v += pM;
      r.x[i] = v.convert_to<u64>();
    }
    return r;
  }
  bigint m = 1;
  for (i32 t = a.scale; t < 0; ++t) m *= F_.p();
  for (u32 i = 0; i < F_.f(); ++i) {
    bigint v = (a.c[i] * m) % pM;
    if (v < 0) v += pM;
    r.x[i] = v.convert_to<u64>();
  }
  return r;
}

std::vector<LubinTate::QOK> LubinTate::series_mul(
    const std::vector<QOK>& a, const std::vector<QOK>& b) const {
  std::vector<QOK> r(size_t(N_), qok_zero());
  for (i32 i = 0; i < N_; ++i) {
    if (qis_zero(a[size_t(i)])) continue;
    for (i32 j = 0; i + j < N_; ++j) {
      if (qis_zero(b[size_t(j)])) continue;
      r[size_t(i + j)] =
          qadd(r[size_t(i + j)], qmul(a[size_t(i)], b[size_t(j)]));
    }
  }
  return r;
}

std::vector<LubinTate::QOK> LubinTate::solve_action(const OKElem& a) const {
  // s = a * l(T); [a] = G(s) via incremental powers of s
  std::vector<QOK> s(size_t(N_), qok_zero());
  QOK av = lift(a);
  for (i32 k = 1; k < N_; ++k)
    if (!qis_zero(ell_[size_t(k)])) s[size_t(k)] = qmul(av, ell_[size_t(k)]);
  std::vector<QOK> acc(size_t(N_), qok_zero());
  std::vector<QOK> spow = s;
  for (i32 j = 1; j < N_; ++j) {
    if (!qis_zero(ginv_[size_t(j)])) {
      for (i32 k = 0; k < N_; ++k)
        if (!qis_zero(spow[size_t(k)]))
          acc[size_t(k)] =
              qadd(acc[size_t(k)], qmul(ginv_[size_t(j)], spow[size_t(k)]));
    }
    if (j + 1 < N_) spow = series_mul(spow, s);
  }
  // functional-equation check: l([a](T)) = a l(T) to degree < N
  {
    std::vector<QOK> lhs(size_t(N_), qok_zero());
    std::vector<QOK> apow = acc;
    for (i32 j = 1; j < N_; ++j) {
      if (!qis_zero(ell_[size_t(j)])) {
        for (i32 k = 0; k < N_; ++k)
          if (!qis_zero(apow[size_t(k)]))
            lhs[size_t(k)] =
                qadd(lhs[size_t(k)], qmul(ell_[size_t(j)], apow[size_t(k)]));
      }
      if (j + 1 < N_) apow = series_mul(apow, acc);
    }
    for (i32 k = 1; k < N_; ++k) {
      QOK diff = qadd(lhs[size_t(k)], qscale_p([&] {
                        QOK t = s[size_t(k)];
                        for (bigint& v : t.c) v = -v;
                        return t;
                      }(), 0));
      // diff must vanish modulo p^{M - scale headroom}; it is exact here
      OKElem d = qreduce(diff);
      if (!ok_.is_zero(d))
        throw std::logic_error("LubinTate: functional equation failed");
    }
  }
  return acc;
}

USeries LubinTate::action(const OKElem& a) const {
  std::vector<QOK> c = solve_action(a);
  USeries r = USeries::zero(F_, N_);
  for (i32 k = 1; k < N_; ++k) {
    OKElem v = qreduce(c[size_t(k)]);
    FF red = ok_.reduce(v);  // F_q element; sigma_0 embeds as identity limbs
    if (!F_.is_zero(red)) r.set_coeff(k, red);
  }
  r.trim();
  return r;
}

USeries LubinTate::action_p() const { return action(ok_.from_int(F_.p())); }

USeries LubinTate::f_a(const OKElem& a) const {
  if (!ok_.is_unit(a)) throw std::invalid_argument("f_a: unit required");
  USeries act = action(a);
  FF abar = F_.sigma(0, ok_.reduce(a));
  USeries num = USeries::monomial(F_, N_ + 1, 1, abar);
  return num.mul(act.inverse(N_)).with_cap(N_);
}

USeries LubinTate::act_on(const OKElem& a, const USeries& x) const {
  return x.compose(action(a));
}

// ---------------------------------------------------------------------------

DKModule::DKModule(const LubinTate& lt, const DKShape& shape)
    : lt_(lt), shape_(shape) {
  const GF& F = lt.field();
  const OKRing& ok = lt.ok();
  i32 N = lt.N();
  i64 qm1 = i64(F.q()) - 1;
  auto zero = USeries::zero(F, N);
  switch (shape.kind) {
    case DKShape::CHARACTER: {
      rank_ = 1;
      frob_.assign(1, {USeries::monomial(F, N, i32(-shape.h * qm1), shape.lam)});
      expo_ = {ok.zmod_from_signed(shape.h)};
      break;
    }
    case DKShape::SPLIT: {
      rank_ = 2;
      frob_.assign(2, std::vector<USeries>(2, zero));
      frob_[0][0] = USeries::monomial(F, N, i32(-shape.h * qm1), shape.lam0);
      frob_[1][1] = USeries::monomial(F, N, 0, shape.lam1);
      expo_ = {ok.zmod_from_signed(shape.h), 0};
      break;
    }
    case DKShape::IRRED: {
      u32 d = shape.d;
      if (d < 1) throw std::invalid_argument("DKModule: d >= 1");
      // excluded form: h = m (q^d-1)/(q^{d'}-1) for some 1 <= d' < d
      for (u32 dp = 1; dp < d; ++dp) {
        bigint qd = 1, qdp = 1;
        for (u32 t = 0; t < d; ++t) qd *= F.q();
        for (u32 t = 0; t < dp; ++t) qdp *= F.q();
        if (bigint(shape.h) * (qdp - 1) % (qd - 1) == 0)
          throw std::domain_error("DKModule: h has the excluded form");
      }
      rank_ = d;
      frob_.assign(d, std::vector<USeries>(d, zero));
      for (u32 i = 0; i + 1 < d; ++i)
        frob_[i + 1][i] = USeries::one(F, N);
      frob_[0][d - 1] =
          USeries::monomial(F, N, i32(-shape.h * qm1), F.pow_u(shape.lam, d));
      // exponents h q^i (q-1)/(q^d-1) mod p^M
      u64 qdm = 1;
      for (u32 t = 0; t < d; ++t) qdm = ok.zmod_mul(qdm, F.q() % ok.pM());
      u64 den = ok.zmod_inv(ok.zmod_sub(qdm, 1));
      expo_.resize(d);
      u64 qi = 1;
      for (u32 i = 0; i < d; ++i) {
        u64 e = ok.zmod_mul(ok.zmod_from_signed(shape.h), qi);
        e = ok.zmod_mul(e, u64(qm1) % ok.pM());
        expo_[i] = ok.zmod_mul(e, den);
        qi = ok.zmod_mul(qi, F.q() % ok.pM());
      }
      break;
    }
  }
}

USeries DKModule::action_entry(const OKElem& a, u32 i) const {
  USeries fa = lt_.f_a(a);
  return fa.zp_power(lt_.ok(), expo_[i]);
}

bool DKModule::check_commutation(const OKElem& a, std::string* witness) const {
  const GF& F = lt_.field();
  i32 N = lt_.N();
  USeries act = lt_.action(a);
  USeries fa = lt_.f_a(a);
  for (u32 i = 0; i < rank_; ++i) {
    USeries gi = fa.zp_power(lt_.ok(), expo_[i]);
    for (u32 r = 0; r < rank_; ++r) {
      if (frob_[r][i].is_zero()) continue;
      // phi_q(a(e_i)) vs a(phi_q(e_i)) at row r
      USeries lhs = gi.stretch(F.q()).with_cap(N).mul(frob_[r][i]).with_cap(N);
      USeries gr = fa.zp_power(lt_.ok(), expo_[r]);
      USeries rhs = frob_[r][i].compose(act).mul(gr).with_cap(N);
      // both compared on the window where each is known
      i32 cap = std::min(lhs.cap(), rhs.cap());
      if (!(lhs.with_cap(cap) == rhs.with_cap(cap))) {
        if (witness) {
          std::ostringstream os;
          os << "commutation fails at basis " << i << " row " << r
             << ": lhs=" << lhs.to_string() << " rhs=" << rhs.to_string();
          *witness = os.str();
        }
        return false;
      }
    }
  }
  return true;
}

bool DKModule::check_etale(i64* val_out) const {
  // determinant of a generalized permutation / diagonal matrix
  const GF& F = lt_.field();
  i32 N = lt_.N();
  USeries det = USeries::one(F, N);
  // permutation structure: every column has exactly one nonzero entry
  std::vector<bool> used(rank_, false);
  for (u32 c = 0; c < rank_; ++c) {
    i32 found = -1;
    for (u32 r = 0; r < rank_; ++r) {
      if (!frob_[r][c].is_zero()) {
        if (found >= 0) return false;
        found = i32(r);
      }
    }
    if (found < 0) return false;
    if (used[size_t(found)]) return false;
    used[size_t(found)] = true;
    det = det.mul(frob_[size_t(found)][c]).with_cap(N);
  }
  if (det.is_zero()) return false;
  if (val_out) *val_out = det.lo();
  // unit: leading coefficient nonzero (guaranteed by trim)
  return true;
}

}  // namespace phiok
