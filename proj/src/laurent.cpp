#include "phiok/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace phiok {

namespace {
constexpr i32 kBias = 32768;
}

u64 TL::pack(const ExpVec& e, u32 nv) {
  u64 k = 0;
  for (u32 i = 0; i < nv; ++i) {
    i64 b = i64(e[i]) + kBias;
    if (b < 0 || b >= 65536) throw std::overflow_error("TL: exponent overflow");
    k |= u64(b) << (16 * i);
  }
  for (u32 i = nv; i < kMaxVars; ++i) k |= u64(kBias) << (16 * i);
  return k;
}

ExpVec TL::unpack(u64 key, u32 nv) {
  ExpVec e{};
  for (u32 i = 0; i < nv; ++i)
    e[i] = i32((key >> (16 * i)) & 0xffff) - kBias;
  return e;
}

TL TL::constant(const GF& F, Coord tag, u32 nv, i32 N, const FF& c) {
  TL r(&F, tag, nv, N);
  if (!F.is_zero(c) && N > 0) {
    r.terms_.push_back({0, pack(ExpVec{}, nv), c});
    r.fq_only_ = F.in_fq(c);
  }
  return r;
}

TL TL::monomial(const GF& F, Coord tag, u32 nv, i32 N, const ExpVec& e,
                const FF& c) {
  TL r(&F, tag, nv, N);
  i32 d = expvec_deg(e, nv);
  if (!F.is_zero(c) && d < N) {
    r.terms_.push_back({d, pack(e, nv), c});
    r.fq_only_ = F.in_fq(c);
  }
  return r;
}

FF TL::coeff(const ExpVec& e) const {
  u64 key = pack(e, nv_);
  i32 d = expvec_deg(e, nv_);
  auto it = std::lower_bound(
      terms_.begin(), terms_.end(), std::make_pair(d, key),
      [](const Term& t, const std::pair<i32, u64>& v) {
        return t.deg != v.first ? t.deg < v.first : t.key < v.second;
      });
  if (it != terms_.end() && it->deg == d && it->key == key) return it->c;
  return FF{};
}

bool TL::is_one() const {
  return terms_.size() == 1 && terms_[0].deg == 0 &&
         terms_[0].key == pack(ExpVec{}, nv_) && terms_[0].c == F_->one();
}

TL TL::with_cap(i32 newN) const {
  TL r(F_, tag_, nv_, newN);
  r.fq_only_ = fq_only_;
  for (const Term& t : terms_) {
    if (t.deg >= newN) break;
    r.terms_.push_back(t);
  }
  return r;
}

TL TL::retag(Coord t) const {
  TL r = *this;
  r.tag_ = t;
  return r;
}

void TL::add_term(const ExpVec& e, const FF& c) {
  if (F_->is_zero(c)) return;
  i32 d = expvec_deg(e, nv_);
  if (d >= N_) return;
  terms_.push_back({d, pack(e, nv_), c});
  fq_only_ = fq_only_ && F_->in_fq(c);
}

void TL::finalize() {
  std::sort(terms_.begin(), terms_.end(), [](const Term& a, const Term& b) {
    return a.deg != b.deg ? a.deg < b.deg : a.key < b.key;
  });
  std::vector<Term> out;
  out.reserve(terms_.size());
  for (size_t i = 0; i < terms_.size();) {
    Term t = terms_[i];
    size_t j = i + 1;
    while (j < terms_.size() && terms_[j].key == t.key &&
           terms_[j].deg == t.deg) {
      t.c = F_->add(t.c, terms_[j].c);
      ++j;
    }
    if (!F_->is_zero(t.c) && t.deg < N_) out.push_back(t);
    i = j;
  }
  terms_ = std::move(out);
  fq_only_ = true;
  for (const Term& t : terms_) fq_only_ = fq_only_ && F_->in_fq(t.c);
}

TL TL::add(const TL& o) const {
  if (tag_ != o.tag_ || nv_ != o.nv_)
    throw std::invalid_argument("TL::add: coordinate mismatch");
  TL r(F_, tag_, nv_, std::min(N_, o.N_));
  r.fq_only_ = fq_only_ && o.fq_only_;
  size_t i = 0, j = 0;
  while (i < terms_.size() || j < o.terms_.size()) {
    bool ta = j >= o.terms_.size() ||
              (i < terms_.size() &&
               (terms_[i].deg != o.terms_[j].deg
                    ? terms_[i].deg < o.terms_[j].deg
                    : terms_[i].key < o.terms_[j].key));
    bool tb = i >= terms_.size() ||
              (j < o.terms_.size() &&
               (o.terms_[j].deg != terms_[i].deg
                    ? o.terms_[j].deg < terms_[i].deg
                    : o.terms_[j].key < terms_[i].key));
    if (ta && tb) throw std::logic_error("TL::add: merge");
    if (!ta && !tb) {  // equal keys
      FF s = F_->add(terms_[i].c, o.terms_[j].c);
      if (!F_->is_zero(s) && terms_[i].deg < r.N_)
        r.terms_.push_back({terms_[i].deg, terms_[i].key, s});
      ++i;
      ++j;
    } else if (ta) {
      if (terms_[i].deg < r.N_) r.terms_.push_back(terms_[i]);
      ++i;
    } else {
      if (o.terms_[j].deg < r.N_) r.terms_.push_back(o.terms_[j]);
      ++j;
    }
  }
  return r;
}

TL TL::sub(const TL& o) const { return add(o.neg()); }

TL TL::neg() const {
  TL r = *this;
  for (Term& t : r.terms_) t.c = F_->neg(t.c);
  return r;
}

TL TL::scale(const FF& s) const {
  TL r(F_, tag_, nv_, N_);
  if (F_->is_zero(s)) return r;
  r.fq_only_ = fq_only_ && F_->in_fq(s);
  r.terms_.reserve(terms_.size());
  for (const Term& t : terms_) {
    FF c = F_->mul(t.c, s);
    if (!F_->is_zero(c)) r.terms_.push_back({t.deg, t.key, c});
  }
  return r;
}

TLAccum::TLAccum(size_t expect) {
  size_t cap = 64;
  while (cap < expect * 2) cap <<= 1;
  slots_.assign(cap, Slot{0, 0, false, FF{}});
  mask_ = cap - 1;
}

void TLAccum::grow() {
  std::vector<Slot> old = std::move(slots_);
  slots_.assign(old.size() * 2, Slot{0, 0, false, FF{}});
  mask_ = slots_.size() - 1;
  count_ = 0;
  for (const Slot& s : old) {
    if (!s.used) continue;
    u64 h = s.key * 0x9e3779b97f4a7c15ull;
    size_t i = h & mask_;
    while (slots_[i].used) i = (i + 1) & mask_;
    slots_[i] = s;
    ++count_;
  }
}

void TLAccum::add(u64 key, i32 deg, const FF& c, const GF& F) {
  u64 h = key * 0x9e3779b97f4a7c15ull;
  size_t i = h & mask_;
  while (slots_[i].used) {
    if (slots_[i].key == key) {
      slots_[i].c = F.add(slots_[i].c, c);
      return;
    }
    i = (i + 1) & mask_;
  }
  slots_[i] = Slot{key, deg, true, c};
  if (++count_ * 10 > slots_.size() * 7) grow();
}

void TLAccum::move_into(TL& out) {
  for (const Slot& s : slots_) {
    if (!s.used) continue;
    out.terms_.push_back({s.deg, s.key, s.c});
  }
  out.finalize();
}

TL TL::mul_capped(const TL& o, i32 ncap) const {
  i32 va = vmin(), vb = o.vmin();
  i32 nout = std::min(std::min(N_ + vb, o.N_ + va), ncap);
  TL r(F_, tag_, nv_, nout);
  if (terms_.empty() || o.terms_.empty()) return r;
  const TL* a = this;
  const TL* b = &o;
  if (a->terms_.size() > b->terms_.size()) std::swap(a, b);
  TLAccum acc(a->terms_.size() + b->terms_.size());
  const u64 base = pack(ExpVec{}, nv_);
  const i32 bmin = b->vmin();
  for (const Term& ta : a->terms_) {
    if (ta.deg + bmin >= nout) break;
    i32 lim = nout - ta.deg;
    for (const Term& tb : b->terms_) {
      if (tb.deg >= lim) break;
      FF c = F_->mul(ta.c, tb.c);
      if (F_->is_zero(c)) continue;
      acc.add(ta.key + tb.key - base, ta.deg + tb.deg, c, *F_);
    }
  }
  acc.move_into(r);
  return r;
}

TL TL::mul(const TL& o) const {
  if (tag_ != o.tag_ || nv_ != o.nv_)
    throw std::invalid_argument("TL::mul: coordinate mismatch");
  i32 va = vmin(), vb = o.vmin();
  i32 nout = std::min(N_ + vb, o.N_ + va);
  TL r(F_, tag_, nv_, nout);
  if (terms_.empty() || o.terms_.empty()) return r;
  const TL* a = this;
  const TL* b = &o;
  if (a->terms_.size() > b->terms_.size()) std::swap(a, b);
  TLAccum acc(a->terms_.size() + b->terms_.size());
  const u64 base = pack(ExpVec{}, nv_);
  const i32 bmin = b->vmin();
  for (const Term& ta : a->terms_) {
    if (ta.deg + bmin >= nout) break;  // terms sorted by degree
    i32 lim = nout - ta.deg;
    for (const Term& tb : b->terms_) {
      if (tb.deg >= lim) break;
      FF c = F_->mul(ta.c, tb.c);
      if (F_->is_zero(c)) continue;
      acc.add(ta.key + tb.key - base, ta.deg + tb.deg, c, *F_);
    }
  }
  acc.move_into(r);
  return r;
}

TL TL::mono_mul(const ExpVec& e, const FF& c) const {
  i32 d = expvec_deg(e, nv_);
  TL r(F_, tag_, nv_, N_ + d);
  if (F_->is_zero(c)) return r;
  r.fq_only_ = fq_only_ && F_->in_fq(c);
  for (const Term& t : terms_) {
    FF nc = F_->mul(t.c, c);
    if (F_->is_zero(nc)) continue;
    ExpVec te = unpack(t.key, nv_);
    for (u32 i = 0; i < nv_; ++i) te[i] += e[i];
    r.terms_.push_back({t.deg + d, pack(te, nv_), nc});
  }
  return r;
}

TL TL::frobenius_pow(u32 k) const {
  if (k == 0) return *this;
  i64 pk = 1;
  for (u32 i = 0; i < k; ++i) pk *= F_->p();
  // exact map: the knowledge window scales with the exponents
  i64 ncap = std::min<i64>(i64(N_) * pk, i64(1) << 24);
  TL r(F_, tag_, nv_, i32(ncap));
  r.fq_only_ = fq_only_;
  for (const Term& t : terms_) {
    if (i64(t.deg) * pk >= ncap) continue;
    ExpVec e = unpack(t.key, nv_);
    ExpVec ne{};
    for (u32 i = 0; i < nv_; ++i) ne[i] = i32(i64(e[i]) * pk);
    FF c = t.c;
    for (u32 i = 0; i < k; ++i) c = F_->frob(c);
    r.terms_.push_back({i32(i64(t.deg) * pk), pack(ne, nv_), c});
  }
  r.finalize();
  return r;
}

TL TL::phi_map(u32 k) const {
  if (k == 0) return *this;
  u32 p = F_->p();
  i64 pk = 1;
  for (u32 i = 0; i < k; ++i) pk *= p;
  i64 ncap = std::min<i64>(i64(N_) * pk, i64(1) << 24);
  TL r(F_, tag_, nv_, i32(ncap));
  r.fq_only_ = fq_only_;
  for (const Term& t : terms_) {
    if (i64(t.deg) * pk >= ncap) continue;
    ExpVec e = unpack(t.key, nv_);
    ExpVec ne{};
    for (u32 i = 0; i < nv_; ++i) {
      u32 src = (tag_ == Coord::T) ? i : u32((i + k) % nv_);
      ne[i] = i32(i64(e[src]) * pk);
    }
    r.terms_.push_back({i32(i64(t.deg) * pk), pack(ne, nv_), t.c});
  }
  r.finalize();
  return r;
}

TL TL::phi_inv_map() const {
  u32 p = F_->p();
  TL r(F_, tag_, nv_, N_ / i32(p));
  r.fq_only_ = fq_only_;
  for (const Term& t : terms_) {
    ExpVec e = unpack(t.key, nv_);
    ExpVec ne{};
    for (u32 i = 0; i < nv_; ++i) {
      // phi sends slot i+1 to slot i (times p), so the inverse shifts up
      u32 dst = (tag_ == Coord::T) ? i : u32((i + 1) % nv_);
      if (e[i] % i32(p) != 0)
        throw std::domain_error("TL::phi_inv_map: not in the image of phi");
      ne[dst] = e[i] / i32(p);
    }
    r.terms_.push_back({expvec_deg(ne, nv_), pack(ne, nv_), t.c});
  }
  r.finalize();
  return r;
}

TL TL::zp_power(const OKRing& ok, u64 x) const {
  const FF one = F_->one();
  TL v = sub(TL::constant(*F_, tag_, nv_, N_, one));
  i32 val = v.vmin();
  if (val < 1)
    throw std::domain_error("TL::zp_power: series is not a 1-unit");
  TL unit = TL::constant(*F_, tag_, nv_, N_, one);
  if (v.is_zero()) return unit;
  u64 c1 = ok.binomial_mod_p(x, 1);
  if (i64(val) * 2 >= N_) {
    return unit.add(v.scale(F_->from_int(c1)));
  }
  if (i64(val) * 3 >= N_) {
    u64 c2 = ok.binomial_mod_p(x, 2);
    TL r = unit.add(v.scale(F_->from_int(c1)));
    if (c2) r = r.add(v.mul_capped(v, N_).scale(F_->from_int(c2)));
    return r.with_cap(N_);
  }
  // digit path: (1+v)^x = prod_i ((1+v)^{p^i})^{x_i}.  Digits of x beyond
  // position M-1 are undetermined by x mod p^M, so they must be irrelevant:
  // val * p^{M} >= N.
  u64 pM = ok.pM();
  u32 p = ok.p();
  {
    u64 need = 1;
    i64 reach = val;
    while (reach < N_) {
      reach *= p;
      need *= p;
    }
    if (need > pM)
      throw std::domain_error("TL::zp_power: precision M too small");
  }
  TL result = unit;
  TL cur = *this;  // (1+v)^{p^i}
  u64 rem = x % pM;
  while (rem && !cur.is_one()) {
    u32 d = u32(rem % p);
    rem /= p;
    if (d) {
      // cur^d by square-and-multiply
      TL acc = unit;
      TL base = cur;
      u32 e = d;
      while (e) {
        if (e & 1) acc = acc.mul(base).with_cap(N_);
        e >>= 1;
        if (e) base = base.mul(base).with_cap(N_);
      }
      result = result.mul(acc).with_cap(N_);
    }
    cur = cur.frobenius_pow(1);
  }
  return result.with_cap(N_);
}

TL TL::pow_int(const OKRing& ok, i64 n) const {
  if (terms_.empty()) {
    if (n <= 0) throw std::domain_error("TL::pow_int: zero base");
    return *this;
  }
  // factor as c * Z^v * (1+w)
  const Term& lead = terms_.front();
  if (terms_.size() > 1 && terms_[1].deg == lead.deg)
    throw std::domain_error("TL::pow_int: leading form is not a monomial");
  ExpVec v = unpack(lead.key, nv_);
  FF cinv = F_->inv(lead.c);
  ExpVec negv{};
  for (u32 i = 0; i < nv_; ++i) negv[i] = -v[i];
  // unit part 1 + w; the knowledge window shifts with the leading degree
  TL u = mono_mul(negv, cinv);
  TL upow = u.zp_power(ok, ok.zmod_from_signed(n));
  ExpVec nv2{};
  for (u32 i = 0; i < nv_; ++i) {
    i64 t = i64(v[i]) * n;
    if (t < -kBias || t >= kBias) throw std::overflow_error("TL::pow_int");
    nv2[i] = i32(t);
  }
  return upow.mono_mul(nv2, F_->pow(lead.c, n));
}

TL TL::inverse(i32 ncap) const {
  if (terms_.empty()) throw std::domain_error("TL::inverse: zero");
  const Term& lead = terms_.front();
  if (terms_.size() > 1 && terms_[1].deg == lead.deg)
    throw std::domain_error("TL::inverse: leading form is not a monomial");
  ExpVec v = unpack(lead.key, nv_);
  ExpVec negv{};
  for (u32 i = 0; i < nv_; ++i) negv[i] = -v[i];
  TL u = mono_mul(negv, F_->inv(lead.c));  // 1 + w, val(w) >= 1
  ncap = std::min(ncap, u.cap());
  u = u.with_cap(ncap);
  // Newton iteration y <- y(2 - u y), precision doubling
  TL y = TL::one(*F_, tag_, nv_, ncap);
  TL two = TL::constant(*F_, tag_, nv_, ncap, F_->from_int(2));
  i32 prec = 1;
  while (prec < ncap) {
    prec = std::min(ncap, prec * 2);
    TL uy = u.with_cap(prec).mul(y.with_cap(prec)).with_cap(prec);
    y = y.with_cap(prec).mul(two.with_cap(prec).sub(uy)).with_cap(prec);
  }
  return y.mono_mul(negv, F_->inv(lead.c));
}

namespace {

// x with variable i replaced by  c_i T_i + c_j T_j  (c_i != 0), by Horner
// along variable i.  Exact; total degree is preserved by each step.
TL subst_two_term(const GF& F, const TL& x, u32 i, const FF& ci, u32 j,
                  const FF& cj) {
  u32 nv = x.nvars();
  i32 N = x.cap();
  // bucket by the exponent of variable i
  i32 maxk = 0;
  for (const Term& t : x.terms()) {
    ExpVec e = TL::unpack(t.key, nv);
    if (e[i] < 0)
      throw std::domain_error("substitute_linear: negative exponent");
    maxk = std::max(maxk, e[i]);
  }
  std::vector<TL> coef(size_t(maxk) + 1, TL::zero(F, x.tag(), nv, N));
  for (const Term& t : x.terms()) {
    ExpVec e = TL::unpack(t.key, nv);
    i32 k = e[i];
    e[i] = 0;
    coef[size_t(k)].add_term(e, t.c);
  }
  for (TL& c : coef) c.finalize();
  TL lin(&F, x.tag(), nv, N);
  {
    ExpVec e{};
    e[i] = 1;
    lin.add_term(e, ci);
    if (i != j && !F.is_zero(cj)) {
      ExpVec e2{};
      e2[j] = 1;
      lin.add_term(e2, cj);
    }
    lin.finalize();
  }
  TL res = TL::zero(F, x.tag(), nv, N);
  for (i32 k = maxk; k >= 0; --k) {
    res = res.mul(lin).with_cap(N);
    res = res.add(coef[size_t(k)]);
  }
  return res;
}

}  // namespace

TL TL::substitute_linear(const std::vector<std::vector<FF>>& mat,
                         Coord newtag) const {
  // x(T) with T_i := sum_j mat[i][j] V_j, via a factorization of the matrix
  // into elementary column operations applied by Horner.  Gauss-Jordan on M
  // with row operations R_m ... R_1 M = I gives M = R_1^{-1} ... R_m^{-1},
  // and S_M = S_{R_m^{-1}} o ... o S_{R_1^{-1}}  (S_A(x)(V) := x(A V)).
  u32 n = nv_;
  std::vector<std::vector<FF>> m = mat;
  struct Op {
    int kind;  // 0 swap(i,j), 1 scale(i, c), 2 add: row_i += c row_j
    u32 i, j;
    FF c;
  };
  std::vector<Op> ops;
  for (u32 col = 0; col < n; ++col) {
    u32 piv = col;
    while (piv < n && F_->is_zero(m[piv][col])) ++piv;
    if (piv == n)
      throw std::domain_error("substitute_linear: singular matrix");
    if (piv != col) {
      std::swap(m[piv], m[col]);
      ops.push_back({0, piv, col, FF{}});
    }
    if (!(m[col][col] == F_->one())) {
      FF d = F_->inv(m[col][col]);
      for (u32 t = 0; t < n; ++t) m[col][t] = F_->mul(m[col][t], d);
      ops.push_back({1, col, col, d});
    }
    for (u32 r = 0; r < n; ++r) {
      if (r == col || F_->is_zero(m[r][col])) continue;
      FF c = m[r][col];
      for (u32 t = 0; t < n; ++t)
        m[r][t] = F_->sub(m[r][t], F_->mul(c, m[col][t]));
      ops.push_back({2, r, col, F_->neg(c)});
    }
  }
  // apply S_{R_t^{-1}} in order t = 1..m
  TL cur = retag(newtag);
  for (const Op& op : ops) {
    if (op.kind == 0) {
      // R^{-1} = same swap: exchange variables i and j
      TL next(F_, newtag, nv_, N_);
      for (const Term& t : cur.terms()) {
        ExpVec e = unpack(t.key, nv_);
        std::swap(e[op.i], e[op.j]);
        next.add_term(e, t.c);
      }
      next.finalize();
      cur = next;
    } else if (op.kind == 1) {
      // R scales row i by d; R^{-1}: T_i -> d^{-1} T_i
      FF di = F_->inv(op.c);
      TL next(F_, newtag, nv_, N_);
      for (const Term& t : cur.terms()) {
        ExpVec e = unpack(t.key, nv_);
        FF c = F_->mul(t.c, F_->pow(di, e[op.i]));
        next.add_term(e, c);
      }
      next.finalize();
      cur = next;
    } else {
      // R adds (-c') row_j with c' = -op.c; R^{-1}: T_i -> T_i - op.c T_j
      cur = subst_two_term(*F_, cur, op.i, F_->one(), op.j, F_->neg(op.c));
    }
  }
  return cur;
}

bool TL::operator==(const TL& o) const {
  if (nv_ != o.nv_ || terms_.size() != o.terms_.size()) return false;
  for (size_t i = 0; i < terms_.size(); ++i)
    if (terms_[i].key != o.terms_[i].key || !(terms_[i].c == o.terms_[i].c))
      return false;
  return true;
}

std::string TL::to_string() const {
  std::ostringstream os;
  const char* names = tag_ == Coord::Y ? "Y" : (tag_ == Coord::Z ? "Z" : "T");
  bool first = true;
  for (const Term& t : terms_) {
    if (!first) os << " + ";
    first = false;
    os << F_->to_string(t.c);
    ExpVec e = unpack(t.key, nv_);
    for (u32 i = 0; i < nv_; ++i)
      if (e[i]) os << "*" << names << i << "^" << e[i];
  }
  if (first) os << "0";
  return os.str();
}

// ---------------------------------------------------------------------------
// USeries

USeries USeries::one(const GF& F, i32 N) {
  USeries r(&F, N);
  if (N > 0) {
    r.lo_ = 0;
    r.c_ = {F.one()};
  }
  return r;
}

USeries USeries::monomial(const GF& F, i32 N, i32 k, const FF& c) {
  USeries r(&F, N);
  if (!F.is_zero(c) && k < N) {
    r.lo_ = k;
    r.c_ = {c};
  }
  return r;
}

FF USeries::coeff(i32 k) const {
  if (k < lo_ || k >= hi()) return FF{};
  return c_[size_t(k - lo_)];
}

void USeries::set_coeff(i32 k, const FF& v) {
  if (k >= N_) return;
  if (c_.empty()) {
    lo_ = k;
    c_ = {v};
    return;
  }
  if (k < lo_) {
    c_.insert(c_.begin(), size_t(lo_ - k), FF{});
    lo_ = k;
  } else if (k >= hi()) {
    c_.resize(size_t(k - lo_ + 1), FF{});
  }
  c_[size_t(k - lo_)] = v;
}

void USeries::trim() {
  size_t b = 0;
  while (b < c_.size() && F_->is_zero(c_[b])) ++b;
  size_t e = c_.size();
  while (e > b && F_->is_zero(c_[e - 1])) --e;
  if (b == e) {
    c_.clear();
    lo_ = 0;
    return;
  }
  c_ = std::vector<FF>(c_.begin() + b, c_.begin() + e);
  lo_ += i32(b);
  while (!c_.empty() && lo_ + i32(c_.size()) > N_) c_.pop_back();
  while (!c_.empty() && F_->is_zero(c_.back())) c_.pop_back();
  if (c_.empty()) lo_ = 0;
}

USeries USeries::with_cap(i32 newN) const {
  USeries r = *this;
  r.N_ = newN;
  r.trim();
  return r;
}

USeries USeries::add(const USeries& o) const {
  USeries r(F_, std::min(N_, o.N_));
  if (is_zero()) {
    r = o;
    r.N_ = std::min(N_, o.N_);
    r.trim();
    return r;
  }
  if (o.is_zero()) {
    r = *this;
    r.N_ = std::min(N_, o.N_);
    r.trim();
    return r;
  }
  i32 l = std::min(lo_, o.lo_), h = std::max(hi(), o.hi());
  r.lo_ = l;
  r.c_.assign(size_t(h - l), FF{});
  for (i32 k = lo_; k < hi(); ++k) r.c_[size_t(k - l)] = coeff(k);
  for (i32 k = o.lo_; k < o.hi(); ++k)
    r.c_[size_t(k - l)] = F_->add(r.c_[size_t(k - l)], o.coeff(k));
  r.trim();
  return r;
}

USeries USeries::sub(const USeries& o) const { return add(o.neg()); }

USeries USeries::neg() const {
  USeries r = *this;
  for (FF& v : r.c_) v = F_->neg(v);
  return r;
}

USeries USeries::scale(const FF& s) const {
  USeries r = *this;
  for (FF& v : r.c_) v = F_->mul(v, s);
  r.trim();
  return r;
}

USeries USeries::mul(const USeries& o) const {
  i32 va = is_zero() ? N_ : lo_, vb = o.is_zero() ? o.N_ : o.lo_;
  i32 nout = std::min(N_ + vb, o.N_ + va);
  USeries r(F_, nout);
  if (is_zero() || o.is_zero()) return r;
  r.lo_ = lo_ + o.lo_;
  i32 len = std::min<i32>(i32(c_.size() + o.c_.size()) - 1, nout - r.lo_);
  if (len <= 0) return USeries(F_, nout);
  r.c_.assign(size_t(len), FF{});
  for (size_t i = 0; i < c_.size(); ++i) {
    if (F_->is_zero(c_[i])) continue;
    size_t jmax = std::min(o.c_.size(), size_t(len) - std::min(size_t(len), i));
    (void)jmax;
    for (size_t j = 0; j < o.c_.size(); ++j) {
      if (i + j >= size_t(len)) break;
      r.c_[i + j] = F_->add(r.c_[i + j], F_->mul(c_[i], o.c_[j]));
    }
  }
  r.trim();
  return r;
}

USeries USeries::shift(i32 k) const {
  USeries r = *this;
  r.lo_ += k;
  r.N_ += k;
  return r;
}

USeries USeries::inverse(i32 ncap) const {
  if (is_zero()) throw std::domain_error("USeries::inverse: zero");
  // lead must be nonzero (it is, after trim)
  i32 v = lo_;
  FF cinv = F_->inv(c_[0]);
  ncap = std::min(ncap, N_ - v);
  USeries u = shift(-v).scale(cinv).with_cap(ncap);  // 1 + w
  USeries y = USeries::one(*F_, ncap);
  USeries two = USeries::monomial(*F_, ncap, 0, F_->from_int(2));
  i32 prec = 1;
  while (prec < ncap) {
    prec = std::min(ncap, prec * 2);
    USeries uy = u.with_cap(prec).mul(y.with_cap(prec)).with_cap(prec);
    y = y.with_cap(prec).mul(two.with_cap(prec).sub(uy)).with_cap(prec);
  }
  return y.shift(-v).scale(cinv).with_cap(ncap - v);
}

USeries USeries::pow_int(const OKRing& ok, i64 n) const {
  if (is_zero()) {
    if (n <= 0) throw std::domain_error("USeries::pow_int: zero base");
    return *this;
  }
  i32 v = lo_;
  FF lead = c_[0];
  USeries u = shift(-v).scale(F_->inv(lead)).with_cap(N_ - v);
  USeries up = u.zp_power(ok, ok.zmod_from_signed(n));
  i64 nk = i64(v) * n;
  if (std::abs(nk) > (1 << 28)) throw std::overflow_error("USeries::pow_int");
  return up.shift(i32(nk)).scale(F_->pow(lead, n));
}

USeries USeries::zp_power(const OKRing& ok, u64 x) const {
  USeries v = sub(USeries::one(*F_, N_));
  if (!v.is_zero() && v.lo_ < 1)
    throw std::domain_error("USeries::zp_power: not a 1-unit");
  USeries unit = USeries::one(*F_, N_);
  if (v.is_zero()) return unit;
  i32 val = v.lo_;
  u32 p = ok.p();
  {
    u64 need = 1;
    i64 reach = val;
    while (reach < N_) {
      reach *= p;
      need *= p;
    }
    if (need > ok.pM())
      throw std::domain_error("USeries::zp_power: precision M too small");
  }
  USeries result = unit;
  USeries cur = *this;
  u64 rem = x % ok.pM();
  while (rem && !(cur == unit)) {
    u32 d = u32(rem % p);
    rem /= p;
    if (d) {
      USeries acc = unit, base = cur;
      u32 e = d;
      while (e) {
        if (e & 1) acc = acc.mul(base).with_cap(N_);
        e >>= 1;
        if (e) base = base.mul(base).with_cap(N_);
      }
      result = result.mul(acc).with_cap(N_);
    }
    cur = cur.frobenius_pow(1);
  }
  return result.with_cap(N_);
}

USeries USeries::frobenius_pow(u32 k) const {
  if (k == 0) return *this;
  i64 pk = 1;
  for (u32 i = 0; i < k; ++i) pk *= F_->p();
  USeries r(F_, N_);
  for (i32 t = lo_; t < hi(); ++t) {
    FF c = coeff(t);
    if (F_->is_zero(c)) continue;
    for (u32 i = 0; i < k; ++i) c = F_->frob(c);
    i64 nk = i64(t) * pk;
    if (nk < N_) r.set_coeff(i32(nk), c);
  }
  r.trim();
  return r;
}

USeries USeries::stretch(u32 q) const {
  USeries r(F_, N_);
  for (i32 t = lo_; t < hi(); ++t) {
    FF c = coeff(t);
    if (F_->is_zero(c)) continue;
    i64 nk = i64(t) * q;
    if (nk < N_) r.set_coeff(i32(nk), c);
  }
  r.trim();
  return r;
}

USeries USeries::compose(const USeries& s) const {
  if (!s.is_zero() && s.lo_ < 1)
    throw std::domain_error("USeries::compose: substituted series needs val >= 1");
  USeries r(F_, N_);
  if (is_zero()) return r;
  // nonnegative part by Horner (descending)
  i32 top = hi() - 1;
  if (top >= 0) {
    USeries acc(F_, N_);
    for (i32 k = top; k >= std::max(lo_, 0); --k) {
      acc = acc.mul(s).with_cap(N_);
      FF ck = coeff(k);
      if (!F_->is_zero(ck)) acc = acc.add(USeries::monomial(*F_, N_, 0, ck));
    }
    if (std::max(lo_, 0) > 0) {
      // multiply by s^{max(lo,0)}: only when lo_ > 0
      for (i32 t = 0; t < std::max(lo_, 0); ++t) acc = acc.mul(s).with_cap(N_);
    }
    r = acc;
  }
  // negative part with s^{-1}
  if (lo_ < 0) {
    if (s.lo_ != 1)
      throw std::domain_error("USeries::compose: Laurent needs val(s) = 1");
    USeries sinv = s.inverse(N_);
    USeries acc(F_, N_);
    for (i32 k = lo_; k <= std::min(hi() - 1, i32(-1)); ++k) {
      FF ck = coeff(k);
      if (!F_->is_zero(ck)) {
        USeries pw = USeries::one(*F_, N_);
        for (i32 t = 0; t < -k; ++t) pw = pw.mul(sinv).with_cap(N_);
        acc = acc.add(pw.scale(ck));
      }
    }
    r = r.add(acc);
  }
  return r;
}

bool USeries::operator==(const USeries& o) const {
  i32 l = std::min(is_zero() ? 0 : lo_, o.is_zero() ? 0 : o.lo_);
  i32 h = std::max(is_zero() ? 0 : hi(), o.is_zero() ? 0 : o.hi());
  for (i32 k = l; k < h; ++k)
    if (!(coeff(k) == o.coeff(k))) return false;
  return true;
}

std::string USeries::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (i32 k = lo_; k < hi(); ++k) {
    if (F_->is_zero(coeff(k))) continue;
    if (!first) os << " + ";
    first = false;
    os << F_->to_string(coeff(k)) << "*T^" << k;
  }
  if (first) os << "0";
  return os.str();
}

}  // namespace phiok
