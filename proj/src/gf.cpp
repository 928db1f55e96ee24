#include "phiok/gf.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace phiok {

std::vector<u64> prime_factors(u64 n) {
  std::vector<u64> out;
  for (u64 d = 2; d * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

namespace {

// Dense polynomial arithmetic over F_p, used only during tower construction.
using Poly = std::vector<u32>;

Poly trim(Poly a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
  return a;
}

Poly pmulmod(const Poly& a, const Poly& b, const Poly& m, u32 p) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j)
      r[i + j] = u32((u64(r[i + j]) + u64(a[i]) * b[j]) % p);
  // reduce by monic m
  size_t d = m.size() - 1;
  for (size_t k = r.size(); k-- > d;) {
    u32 c = r[k];
    if (!c) continue;
    r[k] = 0;
    for (size_t j = 0; j < d; ++j) {
      u64 v = u64(p) - u64(u64(m[j]) * c % p);
      r[k - d + j] = u32((r[k - d + j] + v) % p);
    }
  }
  r.resize(d);
  return r;
}

Poly ppowmod(Poly base, u64 n, const Poly& m, u32 p) {
  Poly r{1};
  while (n) {
    if (n & 1) r = pmulmod(r, base, m, p);
    base = pmulmod(base, base, m, p);
    n >>= 1;
  }
  return r;
}

Poly pgcd(Poly a, Poly b, u32 p) {
  a = trim(a);
  b = trim(b);
  while (!b.empty()) {
    // a mod b
    u32 lead_inv = 1;
    {  // invert leading coeff of b mod p
      u32 l = b.back();
      u32 e = p - 2, acc = 1, x = l;
      while (e) {
        if (e & 1) acc = u32(u64(acc) * x % p);
        x = u32(u64(x) * x % p);
        e >>= 1;
      }
      lead_inv = acc;
    }
    while (a.size() >= b.size()) {
      u32 c = u32(u64(a.back()) * lead_inv % p);
      size_t off = a.size() - b.size();
      for (size_t j = 0; j < b.size(); ++j) {
        u64 v = u64(p) - u64(u64(b[j]) * c % p);
        a[off + j] = u32((a[off + j] + v) % p);
      }
      a = trim(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  return a;
}

bool irreducible_fp(const Poly& m, u32 p) {
  size_t f = m.size() - 1;
  if (f == 0) return false;
  // x^{p^f} == x mod m
  Poly x{0, 1};
  Poly xp = x;
  for (size_t i = 0; i < f; ++i) xp = ppowmod(xp, p, m, p);
  Poly diff = xp;
  if (diff.size() < 2) diff.resize(2, 0);
  diff[1] = (diff[1] + p - 1) % p;
  if (!trim(diff).empty()) return false;
  for (u64 l : prime_factors(f)) {
    Poly xq = x;
    for (size_t i = 0; i < f / l; ++i) xq = ppowmod(xq, p, m, p);
    Poly d = xq;
    if (d.size() < 2) d.resize(2, 0);
    d[1] = (d[1] + p - 1) % p;
    Poly g = pgcd(trim(d), m, p);
    if (g.size() != 1) return false;
  }
  return true;
}

}  // namespace

GF::GF(u32 p, u32 f, u32 e) : p_(p), f_(f), e_(e) {
  if (p < 3) throw std::invalid_argument("GF: p must be an odd prime >= 3");
  if (f < 1 || e < 1 || f * e > kMaxFLimbs)
    throw std::invalid_argument("GF: need 1 <= f*e <= 8");
  q_ = 1;
  for (u32 i = 0; i < f; ++i) q_ *= p;
  card_ = 1;
  for (u32 i = 0; i < f * e; ++i) card_ *= p;

  fq_min_ = find_fq_minpoly();
  // x^{f+t} mod m tables
  xred_.assign(f_ > 1 ? f_ - 1 : 0, std::vector<u32>(f_, 0));
  if (f_ > 1) {
    std::vector<u32> cur(f_, 0);  // x^f  = -m_low
    for (u32 i = 0; i < f_; ++i) cur[i] = (p_ - fq_min_[i]) % p_;
    xred_[0] = cur;
    for (u32 t = 1; t + 1 < f_; ++t) {
      std::vector<u32> nxt(f_, 0);
      u32 top = cur[f_ - 1];
      for (u32 i = f_; i-- > 1;) nxt[i] = cur[i - 1];
      nxt[0] = 0;
      if (top)
        for (u32 i = 0; i < f_; ++i)
          nxt[i] = u32((nxt[i] + u64(top) * ((p_ - fq_min_[i]) % p_)) % p_);
      xred_[t] = nxt;
      cur = nxt;
    }
  }
  g_ = find_generator_fq();
  find_ext();
}

std::vector<u32> GF::find_fq_minpoly() const {
  if (f_ == 1) return {0};  // m(x) = x, unused
  // scan m = x^f + c_{f-1}x^{f-1} + ... + c_0, lexicographic in (c_0..c_{f-1})
  u64 total = 1;
  for (u32 i = 0; i < f_; ++i) total *= p_;
  for (u64 code = 0; code < total; ++code) {
    Poly m(f_ + 1, 0);
    m[f_] = 1;
    u64 t = code;
    for (u32 i = 0; i < f_; ++i) {
      m[i] = u32(t % p_);
      t /= p_;
    }
    if (m[0] == 0) continue;
    if (irreducible_fp(m, p_)) return Poly(m.begin(), m.begin() + f_);
  }
  throw std::runtime_error("GF: no irreducible polynomial found");
}

FF GF::one() const {
  FF r;
  r.c[0] = 1;
  return r;
}

FF GF::from_int(u64 n) const {
  FF r;
  r.c[0] = u32(n % p_);
  return r;
}

bool GF::is_zero(const FF& a) const {
  for (u32 i = 0; i < deg(); ++i)
    if (a.c[i]) return false;
  return true;
}

bool GF::in_fq(const FF& a) const {
  for (u32 i = f_; i < deg(); ++i)
    if (a.c[i]) return false;
  return true;
}

FF GF::add(const FF& a, const FF& b) const {
  FF r;
  for (u32 i = 0; i < deg(); ++i) r.c[i] = padd(a.c[i], b.c[i]);
  return r;
}

FF GF::sub(const FF& a, const FF& b) const {
  FF r;
  for (u32 i = 0; i < deg(); ++i) r.c[i] = psub(a.c[i], b.c[i]);
  return r;
}

FF GF::neg(const FF& a) const {
  FF r;
  for (u32 i = 0; i < deg(); ++i) r.c[i] = a.c[i] ? p_ - a.c[i] : 0;
  return r;
}

FF GF::scal(const FF& a, u32 s) const {
  FF r;
  s %= p_;
  for (u32 i = 0; i < deg(); ++i) r.c[i] = pmul(a.c[i], s);
  return r;
}

void GF::fq_mul_raw(const u32* a, const u32* b, u32* out) const {
  if (f_ == 1) {
    out[0] = pmul(a[0], b[0]);
    return;
  }
  u64 conv[2 * kMaxFLimbs - 1] = {0};
  for (u32 i = 0; i < f_; ++i) {
    if (!a[i]) continue;
    for (u32 j = 0; j < f_; ++j) conv[i + j] += u64(a[i]) * b[j];
  }
  u32 red[kMaxFLimbs];
  for (u32 i = 0; i < f_; ++i) red[i] = u32(conv[i] % p_);
  for (u32 t = 0; t + 1 < f_; ++t) {
    u32 hi = u32(conv[f_ + t] % p_);
    if (!hi) continue;
    for (u32 i = 0; i < f_; ++i)
      red[i] = u32((red[i] + u64(hi) * xred_[t][i]) % p_);
  }
  for (u32 i = 0; i < f_; ++i) out[i] = red[i];
}

FF GF::mul(const FF& a, const FF& b) const {
  FF r;
  if (e_ == 1 || (in_fq(a) && in_fq(b))) {
    fq_mul_raw(a.c.data(), b.c.data(), r.c.data());
    return r;
  }
  // convolution over u with F_q blocks
  std::array<std::array<u32, kMaxFLimbs>, 2 * kMaxFLimbs> conv{};
  std::array<u32, kMaxFLimbs> tmp{};
  for (u32 i = 0; i < e_; ++i) {
    bool azero = true;
    for (u32 l = 0; l < f_; ++l) azero = azero && !a.c[i * f_ + l];
    if (azero) continue;
    for (u32 j = 0; j < e_; ++j) {
      fq_mul_raw(&a.c[i * f_], &b.c[j * f_], tmp.data());
      for (u32 l = 0; l < f_; ++l)
        conv[i + j][l] = padd(conv[i + j][l], tmp[l]);
    }
  }
  for (u32 j = 0; j < e_; ++j)
    for (u32 l = 0; l < f_; ++l) r.c[j * f_ + l] = conv[j][l];
  for (u32 t = 0; t + 1 < e_; ++t) {
    bool z = true;
    for (u32 l = 0; l < f_; ++l) z = z && !conv[e_ + t][l];
    if (z) continue;
    for (u32 j = 0; j < e_; ++j) {
      fq_mul_raw(conv[e_ + t].data(), &ured_[t].c[j * f_], tmp.data());
      for (u32 l = 0; l < f_; ++l)
        r.c[j * f_ + l] = padd(r.c[j * f_ + l], tmp[l]);
    }
  }
  return r;
}

FF GF::pow_u(const FF& a, u64 n) const {
  FF r = one(), base = a;
  while (n) {
    if (n & 1) r = mul(r, base);
    base = mul(base, base);
    n >>= 1;
  }
  return r;
}

FF GF::pow(const FF& a, i64 n) const {
  if (n >= 0) return pow_u(a, u64(n));
  return pow_u(inv(a), u64(-n));
}

FF GF::inv(const FF& a) const {
  if (is_zero(a)) throw std::domain_error("GF: inverse of zero");
  return pow_u(a, card_ - 2);
}

FF GF::frob_k(const FF& a, u32 k) const {
  // frobenius has order deg() on F
  u64 e = 1;
  for (u32 i = 0; i < k % deg(); ++i) e *= p_;
  return pow_u(a, e);
}

u32 GF::norm_fq(const FF& a) const {
  // product of conjugates a^{p^i}, i < f; lands in F_p
  FF r = one();
  FF cur = a;
  for (u32 i = 0; i < f_; ++i) {
    r = mul(r, cur);
    cur = frob(cur);
  }
  for (u32 i = 1; i < deg(); ++i)
    if (r.c[i]) throw std::logic_error("norm_fq: result not in F_p");
  return r.c[0];
}

u64 GF::mult_order(const FF& a) const {
  u64 n = card_ - 1;
  for (u64 l : prime_factors(card_ - 1)) {
    while (n % l == 0) {
      FF t = pow_u(a, n / l);
      if (t == one())
        n /= l;
      else
        break;
    }
  }
  return n;
}

FF GF::find_generator_fq() const {
  // enumerate F_q elements by base-p code of their x-coordinates
  for (u64 code = 1; code < q_; ++code) {
    FF cand{};
    u64 t = code;
    for (u32 i = 0; i < f_; ++i) {
      cand.c[i] = u32(t % p_);
      t /= p_;
    }
    // order within F_q^x
    u64 n = q_ - 1;
    bool ok = true;
    for (u64 l : prime_factors(q_ - 1)) {
      FF e = cand;
      // cand^{(q-1)/l} inside F (restricted to F_q block is fine)
      FF r = one();
      u64 ee = (q_ - 1) / l;
      while (ee) {
        if (ee & 1) r = mul(r, e);
        e = mul(e, e);
        ee >>= 1;
      }
      if (r == one()) {
        ok = false;
        break;
      }
    }
    (void)n;
    if (ok) return cand;
  }
  throw std::runtime_error("GF: no generator of F_q^x found");
}

void GF::find_ext() {
  if (e_ == 1) return;
  // candidate k(u) = u^e - c, c = g^t; irreducibility tested over F_q by the
  // order criterion for binomials, checked directly via a root search in the
  // quotient: we instead verify u^{q^e} = u and gcd conditions using generic
  // arithmetic in F_q[u]/(k).
  auto try_binomial = [&](const FF& cst) -> bool {
    // build ured tables for k(u) = u^e - cst and check irreducibility of k
    std::vector<FF> ur(e_ > 1 ? e_ - 1 : 0);
    FF cur = cst;  // u^e = cst
    for (u32 t = 0; t + 1 < e_; ++t) {
      // u^{e+t} = cst * u^t  (since u^e = cst)
      FF blocks{};
      // represent cst * u^t as an F element: block t = cst
      // (cst is an F_q element)
      for (u32 l = 0; l < f_; ++l) blocks.c[t * f_ + l] = cst.c[l];
      ur[t] = blocks;
    }
    ured_ = ur;
    (void)cur;
    // irreducibility of u^e - cst over F_q: holds iff for every prime l | e,
    // cst is not an l-th power in F_q^x, and if 4 | e then cst not in -4 F_q^4.
    u64 ord = mult_order(cst);
    u64 idx = (q_ - 1) / ord;  // cst = g^{idx * something}; l-th power iff l | (q-1)/ord * ... use direct test
    (void)idx;
    for (u64 l : prime_factors(e_)) {
      if ((q_ - 1) % l == 0) {
        FF t = pow_u(cst, (q_ - 1) / l);
        if (t == one()) return false;  // cst is an l-th power
      } else {
        // l-th power map is bijective; binomial reducible
        return false;
      }
    }
    if (e_ % 4 == 0) {
      // need cst not of the form -4 y^4; for odd q this is implied by the
      // quartic-power test unless -4 is a fourth power; just verify directly.
      for (u64 code = 1; code < q_; ++code) {
        FF y{};
        u64 t = code;
        for (u32 i = 0; i < f_; ++i) {
          y.c[i] = u32(t % p_);
          t /= p_;
        }
        FF v = scal(pow_u(y, 4), p_ - 4);
        if (v == cst) return false;
      }
    }
    return true;
  };

  for (u64 t = 1; t < q_; ++t) {
    FF cst = gq_pow(t);
    if (try_binomial(cst)) return;
  }
  throw std::runtime_error("GF: no irreducible binomial u^e - c found");
}

bool GF::sqrt(const FF& a, FF& out) const {
  if (is_zero(a)) {
    out = FF{};
    return true;
  }
  // card odd prime power; a is a square iff a^{(card-1)/2} == 1.
  if (pow_u(a, (card_ - 1) / 2) != one()) return false;
  // Tonelli-Shanks in the cyclic group F^x.
  u64 n = card_ - 1;
  u32 s = 0;
  u64 m = n;
  while (m % 2 == 0) {
    m /= 2;
    ++s;
  }
  if (s == 1) {
    out = pow_u(a, (card_ + 1) / 4);
    return true;
  }
  // find a non-square z
  FF z = one();
  for (u64 code = 2; code < card_; ++code) {
    FF cand{};
    u64 t = code;
    for (u32 i = 0; i < deg(); ++i) {
      cand.c[i] = u32(t % p_);
      t /= p_;
    }
    if (is_zero(cand)) continue;
    if (pow_u(cand, (card_ - 1) / 2) != one()) {
      z = cand;
      break;
    }
  }
  FF c = pow_u(z, m);
  FF x = pow_u(a, (m + 1) / 2);
  FF t = pow_u(a, m);
  u32 r = s;
  while (t != one()) {
    FF t2 = t;
    u32 i = 0;
    while (t2 != one()) {
      t2 = mul(t2, t2);
      ++i;
      if (i == r) return false;
    }
    FF b = c;
    for (u32 j = 0; j + i + 1 < r; ++j) b = mul(b, b);
    x = mul(x, b);
    c = mul(b, b);
    t = mul(t, c);
    r = i;
  }
  out = x;
  return true;
}

std::string GF::to_string(const FF& a) const {
  std::ostringstream os;
  os << "[";
  for (u32 i = 0; i < deg(); ++i) {
    if (i) os << ",";
    os << a.c[i];
  }
  os << "]";
  return os.str();
}

}  // namespace phiok
