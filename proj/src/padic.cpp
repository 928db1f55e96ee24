#include "phiok/padic.hpp"

#include <stdexcept>

namespace phiok {

OKRing::OKRing(const GF& F, u32 M) : F_(F), M_(M) {
  if (M < 1) throw std::invalid_argument("OKRing: M >= 1 required");
  pM_ = 1;
  for (u32 i = 0; i < M; ++i) {
    if (pM_ > (u64(1) << 62) / F.p())
      throw std::invalid_argument("OKRing: p^M too large");
    pM_ *= F.p();
  }
  m0_.assign(f(), 0);
  if (f() > 1)
    for (u32 i = 0; i < f(); ++i) m0_[i] = F.fq_minpoly()[i];

  // gamma = Teichmueller of g
  gamma_ = teichmuller(F.gen_fq());
  alpha_.resize(f());
  alpha_[0] = one();
  for (u32 j = 1; j < f(); ++j) alpha_[j] = mul(alpha_[j - 1], gamma_);

  // invert the basis matrix (columns alpha_j) by Gauss over Z/p^M;
  // pivots are units because the alpha_j reduce to an F_p-basis of F_q.
  u32 n = f();
  std::vector<std::vector<u64>> aug(n, std::vector<u64>(2 * n, 0));
  for (u32 j = 0; j < n; ++j)
    for (u32 i = 0; i < n; ++i) aug[i][j] = alpha_[j].x[i];
  for (u32 i = 0; i < n; ++i) aug[i][n + i] = 1;
  for (u32 col = 0; col < n; ++col) {
    u32 piv = col;
    while (piv < n && aug[piv][col] % p() == 0) ++piv;
    if (piv == n) throw std::runtime_error("OKRing: singular basis matrix");
    std::swap(aug[piv], aug[col]);
    u64 inv = zmod_inv(aug[col][col]);
    for (u32 j = 0; j < 2 * n; ++j) aug[col][j] = zmod_mul(aug[col][j], inv);
    for (u32 r = 0; r < n; ++r) {
      if (r == col || aug[r][col] == 0) continue;
      u64 c = aug[r][col];
      for (u32 j = 0; j < 2 * n; ++j)
        aug[r][j] = zmod_sub(aug[r][j], zmod_mul(c, aug[col][j]));
    }
  }
  basis_inv_.assign(n, std::vector<u64>(n, 0));
  for (u32 i = 0; i < n; ++i)
    for (u32 j = 0; j < n; ++j) basis_inv_[i][j] = aug[i][n + j];

  // Pascal triangle mod p for the Lucas digit products
  binom_tab_.assign(size_t(p()) * p(), 0);
  for (u32 a = 0; a < p(); ++a) {
    binom_tab_[size_t(a) * p()] = 1;
    for (u32 b = 1; b <= a; ++b)
      binom_tab_[size_t(a) * p() + b] =
          (binom_tab_[size_t(a - 1) * p() + b - 1] +
           (b <= a - 1 ? binom_tab_[size_t(a - 1) * p() + b] : 0)) %
          p();
  }
}

OKElem OKRing::one() const {
  OKElem r = zero();
  r.x[0] = 1;
  return r;
}

OKElem OKRing::from_int(u64 n) const {
  OKElem r = zero();
  r.x[0] = n % pM_;
  return r;
}

OKElem OKRing::from_int_signed(i64 n) const {
  OKElem r = zero();
  r.x[0] = zmod_from_signed(n);
  return r;
}

u64 OKRing::zmod_from_signed(i64 n) const {
  i64 m = n % i64(pM_);
  if (m < 0) m += i64(pM_);
  return u64(m);
}

bool OKRing::is_zero(const OKElem& a) const {
  for (u64 v : a.x)
    if (v) return false;
  return true;
}

OKElem OKRing::add(const OKElem& a, const OKElem& b) const {
  OKElem r = zero();
  for (u32 i = 0; i < f(); ++i) r.x[i] = zmod_add(a.x[i], b.x[i]);
  return r;
}

OKElem OKRing::sub(const OKElem& a, const OKElem& b) const {
  OKElem r = zero();
  for (u32 i = 0; i < f(); ++i) r.x[i] = zmod_sub(a.x[i], b.x[i]);
  return r;
}

OKElem OKRing::neg(const OKElem& a) const {
  OKElem r = zero();
  for (u32 i = 0; i < f(); ++i) r.x[i] = zmod_neg(a.x[i]);
  return r;
}

OKElem OKRing::scal(const OKElem& a, u64 s) const {
  OKElem r = zero();
  s %= pM_;
  for (u32 i = 0; i < f(); ++i) r.x[i] = zmod_mul(a.x[i], s);
  return r;
}

void OKRing::reduce_conv(std::vector<u128>& conv, OKElem& out) const {
  u32 n = f();
  // fold X^{n+t} using X^n = -m0_low (monic m0), top first
  for (u32 k = 2 * n - 1; k-- > n;) {
    u64 c = u64(conv[k] % pM_);
    conv[k] = 0;
    if (!c) continue;
    for (u32 j = 0; j < n; ++j) {
      u64 sub = zmod_mul(c, m0_[j] % pM_);
      u64 cur = u64(conv[k - n + j] % pM_);
      conv[k - n + j] = zmod_sub(cur, sub);
    }
  }
  for (u32 i = 0; i < n; ++i) out.x[i] = u64(conv[i] % pM_);
}

OKElem OKRing::mul(const OKElem& a, const OKElem& b) const {
  u32 n = f();
  if (n == 1) {
    OKElem r = zero();
    r.x[0] = zmod_mul(a.x[0], b.x[0]);
    return r;
  }
  std::vector<u128> conv(2 * n, 0);
  for (u32 i = 0; i < n; ++i) {
    if (!a.x[i]) continue;
    for (u32 j = 0; j < n; ++j)
      conv[i + j] += u128(zmod_mul(a.x[i], b.x[j]));
  }
  OKElem r = zero();
  reduce_conv(conv, r);
  return r;
}

OKElem OKRing::pow_u(OKElem a, u64 n) const {
  OKElem r = one();
  while (n) {
    if (n & 1) r = mul(r, a);
    a = mul(a, a);
    n >>= 1;
  }
  return r;
}

bool OKRing::is_unit(const OKElem& a) const { return !F_.is_zero(reduce(a)); }

OKElem OKRing::inv(const OKElem& a) const {
  FF rbar = reduce(a);
  if (F_.is_zero(rbar)) throw std::domain_error("OKRing: inverse of non-unit");
  FF ibar = F_.inv(rbar);
  OKElem x = zero();
  for (u32 i = 0; i < f(); ++i) x.x[i] = ibar.c[i];
  // Hensel: x <- x(2 - a x)
  for (u32 it = 0; it < M_ + 1; ++it) {
    OKElem t = mul(a, x);
    t = sub(from_int(2), t);
    x = mul(x, t);
  }
  return x;
}

FF OKRing::reduce(const OKElem& a) const {
  FF r{};
  for (u32 i = 0; i < f(); ++i) r.c[i] = u32(a.x[i] % p());
  return r;
}

OKElem OKRing::teichmuller(const FF& lambda) const {
  if (!F_.in_fq(lambda))
    throw std::invalid_argument("teichmuller: element not in F_q");
  OKElem z = zero();
  for (u32 i = 0; i < f(); ++i) z.x[i] = lambda.c[i];
  u64 qq = F_.q();
  for (u32 it = 0; it < M_ + 2; ++it) z = pow_u(z, qq);
  return z;
}

std::vector<u64> OKRing::basis_coords(const OKElem& a) const {
  std::vector<u64> c(f(), 0);
  for (u32 i = 0; i < f(); ++i)
    for (u32 j = 0; j < f(); ++j)
      c[i] = zmod_add(c[i], zmod_mul(basis_inv_[i][j], a.x[j]));
  return c;
}

OKElem OKRing::from_coords(const std::vector<u64>& c) const {
  OKElem r = zero();
  for (u32 j = 0; j < f(); ++j)
    if (c[j]) r = add(r, scal(alpha_[j], c[j]));
  return r;
}

OKElem OKRing::frobenius(const OKElem& a) const {
  // phi(gamma^j) = gamma^{pj}; use coordinates in the alpha basis
  std::vector<u64> c = basis_coords(a);
  OKElem r = zero();
  u64 qm1 = F_.q() - 1;
  for (u32 j = 0; j < f(); ++j) {
    if (!c[j]) continue;
    u64 ex = (u64(j) * p()) % (f() == 1 ? 1 : qm1);
    if (f() == 1) ex = 0;
    r = add(r, scal(pow_u(gamma_, ex), c[j]));
  }
  return r;
}

u64 OKRing::trace(const OKElem& a) const {
  OKElem s = zero(), cur = a;
  for (u32 k = 0; k < f(); ++k) {
    s = add(s, cur);
    cur = frobenius(cur);
  }
  std::vector<u64> c = basis_coords(s);
  for (u32 j = 1; j < f(); ++j)
    if (c[j]) throw std::logic_error("trace: result not in Z_p");
  return c[0];
}

std::vector<std::vector<u64>> OKRing::mult_matrix(const OKElem& a) const {
  std::vector<std::vector<u64>> m(f(), std::vector<u64>(f(), 0));
  for (u32 j = 0; j < f(); ++j) {
    std::vector<u64> col = basis_coords(mul(a, alpha_[j]));
    for (u32 i = 0; i < f(); ++i) m[i][j] = col[i];
  }
  return m;
}

u32 OKRing::binomial_mod_p(u64 x, u64 k) const {
  if (k == 0) return 1;
  if (pM_ / p() <= k)
    throw std::domain_error("binomial_mod_p: precision M too small for k");
  // Lucas on base-p digits of the canonical representative of x
  u64 r = 1;
  u64 xx = x % pM_, kk = k;
  while (kk) {
    u64 xd = xx % p(), kd = kk % p();
    if (kd > xd) return 0;
    r = r * binom_tab_[xd * p() + kd] % p();
    if (r == 0) return 0;
    xx /= p();
    kk /= p();
  }
  return u32(r);
}

u64 OKRing::zmod_pow(u64 a, u64 n) const {
  u64 r = 1;
  a %= pM_;
  while (n) {
    if (n & 1) r = zmod_mul(r, a);
    a = zmod_mul(a, a);
    n >>= 1;
  }
  return r;
}

u64 OKRing::zmod_inv(u64 a) const {
  if (a % p() == 0) throw std::domain_error("zmod_inv: non-unit");
  // Hensel from the mod-p inverse
  u64 x = 1, base = a % p(), e = p() - 2;
  while (e) {
    if (e & 1) x = x * base % p();
    base = base * base % p();
    e >>= 1;
  }
  for (u32 it = 0; it < M_ + 1; ++it) {
    u64 t = zmod_sub(2 % pM_, zmod_mul(a, x));
    x = zmod_mul(x, t);
  }
  return x;
}

}  // namespace phiok
