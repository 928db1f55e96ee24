#include <cstdio>
#include "phiok/aring.hpp"
using namespace phiok;

int fails = 0;
#define CHECK(c, msg) do { if (!(c)) { std::printf("FAIL: %s\n", msg); ++fails; } else std::printf("ok: %s\n", msg); } while (0)

int main() {
  {
    // p=3, f=1: Y -> T expansion should be 2T + 2T^2 (degree < 3)
    GF F(3, 1, 2);
    OKRing ok(F, default_precision(3, 12));
    ARing A(F, ok, 12);
    TL yt = A.z_to_t(A.Y(0).with_cap(3));
    ExpVec e{};
    e[0] = 1;
    CHECK(yt.coeff(e).c[0] == 2, "Y->T linear coeff = 2");
    e[0] = 2;
    CHECK(yt.coeff(e).c[0] == 2, "Y->T quadratic coeff = 2");
    // teich(2) = 8 in Z/9
    OKRing ok2(F, 2);
    OKElem t2 = ok2.teichmuller(F.from_int(2));
    CHECK(t2.x[0] == 8, "teich(2) = 8 mod 9");
  }
  {
    // p=3, f=2: phi / psi / mu identities
    GF F(3, 2, 2);
    OKRing ok(F, default_precision(3, 18));
    ARing A(F, ok, 18);
    // a_{ij} = a_{i0}^{p^j} already by construction; check Y_1 linear part matches column 1
    TL y1t = A.z_to_t(A.Y(1));
    for (u32 i = 0; i < 2; ++i) {
      ExpVec e{};
      e[i] = 1;
      CHECK(y1t.coeff(e) == A.zmat()[i][1], "Y_1 linear part = zmat col 1");
    }
    // phi(Y_1) = Y_0^p
    CHECK(A.Y(1).phi_map(1).with_cap(18) == A.Y(0).frobenius_pow(1).with_cap(18), "phi(Y_1) = Y_0^p");
    // psi(phi(x)) = x on a few elements
    TL x = A.Y(0).mul(A.Y(1)).with_cap(6).add(A.z_monomial(ExpVec{-1,2,0,0}, F.one()));
    TL px = x.phi_map(1);
    TL back = A.psi(px);
    CHECK(back.with_cap(5) == x.with_cap(5), "psi(phi(x)) = x");
    // psi((1+T_0) phi(x)) = 0
    TL d = A.delta_rep({1,0}, false);
    TL y = d.mul(px).with_cap(px.cap());
    CHECK(A.psi(y).with_cap(4).is_zero(), "psi(delta*phi(x)) = 0");
    // mu(Z^{-1} prod(1+T_j)) = 1, mu(1) = 0
    TL h = A.h_of_z();
    TL zm = A.z_monomial(ExpVec{-1,-1,0,0}, F.one());
    CHECK(F.is_zero(A.mu(A.one())), "mu(1) = 0");
    FF m = A.mu(zm.mul(h).with_cap(8));
    CHECK(m == F.one(), "mu(Z^-1 h) = 1");
    // mu o psi = (-1)^{f-1} mu = -mu for f=2
    TL xr = A.z_monomial(ExpVec{-2,-1,0,0}, F.gen_fq()).add(A.z_monomial(ExpVec{-1,-4,0,0}, F.one())).add(A.Y(0));
    FF lhs = A.mu(A.psi(xr));
    FF rhs = F.neg(A.mu(xr));
    CHECK(lhs == rhs, "mu(psi(x)) = -mu(x) at f=2");
    // a(Y_i) in abar^{p^i} Y_i (1 + F_{1-p}): f_{a,i} - 1 has val >= p-1
    OKElem a = ok.add(ok.one(), ok.scal(ok.alpha(1), 3));  // 1 + 3*gamma
    for (u32 i = 0; i < 2; ++i) {
      TL fa = A.f_a_sigma(a, i);
      TL fm1 = fa.sub(A.one());
      CHECK(fm1.is_zero() || fm1.vmin() >= 2, "f_{a,i} in 1+F_{1-p}");
    }
    // phi(f_{a,1}) = f_{a,0}^p
    TL l = A.f_a_sigma(a, 1).phi_map(1).with_cap(18);
    TL r = A.f_a_sigma(a, 0).frobenius_pow(1).with_cap(18);
    CHECK(l == r, "phi(f_{a,1}) = f_{a,0}^p");
    // teich acts by scalars: a' = [g] => a'(Y_i) = sigma_i(g) Y_i
    OKElem tg = ok.teichmuller(F.gen_fq());
    TL aY0 = A.ok_act(tg, A.Y(0).with_cap(18));
    CHECK(aY0 == A.Y(0).with_cap(18).scale(F.sigma(0, F.gen_fq())), "[g](Y_0) = g Y_0");
    // mu(a^{-1} x) = N(abar) mu(x)
    OKElem ainv = ok.inv(a);
    FF lhs2 = A.mu(A.ok_act(ainv, xr.with_cap(6)));
    FF rhs2 = F.scal(A.mu(xr.with_cap(6)), F.norm_fq(ok.reduce(a)));
    CHECK(lhs2 == rhs2, "mu(a^{-1} x) = N(abar) mu(x)");
  }
  std::printf(fails ? "SMOKE FAILED\n" : "SMOKE PASSED\n");
  return fails ? 1 : 0;
}
