#include <cstdio>
#include "phiok/weights.hpp"
#include "phiok/lubin_tate.hpp"
#include "phiok/aring.hpp"
using namespace phiok;
int fails = 0;
#define CHECK(c, msg) do { if (!(c)) { std::printf("FAIL: %s\n", msg); ++fails; } else std::printf("ok: %s\n", msg); } while (0)

int main() {
  {
    GF F(29, 2, 2);
    weights::Params P;
    P.F = &F; P.p = 29; P.f = 2; P.irreducible = true; P.r = {13, 13};
    P.detp = F.one();
    auto orb = weights::orbit_of(P, 0);
    CHECK(orb.d == 4, "irr f=2 J=empty orbit length 4");
    CHECK(orb.js[1] == 2u && orb.js[2] == 3u && orb.js[3] == 1u, "orbit path {}->{1}->{0,1}->{0}");
    // reducible d | f
    weights::Params R = P; R.irreducible = false; R.lam0 = F.one(); R.lam1 = F.one();
    CHECK(weights::orbit_of(R, 0).d == 1, "red J=empty d=1");
    CHECK(weights::orbit_of(R, 1).d == 2, "red J={0} d=2");
    // J=empty -> s = r (both types)
    auto s = weights::weight_from_subset(P, 0);
    CHECK(s[0] == 13 && s[1] == 13, "irr J=empty s=r");
    auto sr = weights::weight_from_subset(R, 3);
    CHECK(sr[0] == 29-3-13 && sr[1] == 29-3-13, "red J=full s=p-3-r");
    int total = 0, pass = 0;
    for (u32 J = 0; J < 4; ++J) {
      for (auto& id : weights::verify_subset(P, J)) { ++total; pass += id.pass; if (!id.pass) std::printf("  irr J=%u %s: %s\n", J, id.id.c_str(), id.witness.c_str()); }
      for (auto& id : weights::verify_subset(R, J)) { ++total; pass += id.pass; if (!id.pass) std::printf("  red J=%u %s: %s\n", J, id.id.c_str(), id.witness.c_str()); }
    }
    std::printf("subset identities: %d/%d\n", pass, total);
    CHECK(pass == total, "all weight identities at (29,2) both types");
    for (auto& id : weights::verify_global(P)) if (!id.pass) { std::printf("  glob irr %s: %s\n", id.id.c_str(), id.witness.c_str()); ++fails; }
    for (auto& id : weights::verify_global(R)) if (!id.pass) { std::printf("  glob red %s: %s\n", id.id.c_str(), id.witness.c_str()); ++fails; }
    CHECK(weights::bj_perturbation_fails(P, 1, 0), "perturbed b breaks recurrence");
    // genericity: irr r0=12 violates, red r=(12,13) fine
    weights::Params Q = P; Q.r = {12, 13};
    CHECK(weights::genericity_violation(Q).has_value(), "irr r0=12 non-generic");
    weights::Params Q2 = R; Q2.r = {12, 13};
    CHECK(!weights::genericity_violation(Q2).has_value(), "red r=(12,13) generic");
  }
  {
    // Lubin-Tate p=3, f=1
    GF F(3, 1, 2);
    OKRing ok(F, default_precision(3, 10));
    LubinTate lt(F, ok, 10);
    USeries p3 = lt.action_p();
    CHECK(p3 == USeries::monomial(F, 10, 3, F.one()), "[p](T) = T^q mod p");
    OKElem tg = ok.teichmuller(F.from_int(2));
    USeries t2 = lt.action(tg);
    CHECK(t2 == USeries::monomial(F, 10, 1, F.from_int(2)), "[teich(2)](T) = 2T");
    OKElem a = ok.from_int(4);
    USeries fa = lt.f_a(a);
    CHECK(fa.coeff(0) == F.one(), "f_a is a 1-unit");
    bool multiples = true;
    for (i32 k = fa.lo(); k < fa.hi(); ++k)
      if (!F.is_zero(fa.coeff(k)) && k % 2 != 0) multiples = false;
    CHECK(multiples, "f_a supported on multiples of q-1");
    // composition: [a]([b](T)) = [ab](T)
    OKElem b = ok.from_int(7);
    USeries ab = lt.action(ok.mul(a, b));
    USeries comp = lt.action(a).compose(lt.action(b));
    CHECK(ab == comp.with_cap(10), "[a] o [b] = [ab]");
    // irreducible DK module d=2
    DKShape sh; sh.kind = DKShape::IRRED; sh.d = 2; sh.h = 2; sh.lam = F.one();
    DKModule dk(lt, sh);
    std::string w;
    CHECK(dk.check_commutation(a, &w), "DK commutation a=4");
    i64 val = 0;
    CHECK(dk.check_etale(&val) && val == -i64(sh.h) * 2, "DK etale det valuation");
  }
  std::printf(fails ? "SMOKE2 FAILED\n" : "SMOKE2 PASSED\n");
  return fails ? 1 : 0;
}
