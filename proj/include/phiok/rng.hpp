// SplitMix64: the documented, seedable generator used for all randomized
// sweeps, so runs are reproducible across platforms.

#pragma once

#include "phiok/padic.hpp"

namespace phiok {

class SplitMix64 {
 public:
  explicit SplitMix64(u64 seed) : state_(seed) {}

  u64 next() {
    u64 z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  u64 below(u64 n) { return n ? next() % n : 0; }

  // uniform unit of O_K/p^M
  OKElem unit(const OKRing& ok) {
    for (;;) {
      OKElem a = ok.zero();
      for (u32 i = 0; i < ok.f(); ++i) a.x[i] = below(ok.pM());
      if (ok.is_unit(a)) return a;
    }
  }

  // uniform element of 1 + p O_K
  OKElem one_unit(const OKRing& ok) {
    OKElem a = ok.one();
    for (u32 i = 0; i < ok.f(); ++i)
      a.x[i] = ok.zmod_add(a.x[i], ok.zmod_mul(ok.p(), below(ok.pM())));
    return a;
  }

  FF field_elem(const GF& F) {
    FF r{};
    for (u32 i = 0; i < F.deg(); ++i) r.c[i] = u32(below(F.p()));
    return r;
  }

  FF nonzero_field_elem(const GF& F) {
    for (;;) {
      FF r = field_elem(F);
      if (!F.is_zero(r)) return r;
    }
  }

 private:
  u64 state_;
};

}  // namespace phiok
