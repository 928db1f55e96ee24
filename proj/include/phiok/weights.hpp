// Serre-weight combinatorics: weights from subsets J, the delta-orbit
// structure, the c_n / a_n recursions with their closed forms, the b_J
// exponents and the identity ledger feeding the main-isomorphism verifier.
//
// All integer arithmetic is exact (big integers / rationals).

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <optional>
#include <string>
#include <vector>

#include "phiok/gf.hpp"

namespace phiok {
namespace weights {

using bigint = boost::multiprecision::cpp_int;
using rational = boost::multiprecision::cpp_rational;

struct Params {
  const GF* F = nullptr;  // scalar field (only for lambda_sigma and alpha checks)
  u32 p = 0, f = 0;
  std::vector<i64> r;
  bool irreducible = false;
  FF detp{};        // det(rhobar)(p), irreducible case (normalized to 1)
  FF lam0{}, lam1{};  // reducible scalars
  bool enforce_generic = true;

  i64 h() const;                  // sum_j p^j (r_j + 1)
  std::vector<i64> hvec() const;  // h^{[i]} = h_i + p h_{i+1} + ...
  bigint q() const;               // p^f
};

// paper genericity bounds; returns a diagnostic when violated
std::optional<std::string> genericity_violation(const Params& P);
// weaker structural validity: every s-tuple entry lies in [0, p-1] and the
// four dictionary options stay distinct
std::optional<std::string> dictionary_violation(const Params& P);

u32 delta_subset(const Params& P, u32 J);
std::vector<i64> weight_from_subset(const Params& P, u32 J);
u32 jmax_subset(const Params& P, u32 J);  // J^max(sigma_J) = J xor delta(J)
// c_1 vector of sigma_J: c_{1,j} = s'_j on J^max, p-1 elsewhere
std::vector<i64> c1_vector(const Params& P, u32 J);

struct Orbit {
  std::vector<u32> js;  // J, delta(J), ..., length d
  u32 d = 0;
  u32 dprime = 0;  // d * f
};
Orbit orbit_of(const Params& P, u32 J);

// a_n recursion (exact); also returns the c_n used at each step if wanted
std::vector<bigint> an_vector(const Params& P, u32 J, u32 n);
// table value of a_{d',i} / (1 - p^{d'})
rational a_dprime_closed(const Params& P, u32 J, u32 i);
std::vector<i64> b_exponents(const Params& P, u32 J);
FF lambda_sigma(const Params& P, u32 J);

// orbit-constant m = |J^max|
u32 orbit_m(const Params& P, u32 J);

struct Identity {
  std::string id;      // stable check id
  bool pass = false;
  std::string witness; // first failing instance, empty when passing
};

// the seven check families for one subset J
std::vector<Identity> verify_subset(const Params& P, u32 J);
// extra cross-subset invariants (a_n growth, periodicity, congruences)
std::vector<Identity> verify_global(const Params& P);

// negative control: perturb b_{J,i} by +1 and confirm the recurrence breaks
bool bj_perturbation_fails(const Params& P, u32 J, u32 slot);

}  // namespace weights
}  // namespace phiok
