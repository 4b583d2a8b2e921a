#pragma once

#include <gmpxx.h>

#include <array>

#include "ecgap/curve.hpp"

namespace ecgap {

/// Window of eight consecutive division-polynomial values
/// psi_{center-3} .. psi_{center+4} evaluated at a fixed point, as residues
/// mod the ladder modulus. Both doubling recurrences stay inside such a
/// window, which is what makes the O(log m) ladder work.
struct PsiBlock {
    unsigned long center = 1;
    std::array<mpz_class, 8> values;
};

/// psi_m(P) over exact rationals by direct recurrence; an oracle for the
/// modular ladder, so it is capped (default 200) rather than fast.
mpq_class psi_exact(const Curve& E, unsigned long m, const RationalPoint& P,
                    unsigned long cap = 200);

/// psi_m(P) mod modulus in O(log m) ring operations via the block ladder.
/// m <= 4 uses the closed forms and needs no inversion of psi_2, so primes
/// where the reduced point is 2-torsion still classify cleanly.
mpz_class psi_mod(const Curve& E, unsigned long m, const RationalPoint& P,
                  const mpz_class& modulus);

/// Full final window of the ladder (test hook for the block invariants).
PsiBlock psi_mod_block(const Curve& E, unsigned long m, const RationalPoint& P,
                       const mpz_class& modulus);

struct PadicValuation {
    unsigned value = 0;     // equals k when saturated
    bool saturated = false; // residue vanished mod p^k: true value is >= k
};

/// v_p(d_{mP}) computed as v_p(psi_m(P) mod p^k). Valid for p >= 5 of good
/// reduction with p not dividing d_P; these preconditions are checked.
/// When the reduced point is 2-torsion (p | psi_2) the ladder cannot run;
/// that case is settled from the psi_2 closed form plus the formal-group
/// scaling v_p(d_{2tP}) = v_p(d_{2P}) + v_p(t), which is then exact even
/// beyond the precision k.
PadicValuation denom_valuation_via_psi(const Curve& E, const mpz_class& p,
                                       unsigned long m, const RationalPoint& P,
                                       unsigned k = 3);

}  // namespace ecgap
