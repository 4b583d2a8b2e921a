#include "ecgap/eds.hpp"

#include <algorithm>
#include <bit>
#include <vector>

#include "ecgap/errors.hpp"
#include "ecgap/primes.hpp"

namespace ecgap {

namespace {

// Coordinates and curve constants reduced mod N, plus the small psi values
// every path needs.
struct ModCtx {
    const mpz_class& N;
    mpz_class x, y;
    mpz_class b2, b4, b6, b8, a1, a3;
    mpz_class psi2, psi3, psi4, psi5;
    mpz_class inv_psi2;

    explicit ModCtx(const mpz_class& modulus) : N(modulus) {}

    mpz_class red(mpz_class v) const {
        v %= N;
        if (v < 0) v += N;
        return v;
    }
};

ModCtx make_ctx(const Curve& E, const RationalPoint& P, const mpz_class& N,
                bool need_inv_psi2) {
    ModCtx c(N);
    mpz_class inv_d;
    const mpz_class d = c.red(P.d());
    if (!mpz_invert(inv_d.get_mpz_t(), d.get_mpz_t(), N.get_mpz_t()))
        throw NonInvertibleDenominator(
            "d_P not invertible mod the ladder modulus");
    const mpz_class inv_d2 = c.red(inv_d * inv_d);
    c.x = c.red(P.a() * inv_d2);
    c.y = c.red(P.b() * inv_d2 * inv_d);
    c.a1 = c.red(E.a1());
    c.a3 = c.red(E.a3());
    c.b2 = c.red(E.b2());
    c.b4 = c.red(E.b4());
    c.b6 = c.red(E.b6());
    c.b8 = c.red(E.b8());

    const mpz_class& x = c.x;
    const mpz_class x2 = c.red(x * x);
    const mpz_class x3 = c.red(x2 * x);
    c.psi2 = c.red(2 * c.y + c.a1 * x + c.a3);
    c.psi3 = c.red(3 * x2 * x2 + c.b2 * x3 + 3 * c.b4 * x2 + 3 * c.b6 * x +
                   c.b8);
    c.psi4 = c.red(
        c.psi2 *
        c.red(2 * x3 * x3 + c.b2 * x3 * x2 + 5 * c.b4 * x2 * x2 +
              10 * c.b6 * x3 + 10 * c.b8 * x2 +
              (c.b2 * c.b8 - c.b4 * c.b6) * x + (c.b4 * c.b8 - c.b6 * c.b6)));
    c.psi5 = c.red(c.psi4 * c.psi2 * c.psi2 * c.psi2 - c.psi3 * c.psi3 * c.psi3);
    if (need_inv_psi2 &&
        !mpz_invert(c.inv_psi2.get_mpz_t(), c.psi2.get_mpz_t(),
                    N.get_mpz_t()))
        throw NonInvertibleTwoY("2y + a1*x + a3 not invertible mod modulus");
    return c;
}

}  // namespace

mpq_class psi_exact(const Curve& E, unsigned long m, const RationalPoint& P,
                    unsigned long cap) {
    if (m > cap) throw CapExceeded("psi_exact index above the exact cap");
    const mpq_class x = P.x(), y = P.y();
    const mpq_class b2(E.b2()), b4(E.b4()), b6(E.b6()), b8(E.b8());
    const mpq_class a1(E.a1()), a3(E.a3());

    std::vector<mpq_class> psi(std::max<unsigned long>(m, 4) + 1);
    psi[0] = 0;
    psi[1] = 1;
    psi[2] = 2 * y + a1 * x + a3;
    const mpq_class x2 = x * x, x3 = x2 * x;
    psi[3] = 3 * x2 * x2 + b2 * x3 + 3 * b4 * x2 + 3 * b6 * x + b8;
    psi[4] = psi[2] * (2 * x3 * x3 + b2 * x3 * x2 + 5 * b4 * x2 * x2 +
                       10 * b6 * x3 + 10 * b8 * x2 + (b2 * b8 - b4 * b6) * x +
                       (b4 * b8 - b6 * b6));
    for (unsigned long n = 5; n <= m; ++n) {
        if (n % 2 == 1) {
            const unsigned long j = (n - 1) / 2;
            psi[n] = psi[j + 2] * psi[j] * psi[j] * psi[j] -
                     psi[j - 1] * psi[j + 1] * psi[j + 1] * psi[j + 1];
        } else if (psi[2] == 0) {
            // Reduced point is 2-torsion in spirit: every even psi vanishes,
            // and the recurrence's division by psi_2 is a removable 0/0.
            psi[n] = 0;
        } else {
            const unsigned long j = n / 2;
            psi[n] = psi[j] *
                     (psi[j + 2] * psi[j - 1] * psi[j - 1] -
                      psi[j - 2] * psi[j + 1] * psi[j + 1]) /
                     psi[2];
        }
    }
    return psi[m];
}

PsiBlock psi_mod_block(const Curve& E, unsigned long m, const RationalPoint& P,
                       const mpz_class& modulus) {
    if (m < 1) throw PreconditionViolated("psi ladder needs m >= 1");
    if (modulus < 2)
        throw PreconditionViolated("psi ladder needs modulus >= 2");
    const ModCtx c = make_ctx(E, P, modulus, /*need_inv_psi2=*/m >= 2);

    // Window W[j] = psi_{k-3+j}; start centered at k = 1 using psi_{-n} =
    // -psi_n for the two negative slots.
    std::array<mpz_class, 8> W = {c.red(-c.psi2), c.red(mpz_class(-1)),
                                  mpz_class(0),   mpz_class(1),
                                  c.psi2,         c.psi3,
                                  c.psi4,         c.psi5};
    unsigned long k = 1;
    std::array<mpz_class, 8> next;
    const int width = static_cast<int>(std::bit_width(m));
    for (int bit = width - 2; bit >= 0; --bit) {
        const unsigned long b = (m >> bit) & 1;
        const long t = static_cast<long>(2 * k + b);
        const long base = static_cast<long>(k) - 3;  // W[j] is psi_{base+j}
        for (int j = 0; j < 8; ++j) {
            const long idx = t - 3 + j;
            if (idx % 2 == 0) {
                const long i = idx / 2;
                next[j] = c.red(
                    c.red(W[i - base] *
                          c.red(W[i + 2 - base] * W[i - 1 - base] % c.N *
                                    W[i - 1 - base] -
                                W[i - 2 - base] * W[i + 1 - base] % c.N *
                                    W[i + 1 - base])) *
                    c.inv_psi2);
            } else {
                const long i = (idx - 1) / 2;
                next[j] = c.red(W[i + 2 - base] * W[i - base] % c.N *
                                    W[i - base] % c.N * W[i - base] -
                                W[i - 1 - base] * W[i + 1 - base] % c.N *
                                    W[i + 1 - base] % c.N * W[i + 1 - base]);
            }
        }
        W = next;
        k = 2 * k + b;
    }
    PsiBlock out;
    out.center = k;
    out.values = W;
    return out;
}

mpz_class psi_mod(const Curve& E, unsigned long m, const RationalPoint& P,
                  const mpz_class& modulus) {
    if (m < 1) throw PreconditionViolated("psi_mod needs m >= 1");
    if (modulus < 1) throw PreconditionViolated("modulus must be positive");
    if (modulus == 1) return 0;
    if (m <= 4) {
        const ModCtx c = make_ctx(E, P, modulus, /*need_inv_psi2=*/false);
        switch (m) {
            case 1: return mpz_class(1);
            case 2: return c.psi2;
            case 3: return c.psi3;
            default: return c.psi4;
        }
    }
    return psi_mod_block(E, m, P, modulus).values[3];
}

PadicValuation denom_valuation_via_psi(const Curve& E, const mpz_class& p,
                                       unsigned long m, const RationalPoint& P,
                                       unsigned k) {
    if (k < 1) throw PreconditionViolated("precision k must be >= 1");
    if (p < 5) throw PreconditionViolated("p<5");
    if (!is_prime(p)) throw PreconditionViolated("p must be prime");
    if (mpz_divisible_p(E.disc().get_mpz_t(), p.get_mpz_t()))
        throw PreconditionViolated("bad_reduction");
    if (mpz_divisible_p(P.d().get_mpz_t(), p.get_mpz_t()))
        throw PreconditionViolated("divides_dP");

    mpz_class pk;
    mpz_pow_ui(pk.get_mpz_t(), p.get_mpz_t(), k);

    // If the reduced point is 2-torsion, psi_2 is a non-unit and the block
    // ladder cannot cross even indices. But then the order of P mod p is
    // exactly 2, so v_p(d_{mP}) = 0 for odd m, and for m = 2t the
    // formal-group scaling gives v_p(d_{2tP}) = v_p(d_{2P}) + v_p(t)
    // (multiplication by t is t*id + higher order, exact for p >= 5). Both
    // ingredients come from the psi_2 closed form, which needs no inverse.
    const mpz_class r2 = psi_mod(E, 2, P, pk);
    if (mpz_divisible_p(r2.get_mpz_t(), p.get_mpz_t())) {
        if (m % 2 != 0) return {0, false};
        if (r2 == 0) return {k, true};
        mpz_class t;
        unsigned v = static_cast<unsigned>(
            mpz_remove(t.get_mpz_t(), r2.get_mpz_t(), p.get_mpz_t()));
        mpz_class half(static_cast<unsigned long>(m / 2));
        v += static_cast<unsigned>(
            mpz_remove(t.get_mpz_t(), half.get_mpz_t(), p.get_mpz_t()));
        return {v, false};
    }

    mpz_class r = psi_mod(E, m, P, pk);
    if (r == 0) return {k, true};
    unsigned v = 0;
    while (mpz_divisible_p(r.get_mpz_t(), p.get_mpz_t())) {
        r /= p;
        ++v;
    }
    return {v, false};
}

}  // namespace ecgap
