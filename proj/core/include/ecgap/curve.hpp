#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace ecgap {

/// Integral Weierstrass model y^2 + a1*x*y + a3*y = x^3 + a2*x^2 + a4*x + a6
/// over Q. Immutable; the discriminant is checked nonzero at construction.
class Curve {
  public:
    Curve(mpz_class a1, mpz_class a2, mpz_class a3, mpz_class a4, mpz_class a6);

    /// Short form y^2 = x^3 + A*x + B.
    static Curve short_form(mpz_class A, mpz_class B);

    /// Accepts "[a1,a2,a3,a4,a6]" or the short form "[A,B]".
    static Curve parse(const std::string& text);
    std::string to_string() const;

    const mpz_class& a1() const { return a1_; }
    const mpz_class& a2() const { return a2_; }
    const mpz_class& a3() const { return a3_; }
    const mpz_class& a4() const { return a4_; }
    const mpz_class& a6() const { return a6_; }

    const mpz_class& b2() const { return b2_; }
    const mpz_class& b4() const { return b4_; }
    const mpz_class& b6() const { return b6_; }
    const mpz_class& b8() const { return b8_; }
    const mpz_class& disc() const { return disc_; }

    /// Primes dividing the discriminant, ascending. Computed on demand (the
    /// curve stores nothing mutable, so values stay freely shareable).
    std::vector<mpz_class> bad_primes() const;

    /// Exact check of the curve equation at (x, y).
    bool contains(const mpq_class& x, const mpq_class& y) const;

    bool operator==(const Curve&) const = default;

  private:
    mpz_class a1_, a2_, a3_, a4_, a6_;
    mpz_class b2_, b4_, b6_, b8_, disc_;
};

/// Point of E(Q): either the identity O or the normalized triple (a, b, d)
/// with x = a/d^2, y = b/d^3, d >= 1 and gcd(d, a*b) = 1. The on-curve
/// invariant is maintained by decompose/add/mul, which carry the curve.
class RationalPoint {
  public:
    RationalPoint() = default;  // identity
    static RationalPoint identity() { return {}; }

    /// Validates d >= 1 and gcd(d, a*b) = 1; does not see the curve, so the
    /// equation itself is not checked here.
    static RationalPoint from_triple(mpz_class a, mpz_class b, mpz_class d);

    /// "a:b:d" decimal triple, or "O" for the identity.
    static RationalPoint parse(const std::string& text);
    std::string to_string() const;

    bool is_identity() const { return identity_; }
    const mpz_class& a() const;
    const mpz_class& b() const;
    const mpz_class& d() const;

    mpq_class x() const;
    mpq_class y() const;

    bool operator==(const RationalPoint&) const = default;

  private:
    bool identity_ = true;
    mpz_class a_, b_, d_ = 1;
};

struct HeightValue {
    double value = 0;
};

struct TorsionInfo {
    bool is_torsion = false;
    unsigned order = 0;  // valid when is_torsion
};

/// Normalizes an affine point given by exact rationals into the (a, b, d)
/// form. Rejects inputs off the curve and denominators that are not a
/// matching (square, cube) pair.
RationalPoint decompose(const Curve& E, const mpq_class& x, const mpq_class& y);

RationalPoint neg(const Curve& E, const RationalPoint& P);

/// Chord-tangent group law, exact.
RationalPoint add(const Curve& E, const RationalPoint& P,
                  const RationalPoint& Q);

/// Double-and-add; mul(0, P) = O, mul(-n, P) = neg(mul(n, P)).
RationalPoint mul(const Curve& E, const mpz_class& n, const RationalPoint& P);

/// Sound and complete over Q: by Mazur's theorem the order of a torsion
/// point divides 12 or is at most 10, so checking n <= 12 suffices.
TorsionInfo is_torsion(const Curve& E, const RationalPoint& P);

/// max(log|a|/2, log d); a = 0 contributes -infinity, so the result is
/// log d in that case. Throws IdentityPoint for O.
HeightValue naive_height(const RationalPoint& P);

}  // namespace ecgap
