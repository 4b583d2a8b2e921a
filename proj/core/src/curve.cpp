#include "ecgap/curve.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "ecgap/errors.hpp"
#include "ecgap/factor.hpp"
#include "ecgap/numeric.hpp"

namespace ecgap {

namespace {

std::string strip_space(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        if (next == std::string::npos) {
            parts.push_back(s.substr(pos));
            return parts;
        }
        parts.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
}

}  // namespace

Curve::Curve(mpz_class a1, mpz_class a2, mpz_class a3, mpz_class a4,
             mpz_class a6)
    : a1_(std::move(a1)),
      a2_(std::move(a2)),
      a3_(std::move(a3)),
      a4_(std::move(a4)),
      a6_(std::move(a6)) {
    b2_ = a1_ * a1_ + 4 * a2_;
    b4_ = 2 * a4_ + a1_ * a3_;
    b6_ = a3_ * a3_ + 4 * a6_;
    b8_ = a1_ * a1_ * a6_ + 4 * a2_ * a6_ - a1_ * a3_ * a4_ + a2_ * a3_ * a3_ -
          a4_ * a4_;
    disc_ = -b2_ * b2_ * b8_ - 8 * b4_ * b4_ * b4_ - 27 * b6_ * b6_ +
            9 * b2_ * b4_ * b6_;
    if (disc_ == 0) throw SingularCurve("discriminant is zero");
}

Curve Curve::short_form(mpz_class A, mpz_class B) {
    return Curve(0, 0, 0, std::move(A), std::move(B));
}

Curve Curve::parse(const std::string& text) {
    const std::string s = strip_space(text);
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw ParseError("curve must look like [a1,a2,a3,a4,a6] or [A,B]");
    const auto parts = split(s.substr(1, s.size() - 2), ',');
    if (parts.size() == 2)
        return short_form(parse_integer(parts[0]), parse_integer(parts[1]));
    if (parts.size() == 5)
        return Curve(parse_integer(parts[0]), parse_integer(parts[1]),
                     parse_integer(parts[2]), parse_integer(parts[3]),
                     parse_integer(parts[4]));
    throw ParseError("curve needs 2 or 5 coefficients");
}

std::string Curve::to_string() const {
    return "[" + a1_.get_str() + "," + a2_.get_str() + "," + a3_.get_str() +
           "," + a4_.get_str() + "," + a6_.get_str() + "]";
}

std::vector<mpz_class> Curve::bad_primes() const {
    mpz_class n = abs(disc_);
    const FactoredInteger f = factor(n);
    std::vector<mpz_class> primes;
    primes.reserve(f.factors().size());
    for (const auto& pp : f.factors()) primes.push_back(pp.prime);
    return primes;
}

bool Curve::contains(const mpq_class& x, const mpq_class& y) const {
    const mpq_class lhs = y * y + mpq_class(a1_) * x * y + mpq_class(a3_) * y;
    const mpq_class rhs =
        x * x * x + mpq_class(a2_) * x * x + mpq_class(a4_) * x + mpq_class(a6_);
    return lhs == rhs;
}

RationalPoint RationalPoint::from_triple(mpz_class a, mpz_class b,
                                         mpz_class d) {
    if (d < 1) throw MalformedDenominator("d must be >= 1");
    if (d > 1) {
        const mpz_class g = gcd(d, a * b);
        if (g != 1) throw MalformedDenominator("gcd(d, a*b) must be 1");
    }
    RationalPoint P;
    P.identity_ = false;
    P.a_ = std::move(a);
    P.b_ = std::move(b);
    P.d_ = std::move(d);
    return P;
}

RationalPoint RationalPoint::parse(const std::string& text) {
    const std::string s = strip_space(text);
    if (s == "O") return identity();
    const auto parts = split(s, ':');
    if (parts.size() != 3)
        throw ParseError("point must be \"a:b:d\" or \"O\"");
    return from_triple(parse_integer(parts[0]), parse_integer(parts[1]),
                       parse_integer(parts[2]));
}

std::string RationalPoint::to_string() const {
    if (identity_) return "O";
    return a_.get_str() + ":" + b_.get_str() + ":" + d_.get_str();
}

const mpz_class& RationalPoint::a() const {
    if (identity_) throw IdentityPoint("O has no coordinates");
    return a_;
}

const mpz_class& RationalPoint::b() const {
    if (identity_) throw IdentityPoint("O has no coordinates");
    return b_;
}

const mpz_class& RationalPoint::d() const {
    if (identity_) throw IdentityPoint("O has no coordinates");
    return d_;
}

mpq_class RationalPoint::x() const {
    mpq_class v(a(), d_ * d_);
    v.canonicalize();
    return v;
}

mpq_class RationalPoint::y() const {
    mpq_class v(b(), d_ * d_ * d_);
    v.canonicalize();
    return v;
}

RationalPoint decompose(const Curve& E, const mpq_class& x,
                        const mpq_class& y) {
    mpq_class xc = x, yc = y;
    xc.canonicalize();
    yc.canonicalize();
    const mpz_class den_x = xc.get_den();
    if (!mpz_perfect_square_p(den_x.get_mpz_t()))
        throw MalformedDenominator("denominator of x is not a perfect square");
    mpz_class d;
    mpz_sqrt(d.get_mpz_t(), den_x.get_mpz_t());
    if (yc.get_den() != d * d * d)
        throw MalformedDenominator(
            "denominator of y is not the cube matching x");
    if (!E.contains(xc, yc))
        throw NotOnCurve("point does not satisfy the curve equation");
    return RationalPoint::from_triple(xc.get_num(), yc.get_num(), d);
}

RationalPoint neg(const Curve& E, const RationalPoint& P) {
    if (P.is_identity()) return P;
    // y -> -y - a1*x - a3 keeps d and a, so only b changes.
    mpz_class b = -P.b() - E.a1() * P.a() * P.d() - E.a3() * P.d() * P.d() * P.d();
    RationalPoint Q = RationalPoint::from_triple(P.a(), std::move(b), P.d());
    return Q;
}

RationalPoint add(const Curve& E, const RationalPoint& P,
                  const RationalPoint& Q) {
    if (P.is_identity()) return Q;
    if (Q.is_identity()) return P;
    const mpq_class x1 = P.x(), y1 = P.y(), x2 = Q.x(), y2 = Q.y();
    const mpq_class a1(E.a1()), a2(E.a2()), a3(E.a3()), a4(E.a4());
    mpq_class lambda;
    if (x1 == x2) {
        if (y2 == -y1 - a1 * x1 - a3) return RationalPoint::identity();
        // Same x, not negatives: doubling. The tangent denominator 2y+a1x+a3
        // vanishes only for 2-torsion, which the branch above already caught.
        lambda = (3 * x1 * x1 + 2 * a2 * x1 + a4 - a1 * y1) /
                 (2 * y1 + a1 * x1 + a3);
    } else {
        lambda = (y2 - y1) / (x2 - x1);
    }
    const mpq_class x3 = lambda * lambda + a1 * lambda - a2 - x1 - x2;
    const mpq_class y3 = lambda * (x1 - x3) - y1 - a1 * x3 - a3;
    return decompose(E, x3, y3);
}

RationalPoint mul(const Curve& E, const mpz_class& n, const RationalPoint& P) {
    if (n < 0) return neg(E, mul(E, mpz_class(-n), P));
    if (n == 0 || P.is_identity()) return RationalPoint::identity();
    RationalPoint R;
    for (std::size_t i = mpz_sizeinbase(n.get_mpz_t(), 2); i-- > 0;) {
        R = add(E, R, R);
        if (mpz_tstbit(n.get_mpz_t(), i)) R = add(E, R, P);
    }
    return R;
}

TorsionInfo is_torsion(const Curve& E, const RationalPoint& P) {
    RationalPoint Q = P;
    for (unsigned n = 1; n <= 12; ++n) {
        if (Q.is_identity()) return {true, n};
        Q = add(E, Q, P);
    }
    return {false, 0};
}

HeightValue naive_height(const RationalPoint& P) {
    if (P.is_identity()) throw IdentityPoint("naive height undefined at O");
    const double half_log_a = 0.5 * log_abs(P.a());
    const double log_d = log_abs(P.d());
    return {std::max(half_log_a, log_d)};
}

}  // namespace ecgap
