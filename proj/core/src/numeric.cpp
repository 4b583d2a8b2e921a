#include "ecgap/numeric.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "ecgap/errors.hpp"

namespace ecgap {

double log_abs(const mpz_class& z) {
    if (z == 0) return -std::numeric_limits<double>::infinity();
    signed long exp = 0;
    double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());  // |mant| in [0.5, 1)
    return std::log(std::fabs(mant)) + static_cast<double>(exp) * M_LN2;
}

double log_abs(const mpq_class& q) {
    return log_abs(q.get_num()) - log_abs(q.get_den());
}

std::size_t decimal_digits(const mpz_class& z) {
    if (z == 0) return 1;
    mpz_class a = abs(z);
    std::size_t k = mpz_sizeinbase(a.get_mpz_t(), 10);  // exact or one too high
    if (k > 1) {
        mpz_class pow10;
        mpz_ui_pow_ui(pow10.get_mpz_t(), 10, k - 1);
        if (a < pow10) --k;
    }
    return k;
}

std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

mpz_class parse_integer(const std::string& text) {
    mpz_class z;
    if (text.empty() || mpz_set_str(z.get_mpz_t(), text.c_str(), 10) != 0)
        throw ParseError("not a decimal integer: '" + text + "'");
    return z;
}

mpq_class parse_rational(const std::string& text) {
    mpq_class q;
    if (text.empty() || mpq_set_str(q.get_mpq_t(), text.c_str(), 10) != 0)
        throw ParseError("not a rational: '" + text + "'");
    if (q.get_den() == 0) throw ParseError("zero denominator: '" + text + "'");
    q.canonicalize();
    return q;
}

}  // namespace ecgap
