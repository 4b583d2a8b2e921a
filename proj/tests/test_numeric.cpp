#include "doctest.h"

#include "ecgap/errors.hpp"
#include "ecgap/numeric.hpp"

#include <cmath>
#include <string>

using namespace ecgap;

TEST_SUITE("numeric") {

TEST_CASE("log_abs on integers") {
    CHECK(log_abs(mpz_class(1)) == doctest::Approx(0.0));
    CHECK(log_abs(mpz_class(-8)) == doctest::Approx(std::log(8.0)));
    CHECK(log_abs(mpz_class(171)) == doctest::Approx(std::log(171.0)));

    // values far beyond double range must still give an accurate log
    mpz_class big;
    mpz_ui_pow_ui(big.get_mpz_t(), 10, 300);
    CHECK(log_abs(big) == doctest::Approx(300.0 * std::log(10.0)).epsilon(1e-12));
    mpz_ui_pow_ui(big.get_mpz_t(), 10, 5000);
    CHECK(log_abs(big) == doctest::Approx(5000.0 * std::log(10.0)).epsilon(1e-12));

    CHECK(log_abs(mpz_class(0)) == -HUGE_VAL);
}

TEST_CASE("log_abs on rationals") {
    CHECK(log_abs(mpq_class(22, 7)) == doctest::Approx(std::log(22.0 / 7.0)));
    CHECK(log_abs(mpq_class(-3, 5)) == doctest::Approx(std::log(0.6)));
    CHECK(log_abs(mpq_class(0)) == -HUGE_VAL);
}

TEST_CASE("decimal_digits") {
    CHECK(decimal_digits(mpz_class(1)) == 1);
    CHECK(decimal_digits(mpz_class(9)) == 1);
    CHECK(decimal_digits(mpz_class(10)) == 2);
    CHECK(decimal_digits(mpz_class(999)) == 3);
    CHECK(decimal_digits(mpz_class(1000)) == 4);
    CHECK(decimal_digits(mpz_class(-999)) == 3);
    CHECK(decimal_digits(mpz_class(0)) == 1);
    mpz_class big;
    mpz_ui_pow_ui(big.get_mpz_t(), 10, 300);
    CHECK(decimal_digits(big) == 301);
}

TEST_CASE("format_real is stable and round-trippable") {
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(0.1) == "0.1");
    CHECK(format_real(1.5) == "1.5");
    // the formatter must be deterministic: same input, same string
    double v = std::log(171.0);
    CHECK(format_real(v) == format_real(v));
    // 12 significant digits round-trip closely enough for CSV diffing
    double back = std::stod(format_real(v));
    CHECK(back == doctest::Approx(v).epsilon(1e-11));
}

TEST_CASE("parse_integer") {
    CHECK(parse_integer("0") == 0);
    CHECK(parse_integer("-42") == -42);
    CHECK(parse_integer("129") == 129);
    CHECK_THROWS_AS(parse_integer("x"), ParseError);
    CHECK_THROWS_AS(parse_integer(""), ParseError);
    CHECK_THROWS_AS(parse_integer("12.5"), ParseError);
}

TEST_CASE("parse_rational canonicalizes") {
    CHECK(parse_rational("129/100") == mpq_class(129, 100));
    CHECK(parse_rational("6/4") == mpq_class(3, 2));
    CHECK(parse_rational("-383/1000") == mpq_class(-383, 1000));
    CHECK(parse_rational("7") == mpq_class(7));
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rational("a/b"), ParseError);
    CHECK_THROWS_AS(parse_rational(""), ParseError);
}

}
