#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <string>

namespace ecgap {

/// Natural log of |z| via mantissa + bit-exponent extraction, so the result
/// stays accurate (relative error well under 1e-12) far beyond the range of
/// mpz_get_d. Returns -inf for z == 0.
double log_abs(const mpz_class& z);

/// Natural log of |q| for a rational, same accuracy contract.
double log_abs(const mpq_class& q);

/// Exact number of decimal digits of |z|; digits(0) == 1.
std::size_t decimal_digits(const mpz_class& z);

/// Deterministic "%.12g" rendering used by every CSV/report writer.
std::string format_real(double x);

/// Parse helpers used by the CLI and the config round-trip. Both throw
/// ParseError on malformed input.
mpz_class parse_integer(const std::string& text);
mpq_class parse_rational(const std::string& text);  // "n" or "n/m", lowest terms

}  // namespace ecgap
