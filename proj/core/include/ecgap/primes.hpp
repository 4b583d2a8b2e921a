#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace ecgap {

/// All primes <= limit by sieve of Eratosthenes.
std::vector<std::uint32_t> sieve_primes(std::uint32_t limit);

/// Shared table of the primes below 10^6 (trial-division base). Built once,
/// safe for concurrent readers.
const std::vector<std::uint32_t>& small_primes();

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m);

/// Deterministic Miller-Rabin (12 fixed bases, exact for all 64-bit inputs).
bool is_prime(std::uint64_t n);

/// Primality for big integers: deterministic Miller-Rabin base set below
/// 3.317e24, strong-probable-prime with 64 fixed-seed pseudorandom bases
/// above (error probability < 4^-64). Deterministic for a given n.
bool is_prime(const mpz_class& n);

}  // namespace ecgap
