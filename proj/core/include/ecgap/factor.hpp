#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace ecgap {

struct PrimePower {
    mpz_class prime;
    unsigned exponent = 1;
    bool operator==(const PrimePower&) const = default;
};

/// A positive integer together with its complete prime factorization,
/// factors sorted ascending. n == 1 carries an empty factor list.
class FactoredInteger {
  public:
    /// Validates the invariants (reassembly, primality of every factor,
    /// ascending order, exponents >= 1); throws PreconditionViolated on
    /// failure. This is also the re-verification path for cache loads.
    static FactoredInteger from_factors(mpz_class n,
                                        std::vector<PrimePower> factors);

    const mpz_class& value() const { return n_; }
    const std::vector<PrimePower>& factors() const { return factors_; }

    bool operator==(const FactoredInteger&) const = default;

  private:
    friend FactoredInteger factor_unchecked(mpz_class,
                                            std::vector<PrimePower>);
    mpz_class n_ = 1;
    std::vector<PrimePower> factors_;
};

class FactorCache;

struct FactorOptions {
    /// Pollard-rho budget, counted in iterations of the Brent cycle walk so
    /// that exhausting it is deterministic (a wall-clock cap would make
    /// repeated runs diverge). Shared across the whole recursion for one
    /// input integer.
    std::uint64_t rho_budget = 8'000'000;
    FactorCache* cache = nullptr;
    /// Primes to strip before the generic machinery runs; lets a caller
    /// reuse primes already discovered elsewhere (e.g. along an orbit).
    const std::vector<mpz_class>* hint_primes = nullptr;
};

/// Complete factorization: trial division by the primes below 10^6, then
/// Pollard rho (Brent cycle detection, fixed parameters) recursing on
/// composite parts. Throws BudgetExceeded when the rho budget runs out;
/// never returns partial data.
FactoredInteger factor(const mpz_class& n, const FactorOptions& opt = {});

/// Product of the distinct primes of n; radical(1) == 1.
mpz_class radical(const FactoredInteger& n);

struct SqfreeSplit {
    mpz_class d_prime;  // product of primes exactly dividing n (squarefree)
    mpz_class v;        // powerful complement, every prime exponent >= 2
};
SqfreeSplit sqfree_split(const FactoredInteger& n);

struct PerfectPower {
    bool is_power = false;
    mpz_class base;      // valid when is_power
    unsigned exponent = 0;  // maximal k with n == base^k
};
/// True iff n = b^k with k >= 2; reports the maximal exponent.
/// Convention: n == 1 yields (true, base=1, exponent=2).
PerfectPower is_perfect_power(const mpz_class& n);

/// Largest e with p^e | n. Checks that p is prime.
unsigned valuation(const mpz_class& p, const mpz_class& n);

/// Process-wide memo cache of factorizations, safe for concurrent readers
/// and writers. Persists as append-only text lines "n=p1^t1*p2^t2*...";
/// every line is re-verified on load and bad lines are dropped.
class FactorCache {
  public:
    std::optional<FactoredInteger> lookup(const mpz_class& n) const;
    void insert(const FactoredInteger& f);  // last write wins
    std::size_t size() const;

    /// Returns the number of accepted lines; silently skips invalid ones.
    std::size_t load(const std::string& path);
    /// Appends entries inserted since the last call; creates the file if
    /// needed. Returns the number of lines written.
    std::size_t append_new_to(const std::string& path);

    static std::string format_line(const FactoredInteger& f);
    static std::optional<FactoredInteger> parse_line(const std::string& line);

  private:
    mutable std::shared_mutex mutex_;
    std::map<mpz_class, FactoredInteger> entries_;
    std::vector<mpz_class> unsynced_;
};

}  // namespace ecgap
