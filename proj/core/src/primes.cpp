#include "ecgap/primes.hpp"

#include <mutex>

namespace ecgap {

std::vector<std::uint32_t> sieve_primes(std::uint32_t limit) {
    std::vector<std::uint32_t> primes;
    if (limit < 2) return primes;
    std::vector<std::uint8_t> composite(static_cast<std::size_t>(limit) + 1, 0);
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        primes.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
    }
    return primes;
}

const std::vector<std::uint32_t>& small_primes() {
    static const std::vector<std::uint32_t> table = sieve_primes(1'000'000);
    return table;
}

std::uint64_t mulmod_u64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(
        static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod_u64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod_u64(r, a, m);
        a = mulmod_u64(a, a, m);
        e >>= 1;
    }
    return r;
}

namespace {

// Strong-probable-prime check to base a; n odd, n - 1 = 2^s * t.
bool sprp_u64(std::uint64_t n, std::uint64_t t, int s, std::uint64_t a) {
    a %= n;
    if (a == 0) return true;
    std::uint64_t x = powmod_u64(a, t, n);
    if (x == 1 || x == n - 1) return true;
    for (int i = 1; i < s; ++i) {
        x = mulmod_u64(x, x, n);
        if (x == n - 1) return true;
    }
    return false;
}

bool sprp_mpz(const mpz_class& n, const mpz_class& t, unsigned long s,
              const mpz_class& base) {
    mpz_class a = base % n;
    if (a == 0) return true;
    mpz_class x;
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
    mpz_class nm1 = n - 1;
    if (x == 1 || x == nm1) return true;
    for (unsigned long i = 1; i < s; ++i) {
        x = x * x % n;
        if (x == nm1) return true;
    }
    return false;
}

// Exact for n < 3,317,044,064,679,887,385,961,981 (first 13 prime bases).
constexpr std::uint64_t kDeterministicBases[] = {2,  3,  5,  7,  11, 13, 17,
                                                 19, 23, 29, 31, 37, 41};

}  // namespace

bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull,
                            19ull, 23ull, 29ull, 31ull, 37ull}) {
        if (n == p) return true;
        if (n % p == 0) return false;
    }
    int s = 0;
    std::uint64_t t = n - 1;
    while ((t & 1) == 0) { t >>= 1; ++s; }
    for (int i = 0; i < 12; ++i)
        if (!sprp_u64(n, t, s, kDeterministicBases[i])) return false;
    return true;
}

bool is_prime(const mpz_class& n) {
    if (mpz_fits_ulong_p(n.get_mpz_t()) && sizeof(unsigned long) == 8)
        return is_prime(static_cast<std::uint64_t>(n.get_ui()));
    if (n < 2) return false;
    if (mpz_even_p(n.get_mpz_t())) return n == 2;

    unsigned long s = mpz_scan1(mpz_class(n - 1).get_mpz_t(), 0);
    mpz_class t = (n - 1) >> s;

    static const mpz_class kDeterministicLimit("3317044064679887385961981");
    if (n < kDeterministicLimit) {
        for (std::uint64_t b : kDeterministicBases)
            if (!sprp_mpz(n, t, s, mpz_class(static_cast<unsigned long>(b))))
                return false;
        return true;
    }

    // Fixed-seed generator: the base sequence depends only on n.
    gmp_randstate_t rng;
    gmp_randinit_mt(rng);
    gmp_randseed_ui(rng, 0x5eed5eedUL);
    mpz_class span = n - 3, base;
    bool prime = true;
    for (int i = 0; i < 64 && prime; ++i) {
        mpz_urandomm(base.get_mpz_t(), rng, span.get_mpz_t());
        base += 2;  // uniform in [2, n-2]
        prime = sprp_mpz(n, t, s, base);
    }
    gmp_randclear(rng);
    return prime;
}

}  // namespace ecgap
