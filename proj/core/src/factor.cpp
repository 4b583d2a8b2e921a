#include "ecgap/factor.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <numeric>

#include "ecgap/errors.hpp"
#include "ecgap/primes.hpp"

namespace ecgap {

FactoredInteger factor_unchecked(mpz_class n, std::vector<PrimePower> factors) {
    FactoredInteger f;
    f.n_ = std::move(n);
    f.factors_ = std::move(factors);
    return f;
}

FactoredInteger FactoredInteger::from_factors(mpz_class n,
                                              std::vector<PrimePower> factors) {
    if (n < 1) throw PreconditionViolated("factored integer must be positive");
    mpz_class acc = 1, pe;
    const mpz_class* prev = nullptr;
    for (const auto& pp : factors) {
        if (pp.exponent < 1)
            throw PreconditionViolated("factor exponent must be >= 1");
        if (prev && !(*prev < pp.prime))
            throw PreconditionViolated("factors must be strictly ascending");
        if (!is_prime(pp.prime))
            throw PreconditionViolated("listed factor fails primality test");
        mpz_pow_ui(pe.get_mpz_t(), pp.prime.get_mpz_t(), pp.exponent);
        acc *= pe;
        prev = &pp.prime;
    }
    if (acc != n)
        throw PreconditionViolated("factors do not reassemble to n");
    return factor_unchecked(std::move(n), std::move(factors));
}

namespace {

void spend(std::uint64_t& budget, std::uint64_t amount) {
    if (budget < amount)
        throw BudgetExceeded("factorization budget exhausted");
    budget -= amount;
}

// Brent's variant of Pollard rho on 64-bit n (odd composite). Fixed start
// value and fixed c sequence keep the whole walk reproducible.
std::uint64_t rho_brent_u64(std::uint64_t n, std::uint64_t& budget) {
    for (std::uint64_t c = 1;; ++c) {
        std::uint64_t y = 2, r = 1, q = 1, g = 1, x = 0, ys = 0;
        while (g == 1) {
            x = y;
            spend(budget, r);
            for (std::uint64_t i = 0; i < r; ++i)
                y = (mulmod_u64(y, y, n) + c) % n;
            std::uint64_t k = 0;
            while (k < r && g == 1) {
                const std::uint64_t lim = std::min<std::uint64_t>(128, r - k);
                ys = y;
                spend(budget, lim);
                for (std::uint64_t i = 0; i < lim; ++i) {
                    y = (mulmod_u64(y, y, n) + c) % n;
                    const std::uint64_t d = x > y ? x - y : y - x;
                    if (d) q = mulmod_u64(q, d, n);
                }
                g = std::gcd(q, n);
                k += lim;
            }
            r <<= 1;
        }
        if (g == n) {
            g = 1;
            while (g == 1) {
                spend(budget, 1);
                ys = (mulmod_u64(ys, ys, n) + c) % n;
                const std::uint64_t d = x > ys ? x - ys : ys - x;
                g = d ? std::gcd(d, n) : n;
            }
        }
        if (g != n) return g;
    }
}

mpz_class rho_brent_mpz(const mpz_class& n, std::uint64_t& budget) {
    for (unsigned long c = 1;; ++c) {
        mpz_class y = 2, x, ys, q = 1, g = 1, d;
        std::uint64_t r = 1;
        while (g == 1) {
            x = y;
            spend(budget, r);
            for (std::uint64_t i = 0; i < r; ++i) {
                y = y * y + c;
                y %= n;
            }
            std::uint64_t k = 0;
            while (k < r && g == 1) {
                const std::uint64_t lim = std::min<std::uint64_t>(128, r - k);
                ys = y;
                spend(budget, lim);
                for (std::uint64_t i = 0; i < lim; ++i) {
                    y = y * y + c;
                    y %= n;
                    d = x - y;
                    if (d != 0) {
                        q *= abs(d);
                        q %= n;
                    }
                }
                g = gcd(q, n);
                k += lim;
            }
            r <<= 1;
        }
        if (g == n) {
            g = 1;
            while (g == 1) {
                spend(budget, 1);
                ys = ys * ys + c;
                ys %= n;
                d = abs(x - ys);
                g = d != 0 ? gcd(d, n) : n;
            }
        }
        if (g != n) return g;
    }
}

mpz_class rho_factor(const mpz_class& n, std::uint64_t& budget) {
    if (mpz_fits_ulong_p(n.get_mpz_t()))
        return mpz_class(rho_brent_u64(n.get_ui(), budget));
    return rho_brent_mpz(n, budget);
}

// Removes every prime below 10^6 from m. After a completed pass any m > 1
// has only rough (>= 10^6) factors; an early p^2 > m exit leaves m prime.
void strip_small_primes(mpz_class& m, std::map<mpz_class, unsigned>& out) {
    mpz_class fp;
    for (std::uint32_t p : small_primes()) {
        const unsigned long pp =
            static_cast<unsigned long>(p) * static_cast<unsigned long>(p);
        if (mpz_cmp_ui(m.get_mpz_t(), pp) < 0) break;
        if (mpz_divisible_ui_p(m.get_mpz_t(), p)) {
            fp = p;
            const unsigned e = static_cast<unsigned>(
                mpz_remove(m.get_mpz_t(), m.get_mpz_t(), fp.get_mpz_t()));
            out[fp] += e;
        }
    }
}

void factor_rough(const mpz_class& m, std::map<mpz_class, unsigned>& out,
                  std::uint64_t& budget, unsigned mult) {
    if (m == 1) return;
    if (is_prime(m)) {
        out[m] += mult;
        return;
    }
    if (mpz_perfect_power_p(m.get_mpz_t())) {
        const std::size_t bits = mpz_sizeinbase(m.get_mpz_t(), 2);
        for (unsigned long k = 2; k < bits; ++k) {
            if (!is_prime(static_cast<std::uint64_t>(k))) continue;
            mpz_class root;
            if (mpz_root(root.get_mpz_t(), m.get_mpz_t(), k)) {
                factor_rough(root, out, budget, mult * static_cast<unsigned>(k));
                return;
            }
        }
    }
    const mpz_class f = rho_factor(m, budget);
    factor_rough(f, out, budget, mult);
    factor_rough(m / f, out, budget, mult);
}

}  // namespace

FactoredInteger factor(const mpz_class& n, const FactorOptions& opt) {
    if (n < 1) throw PreconditionViolated("factor: n must be >= 1");
    if (opt.cache) {
        if (auto hit = opt.cache->lookup(n)) return *hit;
    }

    std::map<mpz_class, unsigned> acc;
    mpz_class m = n;
    if (opt.hint_primes) {
        for (const mpz_class& q : *opt.hint_primes) {
            if (q < 2 || !mpz_divisible_p(m.get_mpz_t(), q.get_mpz_t()))
                continue;
            if (!is_prime(q)) continue;
            const unsigned e = static_cast<unsigned>(
                mpz_remove(m.get_mpz_t(), m.get_mpz_t(), q.get_mpz_t()));
            acc[q] += e;
        }
    }
    std::uint64_t budget = opt.rho_budget;
    strip_small_primes(m, acc);
    factor_rough(m, acc, budget, 1);

    std::vector<PrimePower> factors;
    factors.reserve(acc.size());
    for (auto& [p, e] : acc) factors.push_back({p, e});
    auto result = factor_unchecked(n, std::move(factors));
    if (opt.cache) opt.cache->insert(result);
    return result;
}

mpz_class radical(const FactoredInteger& n) {
    mpz_class r = 1;
    for (const auto& pp : n.factors()) r *= pp.prime;
    return r;
}

SqfreeSplit sqfree_split(const FactoredInteger& n) {
    SqfreeSplit s{1, 1};
    mpz_class pe;
    for (const auto& pp : n.factors()) {
        if (pp.exponent == 1) {
            s.d_prime *= pp.prime;
        } else {
            mpz_pow_ui(pe.get_mpz_t(), pp.prime.get_mpz_t(), pp.exponent);
            s.v *= pe;
        }
    }
    return s;
}

PerfectPower is_perfect_power(const mpz_class& n) {
    if (n < 1) throw PreconditionViolated("is_perfect_power: n must be >= 1");
    if (n == 1) return {true, 1, 2};
    const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    for (unsigned long k = bits - 1; k >= 2; --k) {
        mpz_class root;
        if (mpz_root(root.get_mpz_t(), n.get_mpz_t(), k))
            return {true, root, static_cast<unsigned>(k)};
    }
    return {false, 0, 0};
}

unsigned valuation(const mpz_class& p, const mpz_class& n) {
    if (n < 1) throw PreconditionViolated("valuation: n must be >= 1");
    if (!is_prime(p)) throw PreconditionViolated("valuation: p must be prime");
    mpz_class tmp;
    return static_cast<unsigned>(
        mpz_remove(tmp.get_mpz_t(), n.get_mpz_t(), p.get_mpz_t()));
}

std::optional<FactoredInteger> FactorCache::lookup(const mpz_class& n) const {
    std::shared_lock lock(mutex_);
    auto it = entries_.find(n);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void FactorCache::insert(const FactoredInteger& f) {
    std::unique_lock lock(mutex_);
    auto [it, inserted] = entries_.emplace(f.value(), f);
    if (!inserted) {
        if (it->second == f) return;
        it->second = f;
    }
    unsynced_.push_back(f.value());
}

std::size_t FactorCache::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

std::string FactorCache::format_line(const FactoredInteger& f) {
    std::string line = f.value().get_str() + "=";
    bool first = true;
    for (const auto& pp : f.factors()) {
        if (!first) line += "*";
        line += pp.prime.get_str() + "^" + std::to_string(pp.exponent);
        first = false;
    }
    return line;
}

std::optional<FactoredInteger> FactorCache::parse_line(
    const std::string& line) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) return std::nullopt;
    try {
        mpz_class n;
        if (mpz_set_str(n.get_mpz_t(), line.substr(0, eq).c_str(), 10) != 0)
            return std::nullopt;
        std::vector<PrimePower> factors;
        std::size_t pos = eq + 1;
        while (pos < line.size()) {
            auto star = line.find('*', pos);
            if (star == std::string::npos) star = line.size();
            const std::string term = line.substr(pos, star - pos);
            const auto caret = term.find('^');
            PrimePower pp;
            const std::string base =
                caret == std::string::npos ? term : term.substr(0, caret);
            if (mpz_set_str(pp.prime.get_mpz_t(), base.c_str(), 10) != 0)
                return std::nullopt;
            pp.exponent =
                caret == std::string::npos
                    ? 1
                    : static_cast<unsigned>(std::stoul(term.substr(caret + 1)));
            factors.push_back(std::move(pp));
            pos = star + 1;
        }
        return FactoredInteger::from_factors(std::move(n), std::move(factors));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::size_t FactorCache::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) return 0;
    std::size_t accepted = 0;
    std::string line;
    std::unique_lock lock(mutex_);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (auto f = parse_line(line)) {
            entries_.insert_or_assign(f->value(), *f);
            ++accepted;
        }
    }
    return accepted;
}

std::size_t FactorCache::append_new_to(const std::string& path) {
    std::unique_lock lock(mutex_);
    if (unsynced_.empty()) return 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error("cannot open factor cache file: " + path);
    std::size_t written = 0;
    for (const mpz_class& n : unsynced_) {
        auto it = entries_.find(n);
        if (it == entries_.end()) continue;
        out << format_line(it->second) << '\n';
        ++written;
    }
    unsynced_.clear();
    return written;
}

}  // namespace ecgap
