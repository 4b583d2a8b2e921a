#include "ecgap/audit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "ecgap/errors.hpp"
#include "ecgap/numeric.hpp"

namespace ecgap {

std::vector<GapRecord> audit_orbit(const Curve& E, const RationalPoint& P0,
                                   unsigned long N, const AuditOptions& opt) {
    if (N < 1) throw PreconditionViolated("audit needs N >= 1");
    if (opt.epsilons.empty())
        throw PreconditionViolated("audit needs at least one epsilon");
    for (double e : opt.epsilons)
        if (!(e >= 0)) throw PreconditionViolated("epsilon must be >= 0");
    if (P0.is_identity()) throw TorsionBase("base point is the identity");
    if (auto t = is_torsion(E, P0); t.is_torsion)
        throw TorsionBase("base point is torsion of order " +
                          std::to_string(t.order));

    std::vector<double> eps = opt.epsilons;
    std::sort(eps.begin(), eps.end());
    eps.erase(std::unique(eps.begin(), eps.end()), eps.end());

    // Primes seen along the orbit; d_{mP} | d_{nP} for m | n, so they keep
    // paying off as hints and rho only ever sees the new part of each d.
    std::vector<mpz_class> pool;
    std::set<mpz_class> pool_seen;

    std::vector<GapRecord> rows;
    rows.reserve(N * eps.size());

    RationalPoint Q = P0;
    for (unsigned long n = 1; n <= N; ++n) {
        const mpz_class a_abs = abs(Q.a());
        const mpz_class d = Q.d();
        FactorOptions fopt;
        fopt.rho_budget = opt.factor_budget;
        fopt.cache = opt.cache;
        fopt.hint_primes = &pool;
        bool complete = true;
        FactoredInteger fd;
        try {
            fd = factor(d, fopt);
        } catch (const BudgetExceeded&) {
            complete = false;
        }

        mpz_class rad_d, d_prime, v;
        double log_rad = 0, log_dp = 0, log_v = 0;
        if (complete) {
            rad_d = radical(fd);
            const SqfreeSplit split = sqfree_split(fd);
            d_prime = split.d_prime;
            v = split.v;
            log_rad = log_abs(rad_d);
            log_dp = log_abs(d_prime);
            log_v = log_abs(v);
            for (const auto& pp : fd.factors())
                if (pool_seen.insert(pp.prime).second) pool.push_back(pp.prime);
        }
        const double half_log_a = 0.5 * log_abs(a_abs);
        const double log_d = log_abs(d);

        for (double e : eps) {
            GapRecord r;
            r.n = n;
            r.epsilon = e;
            r.a_abs = a_abs;
            r.d = d;
            r.complete = complete;
            r.log_d = log_d;
            r.gap_siegel = half_log_a - (1 + e) * log_d;
            if (complete) {
                r.rad_d = rad_d;
                r.d_prime = d_prime;
                r.v = v;
                r.d_factors = fd.factors();
                r.log_rad_d = log_rad;
                r.log_dprime = log_dp;
                r.log_v = log_v;
                r.gap_conj = std::max(half_log_a, log_d) - (1 + e) * log_rad;
                double prop = 0;
                for (const auto& pp : fd.factors())
                    if (pp.exponent > 1)
                        prop += (pp.exponent - 1 - e) * log_abs(pp.prime);
                r.gap_prop = prop - e * log_dp;
                r.gap_vq = log_v - e * log_rad;
            }
            rows.push_back(std::move(r));
        }
        if (n < N) Q = add(E, Q, P0);
    }
    return rows;
}

double log_conductor(const RationalPoint& P, const FactorOptions& opt) {
    if (P.is_identity()) throw IdentityPoint("log-conductor undefined at O");
    return log_abs(radical(factor(P.d(), opt)));
}

namespace {

void take_max(StatSummary& s, double val, unsigned long n) {
    if (val > s.sup) {
        s.sup = val;
        s.argmax_n = n;
    }
}

}  // namespace

std::map<double, EpsilonSummary> empirical_constants(
    const std::vector<GapRecord>& records) {
    if (records.empty()) throw EmptyInput("no audit records");
    std::map<double, EpsilonSummary> out;
    for (const auto& r : records) {
        EpsilonSummary& s = out[r.epsilon];
        if (!r.complete) {
            s.incomplete_rows.push_back(r.n);
            continue;
        }
        take_max(s.conj, r.gap_conj, r.n);
        take_max(s.siegel, r.gap_siegel, r.n);
        take_max(s.prop, r.gap_prop, r.n);
        take_max(s.vq, r.gap_vq, r.n);
    }
    return out;
}

ScanResult scan_special_denominators(const std::vector<GapRecord>& records,
                                     const mpz_class& dprime_bound) {
    ScanResult out;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const GapRecord& r = records[i];
        if (!r.complete) continue;
        if (is_perfect_power(r.d).is_power) out.perfect_power.push_back(i);
        if (r.d_prime <= dprime_bound) out.small_d_prime.push_back(i);
    }
    return out;
}

void write_csv(std::ostream& out, const std::vector<GapRecord>& records,
               const mpz_class& dprime_bound) {
    out << "n,epsilon,digits_d,log_d,log_rad_d,log_dprime,log_v,gap_conj,"
           "gap_siegel,gap_prop,gap_vq,flags,status\n";
    for (const GapRecord& r : records) {
        out << r.n << ',' << format_real(r.epsilon) << ','
            << decimal_digits(r.d) << ',' << format_real(r.log_d) << ',';
        if (r.complete) {
            out << format_real(r.log_rad_d) << ',' << format_real(r.log_dprime)
                << ',' << format_real(r.log_v) << ','
                << format_real(r.gap_conj) << ','
                << format_real(r.gap_siegel) << ','
                << format_real(r.gap_prop) << ',' << format_real(r.gap_vq)
                << ',';
            std::string flags;
            if (is_perfect_power(r.d).is_power) flags += "perfect_power";
            if (r.d_prime <= dprime_bound) {
                if (!flags.empty()) flags += ';';
                flags += "small_dprime";
            }
            out << flags << ",ok\n";
        } else {
            out << ",,,," << format_real(r.gap_siegel) << ",,,,incomplete\n";
        }
    }
}

}  // namespace ecgap
