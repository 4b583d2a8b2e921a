#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <limits>
#include <map>
#include <ostream>
#include <vector>

#include "ecgap/curve.hpp"
#include "ecgap/factor.hpp"

namespace ecgap {

/// One audit row for the pair (n, epsilon). The factorization-dependent
/// fields (rad_d onward) are only meaningful when complete is true; a row
/// goes incomplete when factoring d ran out of budget. gap_siegel needs no
/// factorization and is always present.
struct GapRecord {
    unsigned long n = 0;
    double epsilon = 0;
    mpz_class a_abs;
    mpz_class d;
    bool complete = false;

    mpz_class rad_d, d_prime, v;
    std::vector<PrimePower> d_factors;

    double log_d = 0;
    double log_rad_d = 0, log_dprime = 0, log_v = 0;
    double gap_conj = 0;    // max(log a/2, log d) - (1+eps) log rad d
    double gap_siegel = 0;  // log a/2 - (1+eps) log d
    double gap_prop = 0;    // sum over t_i>1 of (t_i-1-eps) log p_i - eps log d'
    double gap_vq = 0;      // log v - eps log rad d
};

struct AuditOptions {
    std::vector<double> epsilons = {0, 0.1, 0.2, 0.5, 1.0};
    std::uint64_t factor_budget = 8'000'000;
    FactorCache* cache = nullptr;
};

/// Walks the orbit P0, 2*P0, ..., N*P0, factoring each denominator (primes
/// found along the orbit are fed back as hints -- by the divisibility
/// property they recur), and emits one record per (n, epsilon), sorted.
/// Throws TorsionBase when P0 is torsion. Budget exhaustion on one n marks
/// those rows incomplete instead of failing the audit.
std::vector<GapRecord> audit_orbit(const Curve& E, const RationalPoint& P0,
                                   unsigned long N,
                                   const AuditOptions& opt = {});

/// log rad(d_P); 0 exactly for integral points. Throws IdentityPoint.
double log_conductor(const RationalPoint& P, const FactorOptions& opt = {});

struct StatSummary {
    double sup = -std::numeric_limits<double>::infinity();
    unsigned long argmax_n = 0;  // smallest n attaining the sup
};

struct EpsilonSummary {
    StatSummary conj, siegel, prop, vq;
    std::vector<unsigned long> incomplete_rows;
};

/// Per-epsilon suprema over the complete rows (the empirical candidates for
/// the inequality constants); incomplete rows are listed, not mixed in.
/// Throws EmptyInput on an empty record list.
std::map<double, EpsilonSummary> empirical_constants(
    const std::vector<GapRecord>& records);

struct ScanResult {
    std::vector<std::size_t> perfect_power;  // record indices, d = b^k
    std::vector<std::size_t> small_d_prime;  // record indices, d' <= bound
};

/// Flags rows whose denominator is a perfect power or whose squarefree part
/// is at most dprime_bound; finitely many flags are expected as N grows.
/// Incomplete rows are skipped (their split is unknown).
ScanResult scan_special_denominators(const std::vector<GapRecord>& records,
                                     const mpz_class& dprime_bound);

/// CSV with header n,epsilon,digits_d,log_d,log_rad_d,log_dprime,log_v,
/// gap_conj,gap_siegel,gap_prop,gap_vq,flags,status; LF endings; cells that
/// need a completed factorization stay empty on incomplete rows.
void write_csv(std::ostream& out, const std::vector<GapRecord>& records,
               const mpz_class& dprime_bound = 1);

}  // namespace ecgap
