#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ecgap/curve.hpp"
#include "ecgap/factor.hpp"

namespace ecgap {

enum class Verdict { NonWieferich, Wieferich, Excluded };

enum class ExcludedReason {
    None,
    PLessThan5,          // "p<5"
    BadReduction,        // "bad_reduction"
    DividesDP,           // "divides_dP"
    AnomalousUncovered,  // "anomalous_uncovered"
    PrecisionSaturated,  // "precision_saturated"
    CapExceeded,         // "cap_exceeded" (point count above the cap)
};

std::string to_string(Verdict v);
std::string to_string(ExcludedReason r);

struct ReductionData {
    std::uint64_t p = 0;
    std::uint64_t N_p = 0;      // #E(F_p); 0 when never computed
    std::uint64_t m_p = 0;      // order of P mod p
    std::uint64_t cofactor = 0; // N_p / m_p
};

struct PrimeVerdict {
    Verdict verdict = Verdict::Excluded;
    ExcludedReason reason = ExcludedReason::None;
    ReductionData red;
    unsigned e = 0;         // v_p(d_{m_p P}), truncated at the precision k
    bool saturated = false; // psi residue vanished mod p^k

    std::uint64_t p() const { return red.p; }
    /// "v=..;cof=..;sat=.." for classified primes, "reason=.." otherwise.
    std::string evidence() const;
};

/// #E(F_p) by the character sum p + 1 + sum_x chi(4x^3+b2x^2+2b4x+b6),
/// using a quadratic-residue bitmap and finite differences. Exact; checks
/// the Hasse bound. Throws BadReduction for p | disc and CapExceeded for
/// p above the cap.
std::uint64_t count_points(const Curve& E, std::uint64_t p,
                           std::uint64_t cap = 1ull << 22);

/// Order of P mod p in E(F_p), by dividing N_p down one prime at a time.
/// Throws PointAtInfinityModP when p | d_P.
std::uint64_t order_mod_p(const Curve& E, const RationalPoint& P,
                          std::uint64_t p, const FactoredInteger& N_p);

struct WieferichOptions {
    unsigned precision = 3;  // k for the mod-p^k valuation
    std::uint64_t pcount_cap = 1ull << 22;
    unsigned workers = 1;
    class VerdictCache* cache = nullptr;
};

/// Full chain for one prime: exclusion filters, N_p, m_p, then the p-adic
/// valuation e = v_p(d_{m_p P}). NonWieferich iff e = 1 and p does not
/// divide the cofactor; evidence problems become Excluded verdicts, never
/// wrong membership claims.
PrimeVerdict classify_prime(const Curve& E, const RationalPoint& P,
                            std::uint64_t p, const WieferichOptions& opt = {});

struct WieferichCount {
    std::uint64_t X = 0;
    std::uint64_t count = 0;           // non-Wieferich primes <= X
    std::uint64_t wieferich = 0;
    double bound = 0;                  // sqrt(log X)
    std::map<ExcludedReason, std::uint64_t> excluded;
    std::vector<PrimeVerdict> verdicts;  // ordered by p
};

/// Classifies every prime <= X (sieved); the verdict list and census are
/// identical regardless of worker count. Requires X <= pcount_cap, else
/// CapExceeded propagates (cap misconfiguration).
WieferichCount count_wieferich(const Curve& E, const RationalPoint& P,
                               std::uint64_t X,
                               const WieferichOptions& opt = {});

/// Per-(curve, point) verdict cache, persisted as "p,N_p,m_p,verdict,
/// evidence" lines. Rows failing re-validation (Hasse bound, m_p | N_p,
/// unknown tokens) are dropped on load. Not internally synchronized; used
/// from the orchestrating thread only.
class VerdictCache {
  public:
    std::optional<PrimeVerdict> lookup(std::uint64_t p) const;
    void remember(const PrimeVerdict& v);
    std::size_t size() const { return entries_.size(); }

    std::size_t load(const std::string& path);
    std::size_t append_new_to(const std::string& path);

    static std::string format_line(const PrimeVerdict& v);
    static std::optional<PrimeVerdict> parse_line(const std::string& line);

  private:
    std::map<std::uint64_t, PrimeVerdict> entries_;
    std::vector<std::uint64_t> unsynced_;
};

}  // namespace ecgap
