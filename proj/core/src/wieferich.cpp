#include "ecgap/wieferich.hpp"

#include <cmath>
#include <fstream>
#include <thread>

#include "ecgap/eds.hpp"
#include "ecgap/errors.hpp"
#include "ecgap/primes.hpp"

namespace ecgap {

namespace {

using u64 = std::uint64_t;

u64 addm(u64 a, u64 b, u64 p) {
    const u64 s = a + b;
    return s >= p ? s - p : s;
}

u64 subm(u64 a, u64 b, u64 p) { return a >= b ? a - b : a + p - b; }

u64 negm(u64 a, u64 p) { return a ? p - a : 0; }

u64 invm(u64 a, u64 p) { return powmod_u64(a, p - 2, p); }

struct FpCurve {
    u64 p, a1, a2, a3, a4;
};

struct FpPoint {
    bool inf = true;
    u64 x = 0, y = 0;
    bool operator==(const FpPoint&) const = default;
};

FpCurve reduce_curve(const Curve& E, u64 p) {
    return {p, mpz_fdiv_ui(E.a1().get_mpz_t(), p),
            mpz_fdiv_ui(E.a2().get_mpz_t(), p),
            mpz_fdiv_ui(E.a3().get_mpz_t(), p),
            mpz_fdiv_ui(E.a4().get_mpz_t(), p)};
}

FpPoint reduce_point(const FpCurve& C, const RationalPoint& P) {
    if (P.is_identity()) return {};
    const u64 p = C.p;
    const u64 d = mpz_fdiv_ui(P.d().get_mpz_t(), p);
    if (d == 0) return {};
    const u64 inv_d = invm(d, p);
    const u64 inv_d2 = mulmod_u64(inv_d, inv_d, p);
    const u64 x = mulmod_u64(mpz_fdiv_ui(P.a().get_mpz_t(), p), inv_d2, p);
    const u64 y = mulmod_u64(mpz_fdiv_ui(P.b().get_mpz_t(), p),
                             mulmod_u64(inv_d2, inv_d, p), p);
    return {false, x, y};
}

u64 neg_y(const FpCurve& C, const FpPoint& A) {
    return negm(addm(addm(A.y, mulmod_u64(C.a1, A.x, C.p), C.p), C.a3, C.p),
                C.p);
}

FpPoint fp_add(const FpCurve& C, const FpPoint& A, const FpPoint& B) {
    if (A.inf) return B;
    if (B.inf) return A;
    const u64 p = C.p;
    u64 num, den;
    if (A.x == B.x) {
        if (B.y == neg_y(C, A)) return {};
        const u64 x2 = mulmod_u64(A.x, A.x, p);
        num = subm(addm(addm(mulmod_u64(3 % p, x2, p),
                             mulmod_u64(2 % p, mulmod_u64(C.a2, A.x, p), p), p),
                        C.a4, p),
                   mulmod_u64(C.a1, A.y, p), p);
        den = addm(addm(addm(A.y, A.y, p), mulmod_u64(C.a1, A.x, p), p), C.a3,
                   p);
    } else {
        num = subm(B.y, A.y, p);
        den = subm(B.x, A.x, p);
    }
    const u64 lam = mulmod_u64(num, invm(den, p), p);
    const u64 x3 = subm(
        subm(subm(addm(mulmod_u64(lam, lam, p), mulmod_u64(C.a1, lam, p), p),
                  C.a2, p),
             A.x, p),
        B.x, p);
    const u64 y3 = subm(
        subm(subm(mulmod_u64(lam, subm(A.x, x3, p), p), A.y, p),
             mulmod_u64(C.a1, x3, p), p),
        C.a3, p);
    return {false, x3, y3};
}

FpPoint fp_mul(const FpCurve& C, u64 n, FpPoint base) {
    FpPoint acc;
    while (n) {
        if (n & 1) acc = fp_add(C, acc, base);
        base = fp_add(C, base, base);
        n >>= 1;
    }
    return acc;
}

}  // namespace

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::NonWieferich: return "NonWieferich";
        case Verdict::Wieferich: return "Wieferich";
        default: return "Excluded";
    }
}

std::string to_string(ExcludedReason r) {
    switch (r) {
        case ExcludedReason::PLessThan5: return "p<5";
        case ExcludedReason::BadReduction: return "bad_reduction";
        case ExcludedReason::DividesDP: return "divides_dP";
        case ExcludedReason::AnomalousUncovered: return "anomalous_uncovered";
        case ExcludedReason::PrecisionSaturated: return "precision_saturated";
        case ExcludedReason::CapExceeded: return "cap_exceeded";
        default: return "none";
    }
}

std::string PrimeVerdict::evidence() const {
    if (verdict == Verdict::Excluded) return "reason=" + to_string(reason);
    return "v=" + std::to_string(e) + ";cof=" + std::to_string(red.cofactor) +
           ";sat=" + (saturated ? std::string("1") : std::string("0"));
}

std::uint64_t count_points(const Curve& E, std::uint64_t p,
                           std::uint64_t cap) {
    if (p < 5) throw PreconditionViolated("count_points needs p >= 5");
    if (!is_prime(p)) throw PreconditionViolated("count_points needs a prime");
    if (p > cap) throw CapExceeded("p above the point-counting cap");
    if (mpz_divisible_ui_p(E.disc().get_mpz_t(), p))
        throw BadReduction("p divides the discriminant");

    const u64 b2 = mpz_fdiv_ui(E.b2().get_mpz_t(), p);
    const u64 b4 = mpz_fdiv_ui(E.b4().get_mpz_t(), p);
    const u64 b6 = mpz_fdiv_ui(E.b6().get_mpz_t(), p);

    std::vector<bool> qr(p, false);
    for (u64 i = 0; i <= (p - 1) / 2; ++i) qr[mulmod_u64(i, i, p)] = true;

    // g(x) = 4x^3 + b2 x^2 + 2 b4 x + b6 swept by finite differences; the
    // completed-square form makes chi(4) = 1 a non-issue.
    u64 g = b6;
    u64 d1 = (4 + b2 + addm(b4, b4, p)) % p;
    u64 d2 = (24 + addm(b2, b2, p)) % p;
    const u64 d3 = 24 % p;
    long long sum = 0;
    for (u64 x = 0; x < p; ++x) {
        if (g != 0) sum += qr[g] ? 1 : -1;
        g = addm(g, d1, p);
        d1 = addm(d1, d2, p);
        d2 = addm(d2, d3, p);
    }
    const u64 N = static_cast<u64>(static_cast<long long>(p + 1) + sum);
    const __int128 t =
        static_cast<__int128>(N) - static_cast<__int128>(p) - 1;
    if (t * t > static_cast<__int128>(4) * p)
        throw Error("point count violates the Hasse bound");
    return N;
}

std::uint64_t order_mod_p(const Curve& E, const RationalPoint& P,
                          std::uint64_t p, const FactoredInteger& N_p) {
    const FpCurve C = reduce_curve(E, p);
    const FpPoint Pb = reduce_point(C, P);
    if (Pb.inf && !P.is_identity())
        throw PointAtInfinityModP("p divides d_P");
    u64 m = mpz_get_ui(N_p.value().get_mpz_t());
    if (!fp_mul(C, m, Pb).inf)
        throw PreconditionViolated("N_p does not annihilate P mod p");
    for (const auto& pp : N_p.factors()) {
        const u64 q = mpz_get_ui(pp.prime.get_mpz_t());
        while (m % q == 0 && fp_mul(C, m / q, Pb).inf) m /= q;
    }
    return m;
}

PrimeVerdict classify_prime(const Curve& E, const RationalPoint& P,
                            std::uint64_t p, const WieferichOptions& opt) {
    if (P.is_identity())
        throw PreconditionViolated("classify_prime needs a non-identity point");
    PrimeVerdict v;
    v.red.p = p;
    if (p < 5) {
        v.reason = ExcludedReason::PLessThan5;
        return v;
    }
    if (!is_prime(p))
        throw PreconditionViolated("classify_prime needs a prime");
    if (mpz_divisible_ui_p(E.disc().get_mpz_t(), p)) {
        v.reason = ExcludedReason::BadReduction;
        return v;
    }
    if (mpz_divisible_ui_p(P.d().get_mpz_t(), p)) {
        v.reason = ExcludedReason::DividesDP;
        return v;
    }
    try {
        v.red.N_p = count_points(E, p, opt.pcount_cap);
    } catch (const CapExceeded&) {
        v.reason = ExcludedReason::CapExceeded;
        return v;
    }
    const FactoredInteger fN =
        factor(mpz_class(static_cast<unsigned long>(v.red.N_p)));
    v.red.m_p = order_mod_p(E, P, p, fN);
    v.red.cofactor = v.red.N_p / v.red.m_p;

    const mpz_class pz(static_cast<unsigned long>(p));
    const PadicValuation val =
        denom_valuation_via_psi(E, pz, v.red.m_p, P, opt.precision);
    v.e = val.value;
    v.saturated = val.saturated;
    const bool anomalous = v.red.N_p % p == 0;
    const bool p_div_cof = v.red.cofactor % p == 0;
    if (val.saturated || v.e == 0) {
        if (v.e == 0 && !anomalous)
            throw Error("psi valuation 0 for an annihilating multiple");
        v.reason = anomalous ? ExcludedReason::AnomalousUncovered
                             : ExcludedReason::PrecisionSaturated;
        return v;
    }
    if (v.e == 1 && !p_div_cof)
        v.verdict = Verdict::NonWieferich;
    else
        v.verdict = Verdict::Wieferich;
    return v;
}

WieferichCount count_wieferich(const Curve& E, const RationalPoint& P,
                               std::uint64_t X, const WieferichOptions& opt) {
    if (P.is_identity()) throw TorsionBase("base point is the identity");
    if (auto t = is_torsion(E, P); t.is_torsion)
        throw TorsionBase("base point is torsion of order " +
                          std::to_string(t.order));
    if (X > opt.pcount_cap)
        throw CapExceeded("x-max above the point-counting cap");
    if (X > 0xffffffffull) throw CapExceeded("x-max too large to sieve");

    const std::vector<std::uint32_t> primes =
        sieve_primes(static_cast<std::uint32_t>(X));
    std::vector<PrimeVerdict> verdicts(primes.size());
    std::vector<char> cached(primes.size(), 0);
    if (opt.cache) {
        for (std::size_t i = 0; i < primes.size(); ++i) {
            if (auto hit = opt.cache->lookup(primes[i])) {
                verdicts[i] = *hit;
                cached[i] = 1;
            }
        }
    }

    const unsigned workers = std::max(1u, opt.workers);
    auto run_slice = [&](unsigned t) {
        for (std::size_t i = t; i < primes.size(); i += workers)
            if (!cached[i]) verdicts[i] = classify_prime(E, P, primes[i], opt);
    };
    if (workers == 1) {
        run_slice(0);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < workers; ++t)
            pool.emplace_back(run_slice, t);
        run_slice(0);
        for (auto& th : pool) th.join();
    }

    WieferichCount out;
    out.X = X;
    out.bound = std::sqrt(std::max(0.0, std::log(static_cast<double>(X))));
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const PrimeVerdict& v = verdicts[i];
        switch (v.verdict) {
            case Verdict::NonWieferich: ++out.count; break;
            case Verdict::Wieferich: ++out.wieferich; break;
            case Verdict::Excluded: ++out.excluded[v.reason]; break;
        }
        if (opt.cache && !cached[i]) opt.cache->remember(v);
    }
    out.verdicts = std::move(verdicts);
    return out;
}

std::optional<PrimeVerdict> VerdictCache::lookup(std::uint64_t p) const {
    auto it = entries_.find(p);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void VerdictCache::remember(const PrimeVerdict& v) {
    auto [it, inserted] = entries_.emplace(v.p(), v);
    if (!inserted) {
        it->second = v;
        return;  // replacing an already-persisted row is not re-appended
    }
    unsynced_.push_back(v.p());
}

std::string VerdictCache::format_line(const PrimeVerdict& v) {
    return std::to_string(v.p()) + "," + std::to_string(v.red.N_p) + "," +
           std::to_string(v.red.m_p) + "," + to_string(v.verdict) + "," +
           v.evidence();
}

std::optional<PrimeVerdict> VerdictCache::parse_line(const std::string& line) {
    std::vector<std::string> parts;
    std::size_t pos = 0;
    while (parts.size() < 4) {
        const auto c = line.find(',', pos);
        if (c == std::string::npos) return std::nullopt;
        parts.push_back(line.substr(pos, c - pos));
        pos = c + 1;
    }
    parts.push_back(line.substr(pos));  // evidence (may contain '=' and ';')
    try {
        PrimeVerdict v;
        v.red.p = std::stoull(parts[0]);
        v.red.N_p = std::stoull(parts[1]);
        v.red.m_p = std::stoull(parts[2]);
        if (parts[3] == "NonWieferich")
            v.verdict = Verdict::NonWieferich;
        else if (parts[3] == "Wieferich")
            v.verdict = Verdict::Wieferich;
        else if (parts[3] == "Excluded")
            v.verdict = Verdict::Excluded;
        else
            return std::nullopt;
        if (!is_prime(v.red.p)) return std::nullopt;

        if (v.verdict == Verdict::Excluded) {
            if (parts[4].rfind("reason=", 0) != 0) return std::nullopt;
            const std::string r = parts[4].substr(7);
            bool known = false;
            for (auto reason :
                 {ExcludedReason::PLessThan5, ExcludedReason::BadReduction,
                  ExcludedReason::DividesDP, ExcludedReason::AnomalousUncovered,
                  ExcludedReason::PrecisionSaturated,
                  ExcludedReason::CapExceeded}) {
                if (r == to_string(reason)) {
                    v.reason = reason;
                    known = true;
                    break;
                }
            }
            if (!known) return std::nullopt;
            return v;
        }

        // classified row: evidence v=..;cof=..;sat=..
        unsigned e = 0;
        u64 cof = 0;
        int sat = -1;
        std::size_t epos = 0;
        const std::string& ev = parts[4];
        while (epos < ev.size()) {
            auto semi = ev.find(';', epos);
            if (semi == std::string::npos) semi = ev.size();
            const std::string term = ev.substr(epos, semi - epos);
            const auto eq = term.find('=');
            if (eq == std::string::npos) return std::nullopt;
            const std::string key = term.substr(0, eq);
            const std::string valstr = term.substr(eq + 1);
            if (key == "v")
                e = static_cast<unsigned>(std::stoul(valstr));
            else if (key == "cof")
                cof = std::stoull(valstr);
            else if (key == "sat")
                sat = std::stoi(valstr);
            else
                return std::nullopt;
            epos = semi + 1;
        }
        if (sat < 0) return std::nullopt;
        v.e = e;
        v.saturated = sat != 0;
        v.red.cofactor = cof;

        // re-validation: Hasse bound, divisibility, cofactor consistency
        const u64 p = v.red.p;
        const __int128 t = static_cast<__int128>(v.red.N_p) -
                           static_cast<__int128>(p) - 1;
        if (t * t > static_cast<__int128>(4) * p) return std::nullopt;
        if (v.red.m_p == 0 || v.red.N_p % v.red.m_p != 0) return std::nullopt;
        if (v.red.N_p / v.red.m_p != cof) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

std::size_t VerdictCache::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) return 0;
    std::size_t accepted = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (auto v = parse_line(line)) {
            entries_.insert_or_assign(v->p(), *v);
            ++accepted;
        }
    }
    return accepted;
}

std::size_t VerdictCache::append_new_to(const std::string& path) {
    if (unsynced_.empty()) return 0;
    std::ofstream out(path, std::ios::app);
    if (!out) throw Error("cannot open verdict cache file: " + path);
    std::size_t written = 0;
    for (u64 p : unsynced_) {
        auto it = entries_.find(p);
        if (it == entries_.end()) continue;
        out << format_line(it->second) << '\n';
        ++written;
    }
    unsynced_.clear();
    return written;
}

}  // namespace ecgap
