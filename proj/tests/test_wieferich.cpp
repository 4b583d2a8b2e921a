#include "doctest.h"

#include "ecgap/curve.hpp"
#include "ecgap/errors.hpp"
#include "ecgap/factor.hpp"
#include "ecgap/primes.hpp"
#include "ecgap/wieferich.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

using namespace ecgap;
namespace fs = std::filesystem;

namespace {

// Exhaustive point count over F_p: one plus the number of affine solutions
// of y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6. Slow and obviously
// correct, which is the point.
std::uint64_t np_exhaustive(const Curve& E, std::uint64_t p) {
    auto m = [p](const mpz_class& z) {
        return mpz_fdiv_ui(z.get_mpz_t(), p);
    };
    const std::uint64_t a1 = m(E.a1()), a2 = m(E.a2()), a3 = m(E.a3()),
                        a4 = m(E.a4()), a6 = m(E.a6());
    std::uint64_t count = 1;
    for (std::uint64_t x = 0; x < p; ++x)
        for (std::uint64_t y = 0; y < p; ++y) {
            const std::uint64_t lhs = (y * y + a1 * x * y + a3 * y) % p;
            const std::uint64_t rhs =
                (((x * x % p) * x + a2 * x * x + a4 * x + a6) % p);
            if (lhs == rhs) ++count;
        }
    return count;
}

struct Fixture {
    Curve E;
    RationalPoint P;
};

std::vector<Fixture> fixtures() {
    Curve m = Curve::short_form(0, -2);
    Curve r(0, 0, 1, -1, 0);
    Curve e17 = Curve::short_form(0, 17);
    return {{m, decompose(m, 3, 5)},
            {r, decompose(r, 0, 0)},
            {e17, decompose(e17, -2, 3)}};
}

fs::path fresh_tmp(const char* stem) {
    auto p = fs::temp_directory_path() /
             (std::string(stem) + "." + std::to_string(::getpid()));
    fs::remove(p);
    return p;
}

}  // namespace

TEST_SUITE("wieferich") {

TEST_CASE("count_points matches the exhaustive oracle") {
    for (const auto& [E, P] : fixtures()) {
        auto bad = E.bad_primes();
        for (std::uint64_t p : {5, 7, 11, 13, 17, 19, 23}) {
            bool is_bad = false;
            for (const auto& b : bad) is_bad |= (b == p);
            if (is_bad) {
                CHECK_THROWS_AS(count_points(E, p), BadReduction);
                continue;
            }
            CHECK(count_points(E, p) == np_exhaustive(E, p));
        }
    }
}

TEST_CASE("count_points anchors") {
    Curve E = Curve::short_form(0, -2);
    CHECK(count_points(E, 5) == 6);
    CHECK(count_points(E, 7) == 7);  // anomalous: N_7 = 7
    Curve R(0, 0, 1, -1, 0);
    CHECK(count_points(R, 5) == 8);  // known trace a_5 = -2
}

TEST_CASE("count_points respects Hasse everywhere it runs") {
    Curve E = Curve::short_form(0, 17);
    for (std::uint32_t p : sieve_primes(500)) {
        if (p < 5 || p == 17) continue;
        const std::uint64_t n = count_points(E, p);
        const double t = static_cast<double>(n) - static_cast<double>(p) - 1.0;
        CHECK(t * t <= 4.0 * static_cast<double>(p));
    }
}

TEST_CASE("count_points argument checks") {
    Curve E = Curve::short_form(0, -2);
    CHECK_THROWS_AS(count_points(E, 4), PreconditionViolated);
    CHECK_THROWS_AS(count_points(E, 3), PreconditionViolated);
    CHECK_THROWS_AS(count_points(E, 9), PreconditionViolated);
    CHECK_THROWS_AS(count_points(E, 11, 10), CapExceeded);
}

TEST_CASE("order_mod_p") {
    Curve E = Curve::short_form(0, -2);
    auto P = decompose(E, 3, 5);
    // (3, 5) mod 5 = (3, 0) has order 2 in a group of order 6
    CHECK(order_mod_p(E, P, 5, factor(6)) == 2);
    // anomalous prime: group of order 7 is cyclic, P nontrivial
    CHECK(order_mod_p(E, P, 7, factor(7)) == 7);

    // the order always divides N_p, across fixtures and primes
    for (const auto& [C, Q] : fixtures()) {
        auto bad = C.bad_primes();
        for (std::uint64_t p : {5, 7, 11, 13, 19, 23}) {
            bool skip = false;
            for (const auto& b : bad) skip |= (b == p);
            if (!skip && !Q.is_identity()) skip = (Q.d() % p == 0);
            if (skip) continue;
            const std::uint64_t n = count_points(C, p);
            const std::uint64_t m = order_mod_p(C, Q, p, factor(n));
            CHECK(n % m == 0);
            CHECK(m >= 1);
        }
    }

    // a point whose denominator vanishes mod p reduces to O
    auto P2 = mul(E, 2, P);  // d = 10
    CHECK_THROWS_AS(order_mod_p(E, P2, 5, factor(6)), PointAtInfinityModP);
}

TEST_CASE("classify_prime full evidence at p = 5") {
    Curve E = Curve::short_form(0, -2);
    auto P = decompose(E, 3, 5);
    auto v = classify_prime(E, P, 5);
    CHECK(v.verdict == Verdict::NonWieferich);
    CHECK(v.red.p == 5);
    CHECK(v.red.N_p == 6);
    CHECK(v.red.m_p == 2);
    CHECK(v.red.cofactor == 3);
    CHECK(v.e == 1);
    CHECK_FALSE(v.saturated);
    CHECK(v.evidence() == "v=1;cof=3;sat=0");
}

TEST_CASE("classify_prime exclusions") {
    Curve E = Curve::short_form(0, -2);
    auto P = decompose(E, 3, 5);

    auto v2 = classify_prime(E, P, 2);
    CHECK(v2.verdict == Verdict::Excluded);
    CHECK(v2.reason == ExcludedReason::PLessThan5);
    CHECK(v2.evidence() == "reason=p<5");

    auto v3 = classify_prime(E, P, 3);  // also bad, but p < 5 wins
    CHECK(v3.reason == ExcludedReason::PLessThan5);

    Curve R(0, 0, 1, -1, 0);
    auto Z = decompose(R, 0, 0);
    auto v37 = classify_prime(R, Z, 37);
    CHECK(v37.verdict == Verdict::Excluded);
    CHECK(v37.reason == ExcludedReason::BadReduction);

    auto P2 = mul(E, 2, P);  // d = 10
    auto v5 = classify_prime(E, P2, 5);
    CHECK(v5.verdict == Verdict::Excluded);
    CHECK(v5.reason == ExcludedReason::DividesDP);

    WieferichOptions tiny;
    tiny.pcount_cap = 10;
    auto v11 = classify_prime(E, P, 11, tiny);
    CHECK(v11.verdict == Verdict::Excluded);
    CHECK(v11.reason == ExcludedReason::CapExceeded);

    CHECK_THROWS_AS(classify_prime(E, P, 9), PreconditionViolated);
    CHECK_THROWS_AS(classify_prime(E, RationalPoint::identity(), 5),
                    PreconditionViolated);
}

TEST_CASE("classify_prime agrees with exact-orbit valuations") {
    // independent oracle: e = v_p(d at m_p * P) computed with exact
    // arithmetic, and the verdict reduced to its definition
    for (const auto& [E, P] : fixtures()) {
        auto bad = E.bad_primes();
        for (std::uint64_t p : {5, 7, 11, 13, 17, 19}) {
            bool is_bad = false;
            for (const auto& b : bad) is_bad |= (b == p);
            auto v = classify_prime(E, P, p);
            if (is_bad || p < 5) {
                CHECK(v.verdict == Verdict::Excluded);
                continue;
            }
            REQUIRE(v.verdict != Verdict::Excluded);
            CHECK(v.red.N_p == np_exhaustive(E, p));
            CHECK(v.red.m_p * v.red.cofactor == v.red.N_p);

            auto Q = mul(E, mpz_class(static_cast<unsigned long>(v.red.m_p)),
                         P);
            REQUIRE(!Q.is_identity());
            mpz_class dm = Q.d(), tmp, pz(static_cast<unsigned long>(p));
            const unsigned want = static_cast<unsigned>(mpz_remove(
                tmp.get_mpz_t(), dm.get_mpz_t(), pz.get_mpz_t()));
            CHECK(v.e == want);
            REQUIRE(want >= 1);  // m_p P reduces to O, so p | d
            const bool nonwief =
                (want == 1) && (v.red.cofactor % p != 0);
            CHECK((v.verdict == Verdict::NonWieferich) == nonwief);
        }
    }
}

TEST_CASE("valuation grows along p * m steps") {
    // v_p(d_{pm P}) > v_p(d_{m P}): the formal-group step that the
    // precision-saturation logic relies on
    Curve E = Curve::short_form(0, -2);
    auto P = decompose(E, 3, 5);
    auto P2 = mul(E, 2, P);
    auto P10 = mul(E, 10, P);
    mpz_class t, d2 = P2.d(), d10 = P10.d(), five(5);
    auto v2 = mpz_remove(t.get_mpz_t(), d2.get_mpz_t(), five.get_mpz_t());
    auto v10 = mpz_remove(t.get_mpz_t(), d10.get_mpz_t(), five.get_mpz_t());
    CHECK(v2 == 1);
    CHECK(v10 == 2);
}

TEST_CASE("count_wieferich census at tiny X") {
    Curve E = Curve::short_form(0, -2);
    auto P = decompose(E, 3, 5);

    auto r4 = count_wieferich(E, P, 4);
    CHECK(r4.X == 4);
    CHECK(r4.count == 0);
    CHECK(r4.excluded[ExcludedReason::PLessThan5] == 2);  // p = 2, 3
    CHECK(r4.verdicts.size() == 2);

    auto r5 = count_wieferich(E, P, 5);
    CHECK(r5.count == 1);  // p = 5 qualifies
    CHECK(r5.bound == doctest::Approx(std::sqrt(std::log(5.0))));
    REQUIRE(r5.verdicts.size() == 3);
    CHECK(r5.verdicts[2].p() == 5);
    CHECK(r5.verdicts[2].verdict == Verdict::NonWieferich);
}

TEST_CASE("count_wieferich is monotone and consistent") {
    Curve E = Curve::short_form(0, 17);
    auto P = decompose(E, -2, 3);
    auto r100 = count_wieferich(E, P, 100);
    auto r200 = count_wieferich(E, P, 200);
    CHECK(r100.count <= r200.count);
    CHECK(r100.verdicts.size() == 25);
    CHECK(r200.verdicts.size() == 46);

    // the census tallies must add up to the number of primes
    std::uint64_t total = r200.count + r200.wieferich;
    for (const auto& [reason, c] : r200.excluded) total += c;
    CHECK(total == 46);

    // and every verdict is for the right prime, in order
    auto ps = sieve_primes(200);
    REQUIRE(ps.size() == r200.verdicts.size());
    for (std::size_t i = 0; i < ps.size(); ++i)
        CHECK(r200.verdicts[i].p() == ps[i]);
}

TEST_CASE("count_wieferich is worker-count independent") {
    Curve E = Curve::short_form(0, -2);
    auto P = decompose(E, 3, 5);
    WieferichOptions w1, w4;
    w1.workers = 1;
    w4.workers = 4;
    auto a = count_wieferich(E, P, 300, w1);
    auto b = count_wieferich(E, P, 300, w4);
    CHECK(a.count == b.count);
    CHECK(a.wieferich == b.wieferich);
    CHECK(a.excluded == b.excluded);
    REQUIRE(a.verdicts.size() == b.verdicts.size());
    for (std::size_t i = 0; i < a.verdicts.size(); ++i) {
        CHECK(a.verdicts[i].p() == b.verdicts[i].p());
        CHECK(a.verdicts[i].verdict == b.verdicts[i].verdict);
        CHECK(a.verdicts[i].evidence() == b.verdicts[i].evidence());
    }
}

TEST_CASE("count_wieferich rejects X above the cap") {
    Curve E = Curve::short_form(0, -2);
    auto P = decompose(E, 3, 5);
    WieferichOptions opt;
    opt.pcount_cap = 50;
    CHECK_THROWS_AS(count_wieferich(E, P, 100, opt), CapExceeded);
    CHECK_THROWS_AS(count_wieferich(E, RationalPoint::identity(), 10),
                    TorsionBase);
}

TEST_CASE("verdict cache line format") {
    Curve E = Curve::short_form(0, -2);
    auto P = decompose(E, 3, 5);
    auto v = classify_prime(E, P, 5);
    CHECK(VerdictCache::format_line(v) == "5,6,2,NonWieferich,v=1;cof=3;sat=0");
    auto back = VerdictCache::parse_line("5,6,2,NonWieferich,v=1;cof=3;sat=0");
    REQUIRE(back.has_value());
    CHECK(back->verdict == Verdict::NonWieferich);
    CHECK(back->red.N_p == 6);
    CHECK(back->red.m_p == 2);
    CHECK(back->red.cofactor == 3);
    CHECK(back->e == 1);

    auto excl = VerdictCache::parse_line("2,0,0,Excluded,reason=p<5");
    REQUIRE(excl.has_value());
    CHECK(excl->verdict == Verdict::Excluded);
    CHECK(excl->reason == ExcludedReason::PLessThan5);

    // validation drops corrupt rows
    CHECK_FALSE(VerdictCache::parse_line("garbage").has_value());
    CHECK_FALSE(VerdictCache::parse_line("4,5,1,NonWieferich,v=1;cof=5;sat=0")
                    .has_value());  // 4 is not prime
    CHECK_FALSE(VerdictCache::parse_line("5,20,2,NonWieferich,v=1;cof=10;sat=0")
                    .has_value());  // Hasse violation: |20-6| > 2*sqrt(5)
    CHECK_FALSE(VerdictCache::parse_line("5,6,4,NonWieferich,v=1;cof=1;sat=0")
                    .has_value());  // m_p does not divide N_p
    CHECK_FALSE(VerdictCache::parse_line("5,6,2,NonWieferich,v=1;cof=2;sat=0")
                    .has_value());  // cofactor inconsistent
    CHECK_FALSE(VerdictCache::parse_line("5,6,2,Maybe,v=1;cof=3;sat=0")
                    .has_value());  // unknown verdict token
    CHECK_FALSE(VerdictCache::parse_line("7,0,0,Excluded,reason=bogus")
                    .has_value());  // unknown reason token
}

TEST_CASE("verdict cache persistence and reuse") {
    Curve E = Curve::short_form(0, -2);
    auto P = decompose(E, 3, 5);
    VerdictCache cache;
    WieferichOptions opt;
    opt.cache = &cache;
    auto r = count_wieferich(E, P, 30, opt);
    CHECK(cache.size() == 10);  // primes up to 30

    auto path = fresh_tmp("ecgap_verdicts");
    CHECK(cache.append_new_to(path.string()) == 10);
    CHECK(cache.append_new_to(path.string()) == 0);

    VerdictCache reload;
    CHECK(reload.load(path.string()) == 10);
    auto hit = reload.lookup(5);
    REQUIRE(hit.has_value());
    CHECK(hit->verdict == Verdict::NonWieferich);
    CHECK(hit->evidence() == "v=1;cof=3;sat=0");

    // a corrupt line in the middle is dropped, the rest load fine
    {
        std::ofstream out(path, std::ios::app);
        out << "9,10,2,NonWieferich,v=1;cof=5;sat=0\n";
    }
    VerdictCache mixed;
    CHECK(mixed.load(path.string()) == 10);

    // cached verdicts short-circuit reclassification: a warm run with an
    // impossible cap still succeeds for every cached prime
    WieferichOptions warm;
    warm.cache = &reload;
    warm.pcount_cap = 40;
    auto r2 = count_wieferich(E, P, 30, warm);
    CHECK(r2.count == r.count);
    CHECK(r2.wieferich == r.wieferich);
    fs::remove(path);
}

TEST_CASE("verdict to_string round trips") {
    CHECK(to_string(Verdict::NonWieferich) == "NonWieferich");
    CHECK(to_string(Verdict::Wieferich) == "Wieferich");
    CHECK(to_string(Verdict::Excluded) == "Excluded");
    CHECK(to_string(ExcludedReason::PLessThan5) == "p<5");
    CHECK(to_string(ExcludedReason::BadReduction) == "bad_reduction");
    CHECK(to_string(ExcludedReason::DividesDP) == "divides_dP");
    CHECK(to_string(ExcludedReason::AnomalousUncovered) ==
          "anomalous_uncovered");
    CHECK(to_string(ExcludedReason::PrecisionSaturated) ==
          "precision_saturated");
    CHECK(to_string(ExcludedReason::CapExceeded) == "cap_exceeded");
}

}
