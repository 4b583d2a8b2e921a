#include <benchmark/benchmark.h>

#include "ecgap/curve.hpp"
#include "ecgap/eds.hpp"
#include "ecgap/factor.hpp"
#include "ecgap/wieferich.hpp"

using namespace ecgap;

namespace {

const Curve& fixture_curve() {
    static const Curve E = Curve::short_form(0, -2);
    return E;
}

const RationalPoint& fixture_point() {
    static const RationalPoint P = decompose(fixture_curve(), 3, 5);
    return P;
}

void BM_psi_mod_ladder(benchmark::State& state) {
    const Curve& E = fixture_curve();
    const RationalPoint& P = fixture_point();
    const mpz_class modulus = mpz_class(1'000'003) * 1'000'003 * 1'000'003;
    const auto m = static_cast<unsigned long>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(psi_mod(E, m, P, modulus));
}
BENCHMARK(BM_psi_mod_ladder)->Arg(100)->Arg(10'000)->Arg(1'000'000);

void BM_count_points(benchmark::State& state) {
    const Curve& E = fixture_curve();
    const auto p = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(count_points(E, p, 1ull << 24));
}
BENCHMARK(BM_count_points)->Arg(10'007)->Arg(1'000'003);

void BM_classify_prime(benchmark::State& state) {
    const Curve& E = fixture_curve();
    const RationalPoint& P = fixture_point();
    const auto p = static_cast<std::uint64_t>(state.range(0));
    WieferichOptions opt;
    opt.pcount_cap = 1ull << 24;
    for (auto _ : state)
        benchmark::DoNotOptimize(classify_prime(E, P, p, opt));
}
BENCHMARK(BM_classify_prime)->Arg(10'007)->Arg(1'000'003);

void BM_factor_u64(benchmark::State& state) {
    // 60-bit semiprime: the standard hard case below the mpz threshold
    const mpz_class n = mpz_class("1073741827") * mpz_class("1073741831");
    for (auto _ : state)
        benchmark::DoNotOptimize(factor(n));
}
BENCHMARK(BM_factor_u64);

void BM_rational_add(benchmark::State& state) {
    const Curve& E = fixture_curve();
    const RationalPoint& P = fixture_point();
    const RationalPoint Q = mul(E, state.range(0), P);
    for (auto _ : state)
        benchmark::DoNotOptimize(add(E, Q, P));
}
BENCHMARK(BM_rational_add)->Arg(10)->Arg(40);

void BM_orbit_denominator(benchmark::State& state) {
    const Curve& E = fixture_curve();
    const RationalPoint& P = fixture_point();
    const auto n = static_cast<unsigned long>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(mul(E, mpz_class(n), P).d());
}
BENCHMARK(BM_orbit_denominator)->Arg(16)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
