// OpenMP kernels against their serial references: response preparation and assembly.

#include "antonov/response.hpp"

#include <benchmark/benchmark.h>

using namespace antonov;

namespace {

struct Instance {
    SteadyState ss;
    FrequencyMap fm;
    PotentialDensityBasis basis;
    ResponseOptions ro;
    ResponseKernel kernel;
};

const Instance& instance()
{
    static const Instance in = [] {
        auto ss = solve_equilibrium(DistributionFunction::polytrope(1.0, 1.0), nullptr, 1.0);
        MapOptions mo;
        mo.nE = mo.nL = 16;
        auto fm = build_frequency_map(ss, mo);
        PotentialDensityBasis basis(ss.R0(), 12, BasisFamily::bessel, 1.5);
        ResponseOptions ro;
        ro.k_max = 6;
        auto kernel = prepare_response(fm, basis, ro);
        return Instance{std::move(ss), std::move(fm), std::move(basis), ro, std::move(kernel)};
    }();
    return in;
}

void BM_prepare_parallel(benchmark::State& st)
{
    const auto& in = instance();
    for (auto _ : st) benchmark::DoNotOptimize(prepare_response(in.fm, in.basis, in.ro));
}

void BM_prepare_serial(benchmark::State& st)
{
    const auto& in = instance();
    for (auto _ : st) benchmark::DoNotOptimize(prepare_response_serial(in.fm, in.basis, in.ro));
}

void BM_assemble_parallel(benchmark::State& st)
{
    const auto& in = instance();
    const double lam = 0.5 * in.fm.omega_star * in.fm.omega_star;
    for (auto _ : st) benchmark::DoNotOptimize(assemble_response(in.kernel, lam));
}

void BM_assemble_serial(benchmark::State& st)
{
    const auto& in = instance();
    const double lam = 0.5 * in.fm.omega_star * in.fm.omega_star;
    for (auto _ : st) benchmark::DoNotOptimize(assemble_response_serial(in.kernel, lam));
}

}  // namespace

BENCHMARK(BM_prepare_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_prepare_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_assemble_parallel)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_assemble_serial)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
