// Serial reference vs OpenMP kernels. Usage: bench_kernels [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include <omp.h>

#include "ftl2lwr/kernels.hpp"
#include "ftl2lwr/lwr_ref.hpp"
#include "ftl2lwr/reconstruct.hpp"

using namespace ftl2lwr;

namespace {

template <class F>
double best_of(int repeats, F&& body)
{
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        body();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

void report(const char* name, double serial, double parallel)
{
    std::printf("%-28s serial %10.3f ms   parallel %10.3f ms   speedup %5.2fx\n", name, 1e3 * serial, 1e3 * parallel,
                serial / parallel);
}

} // namespace

int main(int argc, char** argv)
{
    const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());

    const VelocityModel g = greenshields();
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    for (std::size_t n : {std::size_t{10000}, std::size_t{1000000}}) {
        std::printf("n = %zu\n", n);
        std::vector<double> u(n);
        for (double& x : u)
            x = unit(rng);
        volatile double sink = 0;
        report("godunov step", best_of(repeats, [&] { sink = serial::godunov_step(u, 0.45, g)[n / 2]; }),
               best_of(repeats, [&] { sink = godunov_step(u, 0.45, g)[n / 2]; }));

        const double ell = 1.0 / static_cast<double>(n + 1);
        std::vector<double> z(n), s(n);
        for (std::size_t k = 1; k < n; ++k)
            z[k] = z[k - 1] + ell * (1.0 + 3.0 * unit(rng));
        report("ftl speeds", best_of(repeats, [&] { serial::ftl_speeds(z, s, ell, g); }),
               best_of(repeats, [&] { parallel::ftl_speeds(z, s, ell, g); }));
        (void)sink;
    }

    std::vector<double> times;
    for (int k = 1; k <= 256; ++k)
        times.push_back(k / 256.0);
    const Trajectory tr = simulate(initial_positions(riemann_density(0.2, 0.8), 2000), g, 1.0, times);
    const double ks[] = {0.0, 0.25, 0.5, 0.75, 1.0};
    const BumpTestFunction phi{0.5, 0.0, 0.25, 0.25};
    report("entropy residuals (N=2000)", best_of(repeats, [&] { serial::kruzkov_residuals(tr, g, ks, phi); }),
           best_of(repeats, [&] { kruzkov_residuals(tr, g, ks, phi); }));
    return 0;
}
