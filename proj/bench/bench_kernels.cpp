#include "obata/batch.hpp"

#include <chrono>
#include <cstdio>
#include <functional>

using namespace obata;

namespace {

double seconds(const std::function<void()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(const char* name, const std::function<void(ExecPolicy)>& kernel) {
    const double s = seconds([&] { kernel(ExecPolicy::serial); });
    const double p = seconds([&] { kernel(ExecPolicy::parallel); });
    std::printf("%-16s serial %8.3f s  parallel %8.3f s  speedup %5.2fx\n", name, s, p, s / p);
}

}  // namespace

int main() {
    std::printf("threads: %d\n", parallel_threads());

    const auto domain = make_model_domain(4, 1, 0.7, Side::complement);
    const auto f = ObataFunction::height(4);
    const auto starts = seeded_interior_starts(domain, f, 200, 1, 0);
    report("flow starts", [&](ExecPolicy p) { flow_batch(domain, f, starts, 1e-3, 10, p); });

    const auto points = seeded_boundary_points(domain, 2000, 2);
    report("shape operators", [&](ExecPolicy p) { shape_batch(domain, points, kClusterTol, p); });

    std::vector<EigenCell> cells;
    for (int n = 2; n <= 5; ++n)
        for (double t : {kPi / 6, kPi / 4, kPi / 3}) cells.push_back(robin_cap_cell(n, t));
    report("eigen sweep", [&](ExecPolicy p) { eigen_sweep(cells, {}, p); });
    return 0;
}
