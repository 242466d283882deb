#include "obata/batch.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <random>

#include <omp.h>

namespace obata {

std::string to_string(ExecPolicy p) { return p == ExecPolicy::serial ? "serial" : "parallel"; }

int parallel_threads() { return omp_get_max_threads(); }

namespace {

// Runs body(i) for i in [0, count); rethrows the exception of the lowest failing index.
template <class Body>
void for_each_index(int count, ExecPolicy policy, Body body) {
    if (policy == ExecPolicy::serial) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < count; ++i) {
        try {
            body(i);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace

std::vector<Vec> seeded_interior_starts(const Region& region, const ObataFunction& f, int count, std::uint64_t seed,
                                        int sign) {
    require(count >= 0, "count must be non-negative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g;
    const int dim = region.n() + 1;
    std::vector<Vec> out;
    long attempts = 0;
    while (static_cast<int>(out.size()) < count) {
        if (++attempts > 1000L * (count + 1)) throw NumericalError("could not sample interior starts");
        Vec y(dim);
        for (int i = 0; i < dim; ++i) y(i) = g(rng);
        if (y.norm() == 0) continue;
        y.normalize();
        const double v = f.value(y);
        if (region.residual(y) >= -1e-6 || std::abs(v) <= 1e-6 || f.gradient(y).norm() <= 1e-4) continue;
        if ((sign > 0 && v < 0) || (sign < 0 && v > 0)) continue;
        out.push_back(y);
    }
    return out;
}

std::vector<Vec> seeded_boundary_points(const Region& region, int count, std::uint64_t seed) {
    require(count >= 0, "count must be non-negative");
    std::mt19937_64 rng(seed);
    std::vector<Vec> out;
    for (int i = 0; i < count; ++i) out.push_back(region.sample_boundary(rng));
    return out;
}

std::vector<FlowBatchRow> flow_batch(const Region& region, const ObataFunction& f, const std::vector<Vec>& starts,
                                     double dt, double t_max, ExecPolicy policy) {
    std::vector<FlowBatchRow> rows(starts.size());
    for_each_index(static_cast<int>(starts.size()), policy, [&](int i) {
        FlowOptions opt;
        opt.dt = dt;
        opt.t_max = t_max;
        const double v = f.value(starts[i]);
        opt.direction = v >= 0 ? FlowDirection::forward : FlowDirection::backward;
        const auto trace = normalized_gradient_flow(f, SpherePoint(starts[i]), &region, opt);
        FlowBatchRow& r = rows[i];
        r.index = i;
        r.start = starts[i];
        r.f_start = v;
        r.event = trace.terminal_event;
        r.terminal_time = trace.terminal_time;
        r.conservation = trace.defects.conservation;
    });
    return rows;
}

std::vector<ShapeBatchRow> shape_batch(const ModelDomain& domain, const std::vector<Vec>& points, double tol,
                                       ExecPolicy policy) {
    require(tol > 0, "tolerance must be positive");
    require(domain.side() == Side::complement, "shape sampling uses the complement side");
    const auto model = model_boundary_spectrum(domain.n(), domain.m(), domain.matched_robin_coefficient());
    std::vector<ShapeBatchRow> rows(points.size());
    for_each_index(static_cast<int>(points.size()), policy, [&](int i) {
        ShapeBatchRow& r = rows[i];
        r.index = i;
        r.point = points[i];
        r.spectrum = numeric_second_fundamental(domain, SpherePoint(points[i]));
        r.matches = r.spectrum.matches(model, tol);
        if (r.spectrum.entries.size() != model.entries.size()) {
            r.max_deviation = std::numeric_limits<double>::infinity();
            return;
        }
        for (std::size_t k = 0; k < model.entries.size(); ++k) {
            if (r.spectrum.entries[k].multiplicity != model.entries[k].multiplicity) {
                r.max_deviation = std::numeric_limits<double>::infinity();
                return;
            }
            r.max_deviation =
                std::max(r.max_deviation, std::abs(r.spectrum.entries[k].value - model.entries[k].value));
        }
    });
    return rows;
}

EigenCell robin_cap_cell(int n, double theta, int ell_max) {
    require(theta > 0 && theta < kPi / 2, "theta must lie in (0, pi/2)");
    EigenCell c;
    c.n = n;
    c.R = kPi / 2 - theta;
    c.bc = BoundaryCondition::robin(std::cos(theta) / std::sin(theta));
    c.ell_max = ell_max;
    return c;
}

std::vector<EigenResult> eigen_sweep(const std::vector<EigenCell>& cells, const ShootingOptions& opt,
                                     ExecPolicy policy) {
    std::vector<EigenResult> out(cells.size());
    for_each_index(static_cast<int>(cells.size()), policy, [&](int i) {
        out[i] = first_eigenvalue_scan(cells[i].n, cells[i].R, cells[i].bc, cells[i].ell_max, opt);
    });
    return out;
}

}  // namespace obata
