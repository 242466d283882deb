#pragma once

// Batch kernels over independent cells: flow starts, shape-operator samples
// and eigenvalue cells. Each kernel has a serial reference path and an OpenMP
// path; both fill results by index and return identical output.

#include "obata/flow.hpp"
#include "obata/geometry.hpp"
#include "obata/spectral.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace obata {

enum class ExecPolicy { serial, parallel };

std::string to_string(ExecPolicy p);

/// Interior points of `region` drawn from a seeded stream. sign > 0 keeps
/// f > 0, sign < 0 keeps f < 0, sign == 0 keeps both (|f| > 1e-6 always).
std::vector<Vec> seeded_interior_starts(const Region& region, const ObataFunction& f, int count, std::uint64_t seed,
                                        int sign);
std::vector<Vec> seeded_boundary_points(const Region& region, int count, std::uint64_t seed);

struct FlowBatchRow {
    int index = 0;
    Vec start;
    double f_start = 0;
    TerminalEvent event = TerminalEvent::time_exhausted;
    double terminal_time = 0;
    double conservation = 0;
};

/// Forward flow from f > 0 starts, backward from f < 0 starts.
std::vector<FlowBatchRow> flow_batch(const Region& region, const ObataFunction& f, const std::vector<Vec>& starts,
                                     double dt, double t_max, ExecPolicy policy);

struct ShapeBatchRow {
    int index = 0;
    Vec point;
    SecondFundamentalSpectrum spectrum;
    double max_deviation = 0;  // largest eigenvalue gap to the model; inf on structure mismatch
    bool matches = false;
};

/// Finite-difference principal curvatures at each point of a complement domain
/// against {(-a, n-1-m), (1/a, m)}.
std::vector<ShapeBatchRow> shape_batch(const ModelDomain& domain, const std::vector<Vec>& points, double tol,
                                       ExecPolicy policy);

struct EigenCell {
    int n = 2;
    double R = kPi / 4;
    BoundaryCondition bc;
    int ell_max = 3;
};

/// Robin cap cell of radius pi/2 - theta with a = cot(theta).
EigenCell robin_cap_cell(int n, double theta, int ell_max = 3);

std::vector<EigenResult> eigen_sweep(const std::vector<EigenCell>& cells, const ShootingOptions& opt,
                                     ExecPolicy policy);

/// Threads used by the parallel path.
int parallel_threads();

}  // namespace obata
