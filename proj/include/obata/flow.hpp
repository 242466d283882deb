#pragma once

// Normalized gradient flows of linear Obata functions on S^n and on model
// boundaries, with terminal-event classification and invariant defects.

#include "obata/geometry.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace obata {

enum class TerminalEvent { interior_max, interior_min, boundary_hit, time_exhausted };
enum class FlowDirection { forward, backward };

std::string to_string(TerminalEvent e);

struct FlowSample {
    double t;
    Vec p;
    double f;
};

struct FlowDefects {
    double conservation = 0;  // max | |grad f|^2 + f^2 - L^2 |
    double geodesic = 0;      // max tangential acceleration
    double renorm = 0;        // max | |y| - 1 | before reprojection
};

struct FlowTrace {
    std::vector<FlowSample> samples;
    TerminalEvent terminal_event = TerminalEvent::time_exhausted;
    double terminal_time = 0;
    FlowDefects defects;
};

struct FlowOptions {
    double dt = 1e-3;
    double t_max = 10.0;
    FlowDirection direction = FlowDirection::forward;
    bool reproject = true;
};

inline constexpr double kCriticalThreshold = 1e-6;
inline constexpr double kEventTimeTol = 1e-12;

/// Flow of +-grad f / |grad f| on S^n, stopped at the boundary of `region`
/// (when given), at a critical point of f, or at t_max.
FlowTrace normalized_gradient_flow(const ObataFunction& f, const SpherePoint& start, const Region* region,
                                   const FlowOptions& options);

/// Flow of an arbitrary unit tangent field on S^n (no events besides t_max).
/// Used to compare gradient flows against non-gradient fields.
FlowTrace unit_field_flow(const std::function<Vec(const Vec&)>& field, const ObataFunction& f,
                          const SpherePoint& start, const FlowOptions& options);

/// Terminal event of the flow started at `start`: forward when f > 0,
/// backward when f < 0. Requires a > 0.
TerminalEvent first_hit_classification(const ObataFunction& f, double a, const Region& region,
                                       const SpherePoint& start, double dt = 1e-3);

/// Backward flow from a point with f > 0: does it cross {f = 0} strictly
/// before reaching the boundary?
struct ZeroLevelReport {
    bool crossed_before_boundary = false;
    double crossing_time = 0;
    TerminalEvent terminal_event = TerminalEvent::time_exhausted;
    double terminal_time = 0;
};

ZeroLevelReport zero_level_before_boundary(const ObataFunction& f, const Region& region, const SpherePoint& start,
                                           double dt = 1e-3);

/// Max tangential part of the discrete second derivative over uniformly spaced
/// sample triples. Throws ParameterError for fewer than three samples.
double geodesic_defect(const FlowTrace& trace);

/// max | |grad f|^2 + f^2 - L^2 | over the samples.
double conservation_defect(const FlowTrace& trace, const ObataFunction& f);

/// max | f(gamma(t)) - L sin(alpha +- t) | with alpha = asin(f(start)/L).
double interior_fit_residual(const FlowTrace& trace, const ObataFunction& f, FlowDirection direction);

/// Flow of +-grad_bar f / |grad_bar f| on the boundary of `region`. Terminates
/// at a focal point (reported as interior_max / interior_min) or t_max.
FlowTrace boundary_flow(const Region& region, const ObataFunction& f, double a, const SpherePoint& start,
                        double dt = 1e-3, FlowDirection direction = FlowDirection::forward,
                        double t_max = 20.0);

/// max | f(sigma(s)) - L/k sin(k s + beta) |, k = sqrt(1 + a^2).
double boundary_fit_residual(const FlowTrace& trace, const ObataFunction& f, double a, FlowDirection direction);

/// Period of f along a closed boundary flow line: twice the focal-to-focal time.
double boundary_period(const Region& region, const ObataFunction& f, double a, const SpherePoint& start,
                       double dt = 1e-3);

/// Unit-speed walk around a boundary circle of a surface (n = 2), continued
/// through `sheets` windings, as a k-fold cover would be traversed.
struct LoopSignature {
    double length = 0;
    int maxima = 0;
};

LoopSignature boundary_loop_signature(const Region& region, const ObataFunction& f, const SpherePoint& start,
                                      int sheets, double ds = 1e-3);

}  // namespace obata
