#pragma once

// Small numerical helpers shared by the ODE and spectral modules.

#include <vector>

namespace obata {

/// Finite-difference weights for the derivatives 0..order at x0 on the nodes xs.
/// Result is indexed [derivative][node].
std::vector<std::vector<double>> fornberg_weights(double x0, const std::vector<double>& xs, int order);

/// First derivative of uniformly sampled values: fourth-order centered in the
/// interior, fourth-order one-sided at the two ends on each side.
std::vector<double> uniform_derivative(const std::vector<double>& values, double h);

/// First derivative on an arbitrary increasing grid from five-point stencils.
std::vector<double> grid_derivative(const std::vector<double>& x, const std::vector<double>& values);

/// Composite Simpson rule on an increasing, possibly nonuniform grid.
double simpson(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace obata
