#pragma once

// Boundary Taylor jets (g_k, f_k) of a collar metric dr^2 + g(r) and a
// solution of Hess f + phi(f) g = 0, computed from (g_0, f_0, f_1).
//
// Two backends: homogeneous (every g_k a scalar multiple of a fixed reference
// metric, scalars constant) over double or exact TrigRational arithmetic, and
// a periodic grid on a flat torus with spectral derivatives.

#include "obata/exact.hpp"

#include <functional>
#include <string>
#include <vector>

namespace obata {

// ---------------------------------------------------------------- homogeneous

template <class T>
struct HomogeneousData {
    std::string reference = "round";  // reference metric the scalars multiply
    T g0;
    T f0;
    T f1;
    std::vector<T> phi;  // phi^(m)(f0), m = 0, 1, ...; missing entries are zero
};

template <class T>
struct HomogeneousJet {
    std::string reference = "round";
    int K = 0;
    std::vector<T> g;  // g_0 .. g_K
    std::vector<T> f;  // f_0 .. f_{K+1}
    std::vector<T> G;  // inverse-metric coefficients G_0 .. G_K
    std::vector<T> F;  // phi(f) coefficients F_0 .. F_K
};

/// phi = id: values (f0, 1, 0, ...).
template <class T>
std::vector<T> phi_identity(const T& f0) {
    return {f0, T(1)};
}

template <class T>
HomogeneousJet<T> jet_extend(const HomogeneousData<T>& data, int K);

/// Constraint residuals for k = 0..K-1; identically zero for homogeneous jets.
template <class T>
std::vector<T> jet_constraint_residual(const HomogeneousJet<T>& jet);

/// Taylor coefficients 0..K-1 of (f')^2 + f^2 - L^2.
template <class T>
std::vector<T> scalar_conservation_residual(const HomogeneousJet<T>& jet, const T& L_squared);

/// g_k^B = (-1)^k g_k^A and f_k^B = (-1)^k f_k^A for k <= K within tol.
bool jets_match(const HomogeneousJet<double>& A, const HomogeneousJet<double>& B, int K, double tol);
/// Exact version.
bool jets_match(const HomogeneousJet<TrigRational>& A, const HomogeneousJet<TrigRational>& B, int K);

enum class JetModel { cap_complement, cap_core, hemisphere };

std::string to_string(JetModel m);
JetModel jet_model_from_string(const std::string& s);

/// Boundary data of the models cut out by f = L y_{n+1}: the cap {y_{n+1} >= sin t}
/// (g_0 = cos^2 t, f_0 = L sin t, f_1 = L cos t), its core (f_1 = -L cos t) and the
/// hemisphere (g_0 = 1, f_0 = 0, f_1 = L); phi = id.
HomogeneousData<double> model_data(JetModel model, double theta, double L);
/// Same with theta kept symbolic (s = sin t, c = cos t) and L rational.
HomogeneousData<TrigRational> model_data_exact(JetModel model, const Rational& L);

/// Exact Taylor coefficients of cos^2(t +- r) and L sin(t +- r) through order K
/// (g) and K + 1 (f).
struct ExactSeries {
    std::vector<TrigRational> g;
    std::vector<TrigRational> f;
};
ExactSeries model_series_exact(JetModel model, const Rational& L, int K);

/// Max relative coefficient error of the double backend against the exact
/// series evaluated at theta, each error scaled by its order bound
/// (2^k/k! for g, L/k! for f) so vanishing coefficients stay well defined.
double jet_vs_exact(JetModel model, double theta, double L, int K);
/// Whether the exact backend reproduces the exact series coefficient by coefficient.
bool jet_vs_exact_rational(JetModel model, const Rational& L, int K);

// ---------------------------------------------------------------------- grid

/// Uniform periodic grid on the flat torus [0, period)^d, optionally shifted by half a cell.
struct PeriodicGrid {
    int d = 2;
    int N = 16;
    double period = 6.283185307179586;
    bool half_offset = false;

    int size() const;
    double coordinate(int index, int axis) const;
};

using Field = std::vector<double>;

/// Symmetric 2-tensor field, components stored row-major (d * d fields).
struct TensorField {
    std::vector<Field> comp;
};

struct GridData {
    PeriodicGrid grid;
    TensorField g0;
    Field f0;
    Field f1;
    std::vector<std::function<double(double)>> phi;  // phi and its derivatives
};

struct GridJet {
    PeriodicGrid grid;
    int K = 0;
    std::vector<TensorField> g;
    std::vector<Field> f;
    std::vector<TensorField> G;
    std::vector<Field> F;
};

/// phi = id handles.
std::vector<std::function<double(double)>> phi_identity_handles();

/// Constant data g_0 = c0 * I, f_0, f_1 sampled on the grid.
GridData constant_grid_data(const PeriodicGrid& grid, double c0, double f0, double f1,
                            std::vector<std::function<double(double)>> phi);

/// Throws ParameterError if g_0 is not positive definite or f_1 vanishes at a sample.
GridJet jet_extend(const GridData& data, int K);

/// Sup-norm constraint residual per order k = 0..K-1.
std::vector<double> jet_constraint_residual(const GridJet& jet);

bool jets_match(const GridJet& A, const GridJet& B, int K, double tol);

/// Spectral derivative of a periodic field along one axis.
Field periodic_derivative(const PeriodicGrid& grid, const Field& u, int axis);

}  // namespace obata
