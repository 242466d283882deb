#pragma once

// Closed forms and integrators for the scalar ODEs behind the rigidity
// arguments: flow values, warp factors, principal-curvature families, the
// Neumann curvature flow and the radial reduction of the phi graph equation.

#include "obata/geometry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace obata {

/// L sin(alpha + t).
double flow_value(double alpha, double t, double L);

/// cos^2(alpha + t) / cos^2(alpha); throws ParameterError when cos(alpha) = 0.
double metric_warp(double alpha, double t);

struct WarpSample {
    double t;
    double w;
};

struct WarpProfile {
    double alpha = 0;
    std::vector<WarpSample> samples;
};

/// RK4 integration of w' = -2 tan(alpha + t) w, w(0) = 1, on [0, t_end].
WarpProfile integrate_metric_warp(double alpha, double t_end, double dt = 1e-3);

/// max | f'(t) w'(t) / 2 + f(t) w(t) | with f = L sin(alpha + t), for a warp
/// given as a callable; w' from a five-point difference with step h.
double metric_ode_residual(const std::function<double(double)>& w, double alpha, double L,
                           const std::vector<double>& ts, double h = 1e-3);

enum class CurvatureBranch { constant_minus_a, mobius };

std::string to_string(CurvatureBranch b);
CurvatureBranch curvature_branch_from_string(const std::string& s);

struct CurvatureFamily {
    double a = 1.0;
    double mu = 0.0;
    CurvatureBranch branch = CurvatureBranch::mobius;
};

/// lambda(s) = (a mu c + 1) / (a - mu c), c = cos(sqrt(1 + a^2) s), or -a for
/// the constant branch. Throws NumericalError when the denominator comes
/// within 1e-10 of zero on the segment between 0 and s.
double curvature_closed_form(const CurvatureFamily& family, double s);

/// max over the grid of | k cos(k s) lambda' + sin(k s) (lambda + a)(a lambda - 1) |,
/// k = sqrt(1 + a^2). Grid points where cos(k s) vanishes are rejected.
double curvature_ode_residual(const CurvatureFamily& family, const std::vector<double>& grid);
/// Same residual for a numerically given lambda (five-point differences at h and h/2,
/// Richardson-combined).
double curvature_ode_residual(const std::function<double(double)>& lambda, double a,
                              const std::vector<double>& grid, double h = 1e-3);

struct NeumannSample {
    double s;
    double lambda;
    double lambda_cos;  // lambda(s) cos(s)
};

struct NeumannFlowResult {
    std::vector<NeumannSample> samples;
    bool blew_up = false;
    double blowup_s = 0;
    bool monotone = true;      // lambda cos s nondecreasing in s within 1e-10
    double worst_decrease = 0;
};

inline constexpr double kBlowupThreshold = 1e6;

/// Integrates sqrt(L^2-1) (cos(s) lambda' - sin(s) lambda) = lambda^2 from s = 0
/// toward s_end (either sign), stopping when |lambda| exceeds 1e6.
NeumannFlowResult neumann_curvature_flow(double L, double lambda0, double s_end, double h = 1e-3);

enum class BaseGeometry { flat_disk, round_cap };

std::string to_string(BaseGeometry b);
BaseGeometry base_geometry_from_string(const std::string& s);

struct PhiSample {
    double rho;
    double phi;
};

/// Radial profile: rho is the distance from the outer boundary of the base.
struct PhiProfile {
    double a = -1.0;
    BaseGeometry base = BaseGeometry::flat_disk;
    double rho_max = 1.0;
    double h = 1e-3;
    double plateau_rho = -1;  // where phi reaches pi - theta; negative if never
    std::vector<PhiSample> samples;
};

/// Solves |d phi / d rho| = cos(phi) sqrt(cos^2 phi / (a^2 sin^2 phi) - 1) inward
/// from phi = phi_start at rho = 0 on a uniform grid of step h, holding the
/// plateau pi - theta once it is reached.
PhiProfile phi_radial_solve(double a, BaseGeometry base, double rho_max, double h = 1e-3, double phi_start = 0);

/// cos(phi) / sqrt(1 + phi'^2 / cos^2 phi) + a sin(phi).
double phi_equation_residual(double a, double phi, double dphi);

/// Max residual of the displayed equation over the interior grid (endpoints and
/// the cells around the plateau kink excluded).
double phi_profile_residual(const PhiProfile& profile);

/// Max | phi+'^2 - phi-'^2 - (F(phi+) - F(phi-)) | with F(phi) = cos^2 phi (cos^2 phi / (a^2 sin^2 phi) - 1),
/// on the overlap of the two profiles measured from the center of the base.
/// Points with phi < 0.05 and the cells around each plateau kink are excluded.
double phi_pair_identity_residual(const PhiProfile& plus, const PhiProfile& minus);

/// Warped product [s-, s+] x S^{n-1} with g = ds^2 + cos^2 s g_{S^{n-1}} and
/// f = L sin s, realized as the band {|y_{n+1}| <= sin s+} of S^n.
class WarpedModel final : public Region {
public:
    int n() const override { return n_; }
    double s_max() const { return s_max_; }
    double a() const { return a_; }

    double residual(const Vec& y) const override;
    Vec residual_gradient(const Vec& y) const override;
    Vec project_to_boundary(const Vec& y) const override;
    Vec sample_boundary(std::mt19937_64& rng) const override;
    std::string describe() const override;

private:
    friend WarpedModel warped_model_build(int n, double a, const std::string& base_metric, double s_lo, double s_hi);
    WarpedModel(int n, double a, double s_max) : n_(n), a_(a), s_max_(s_max) {}

    int n_;
    double a_;
    double s_max_;
};

/// Robin residual of f = L sin s at the end s of the interval (outward sign applied).
double warped_end_residual(double a, double s, bool upper_end, double L = 1.0);

/// Builds the warped model for a < 0 on [s_lo, s_hi] after checking the Robin
/// condition at both ends (tolerance 1e-10). Only the round base "round" is supported.
WarpedModel warped_model_build(int n, double a, const std::string& base_metric, double s_lo, double s_hi);

}  // namespace obata
