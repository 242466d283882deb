#pragma once

// Radial Sturm-Liouville eigenproblems on geodesic caps of S^n and the
// integral identities checked against their solutions.

#include "obata/common.hpp"

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace obata {

enum class BcKind { dirichlet, neumann, robin };

struct BoundaryCondition {
    BcKind kind = BcKind::dirichlet;
    double a = 0;  // robin only

    static BoundaryCondition dirichlet() { return {BcKind::dirichlet, 0}; }
    static BoundaryCondition neumann() { return {BcKind::neumann, 0}; }
    static BoundaryCondition robin(double a) { return {BcKind::robin, a}; }
};

std::string to_string(BcKind k);
BcKind bc_kind_from_string(const std::string& s);

/// u'' + (n-1) cot(r) u' - k / sin^2(r) u + xi u = 0 on (0, R], k = ell (ell + n - 2).
struct SturmLiouvilleProblem {
    int n = 2;
    double R = kPi / 2;
    int ell = 0;
    BoundaryCondition bc;

    double angular_eigenvalue() const { return ell * (ell + n - 2.0); }
    void validate() const;
};

struct ShootingOptions {
    double h = 1e-3;     // step away from the origin
    double eps = 1e-6;   // Frobenius start
    int scan_points = 400;
    double root_tol = 1e-10;
};

struct EigenResult {
    double xi = 0;
    int ell = 0;
    int n = 2;
    double R = 0;
    BoundaryCondition bc;
    std::vector<double> r;
    std::vector<double> u;   // normalized so that max |u| = 1
    std::vector<double> du;
    double bc_residual = 0;
    double ode_residual = 0;
};

/// No sign change of the boundary residual in the search bracket.
class BracketError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Boundary-condition residual at r = R of the solution regular at the origin,
/// normalized by the start amplitude.
double shooting_residual(const SturmLiouvilleProblem& p, double xi, const ShootingOptions& opt = {});

/// Smallest eigenvalue in [0.1, 4n + 4k] by a sign scan and bracketed refinement.
EigenResult smallest_eigenvalue(const SturmLiouvilleProblem& p, const ShootingOptions& opt = {});

/// Minimum of smallest_eigenvalue over ell = 0..ell_max. Modes whose bracket
/// holds no root are skipped when the current minimum lies below the bracket.
EigenResult first_eigenvalue_scan(int n, double R, const BoundaryCondition& bc, int ell_max,
                                  const ShootingOptions& opt = {});

/// Radial function with its first two derivatives.
struct RadialProfile {
    std::function<double(double)> f;
    std::function<double(double)> df;
    std::function<double(double)> d2f;
};

struct ReillyResult {
    double lhs = 0;
    double rhs = 0;
    double defect = 0;
};

/// Reilly's identity for a radial function on the cap of radius R (the
/// measure of the unit (n-1)-sphere cancels and is omitted).
ReillyResult reilly_identity_check(int n, double R, const RadialProfile& profile);

/// |int (n u^2 - |grad u|^2) dV - a int u^2 dA| / max(1, int u^2 dA) for a Robin
/// eigenfunction with eigenvalue n.
double eigen_boundary_identity(const EigenResult& result, double a, int n, double R);

/// Margins of the curvature hypotheses on the boundary of the cap of radius
/// pi/2 - theta: h - (-2a) and H - (n-1)/a, with a = cot(theta).
struct CapHypotheses {
    double h = 0;
    double H = 0;
    double h_margin = 0;
    double H_margin = 0;
};

CapHypotheses cap_hypotheses(int n, double theta);

}  // namespace obata
