#include "obata/spectral.hpp"

#include "obata/numerics.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace obata {

std::string to_string(BcKind k) {
    switch (k) {
        case BcKind::dirichlet: return "dirichlet";
        case BcKind::neumann: return "neumann";
        case BcKind::robin: return "robin";
    }
    return "unknown";
}

BcKind bc_kind_from_string(const std::string& s) {
    if (s == "dirichlet") return BcKind::dirichlet;
    if (s == "neumann") return BcKind::neumann;
    if (s == "robin") return BcKind::robin;
    throw ParameterError("unknown boundary condition '" + s + "' (expected dirichlet, neumann or robin)");
}

void SturmLiouvilleProblem::validate() const {
    require(n >= 2, "n must be at least 2");
    require(R > 0 && R < kPi, "cap radius must lie in (0, pi)");
    require(ell >= 0, "ell must be non-negative");
    require(bc.kind != BcKind::robin || bc.a != 0, "robin coefficient must be non-zero");
}

namespace {

struct Shot {
    std::vector<double> r, u, du;
};

// Graded near the origin, where the coefficients grow like k / r^2.
std::vector<double> shooting_mesh(double R, double k, const ShootingOptions& opt) {
    require(opt.h > 0 && opt.h <= 0.05, "shooting step must lie in (0, 0.05]");
    require(opt.eps > 0 && opt.eps < 1e-3 && opt.eps < R, "Frobenius start must lie in (0, 1e-3)");
    const double grade = 0.05 / (1 + std::sqrt(k));
    std::vector<double> mesh{opt.eps};
    double r = opt.eps;
    while (r < R) {
        double step = std::min(opt.h, grade * r);
        if (R - r - step < 1e-3 * step) step = R - r;
        r = (step == R - r) ? R : r + step;
        mesh.push_back(r);
    }
    return mesh;
}

// Integrates the regular solution over the mesh; returns (u(R), u'(R)).
std::pair<double, double> shoot(const SturmLiouvilleProblem& p, double xi, const std::vector<double>& mesh,
                                 double eps, Shot* record) {
    const int n = p.n;
    const double ell = p.ell;
    const double k = p.angular_eigenvalue();
    const double c2 = -(xi - ((n - 1) * ell + k) / 3) / (4 * ell + 2 * n);
    const double c4 = -(c2 * (xi - (n - 1) * (ell + 2) / 3 - k / 3) + (-(n - 1) * ell / 45 - k / 15)) /
                      (8 * ell + 4 * n + 8);
    const double scale = std::pow(eps / p.R, ell);
    double u = scale * (1 + c2 * eps * eps + c4 * std::pow(eps, 4));
    double v = scale * (ell / eps + (ell + 2) * c2 * eps + (ell + 4) * c4 * std::pow(eps, 3));
    auto acc = [n, k, xi](double r, double uu, double vv) {
        const double s = std::sin(r);
        return -(n - 1) * std::cos(r) / s * vv + k / (s * s) * uu - xi * uu;
    };
    if (record) {
        record->r = mesh;
        record->u.assign(1, u);
        record->du.assign(1, v);
    }
    for (std::size_t j = 0; j + 1 < mesh.size(); ++j) {
        const double r = mesh[j];
        const double h = mesh[j + 1] - r;
        const double ku1 = v, kv1 = acc(r, u, v);
        const double ku2 = v + h / 2 * kv1, kv2 = acc(r + h / 2, u + h / 2 * ku1, v + h / 2 * kv1);
        const double ku3 = v + h / 2 * kv2, kv3 = acc(r + h / 2, u + h / 2 * ku2, v + h / 2 * kv2);
        const double ku4 = v + h * kv3, kv4 = acc(r + h, u + h * ku3, v + h * kv3);
        u += h / 6 * (ku1 + 2 * ku2 + 2 * ku3 + ku4);
        v += h / 6 * (kv1 + 2 * kv2 + 2 * kv3 + kv4);
        if (record) {
            record->u.push_back(u);
            record->du.push_back(v);
        }
    }
    return {u, v};
}

double bc_value(const BoundaryCondition& bc, double u, double du) {
    switch (bc.kind) {
        case BcKind::dirichlet: return u;
        case BcKind::neumann: return du;
        case BcKind::robin: return du + bc.a * u;
    }
    return u;
}

double ode_residual(const SturmLiouvilleProblem& p, double xi, const Shot& s) {
    const auto d2 = grid_derivative(s.r, s.du);
    const double k = p.angular_eigenvalue();
    double worst = 0;
    for (std::size_t i = 0; i < s.r.size(); ++i) {
        const double r = s.r[i], sn = std::sin(r);
        const double res = d2[i] + (p.n - 1) * std::cos(r) / sn * s.du[i] - k / (sn * sn) * s.u[i] + xi * s.u[i];
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

}  // namespace

double shooting_residual(const SturmLiouvilleProblem& p, double xi, const ShootingOptions& opt) {
    p.validate();
    const auto mesh = shooting_mesh(p.R, p.angular_eigenvalue(), opt);
    const auto [u, du] = shoot(p, xi, mesh, opt.eps, nullptr);
    return bc_value(p.bc, u, du);
}

EigenResult smallest_eigenvalue(const SturmLiouvilleProblem& p, const ShootingOptions& opt) {
    p.validate();
    require(opt.scan_points >= 10, "scan needs at least 10 points");
    const auto mesh = shooting_mesh(p.R, p.angular_eigenvalue(), opt);
    auto B = [&](double xi) {
        const auto [u, du] = shoot(p, xi, mesh, opt.eps, nullptr);
        return bc_value(p.bc, u, du);
    };
    const double lo = 0.1;
    const double hi = 4.0 * p.n + 4.0 * p.angular_eigenvalue();
    double x0 = lo, b0 = B(lo);
    double root = NAN;
    for (int i = 1; i <= opt.scan_points && std::isnan(root); ++i) {
        const double x1 = lo + (hi - lo) * i / opt.scan_points;
        const double b1 = B(x1);
        if (b0 == 0) {
            root = x0;
        } else if (b1 == 0) {
            root = x1;
        } else if ((b0 < 0) != (b1 < 0)) {
            std::uintmax_t iters = 200;
            const double tol = opt.root_tol;
            const auto bracket = boost::math::tools::toms748_solve(
                B, x0, x1, b0, b1, [tol](double a, double b) { return std::abs(b - a) <= tol; }, iters);
            root = 0.5 * (bracket.first + bracket.second);
        }
        x0 = x1;
        b0 = b1;
    }
    if (std::isnan(root)) {
        std::ostringstream msg;
        msg << "no sign change of the " << to_string(p.bc.kind) << " residual for n = " << p.n << ", R = " << p.R
            << ", ell = " << p.ell << " on [" << lo << ", " << hi << "] (residual " << B(lo) << " -> " << B(hi)
            << ")";
        throw BracketError(msg.str());
    }

    EigenResult res;
    res.xi = root;
    res.ell = p.ell;
    res.n = p.n;
    res.R = p.R;
    res.bc = p.bc;
    Shot shot;
    shoot(p, root, mesh, opt.eps, &shot);
    double peak = 0;
    for (double x : shot.u)
        if (std::abs(x) > std::abs(peak)) peak = x;
    for (double& x : shot.u) x /= peak;
    for (double& x : shot.du) x /= peak;
    res.bc_residual = std::abs(bc_value(p.bc, shot.u.back(), shot.du.back()));
    res.ode_residual = ode_residual(p, root, shot);
    res.r = std::move(shot.r);
    res.u = std::move(shot.u);
    res.du = std::move(shot.du);
    return res;
}

EigenResult first_eigenvalue_scan(int n, double R, const BoundaryCondition& bc, int ell_max,
                                  const ShootingOptions& opt) {
    require(ell_max >= 1, "ell_max must be at least 1");
    EigenResult best;
    bool found = false;
    for (int ell = 0; ell <= ell_max; ++ell) {
        const SturmLiouvilleProblem p{n, R, ell, bc};
        try {
            EigenResult r = smallest_eigenvalue(p, opt);
            if (!found || r.xi < best.xi) {
                best = std::move(r);
                found = true;
            }
        } catch (const BracketError&) {
            const double top = 4.0 * n + 4.0 * p.angular_eigenvalue();
            if (!found || best.xi >= top) throw;
        }
    }
    return best;
}

ReillyResult reilly_identity_check(int n, double R, const RadialProfile& pr) {
    require(n >= 2, "n must be at least 2");
    require(R > 0 && R < kPi, "cap radius must lie in (0, pi)");
    require(pr.f && pr.df && pr.d2f, "profile needs f, f' and f''");
    const double f0 = pr.f(0), d0 = pr.df(0), dd0 = pr.d2f(0);
    if (!std::isfinite(f0) || !std::isfinite(d0) || !std::isfinite(dd0) || std::abs(d0) > 1e-8)
        throw ParameterError("radial profile is singular at the center (needs finite f, f'' and f'(0) = 0)");
    const double m = n - 1;
    auto integrand = [&](double r) {
        const double c = std::cos(r) / std::sin(r);
        const double d1 = pr.df(r), d2 = pr.d2f(r);
        // (Lap f)^2 - |Hess f|^2 - (n-1)|grad f|^2, expanded.
        const double val = 2 * m * d2 * c * d1 + m * (m - 1) * c * c * d1 * d1 - m * d1 * d1;
        return val * std::pow(std::sin(r), m);
    };
    ReillyResult res;
    res.lhs = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, R, 15, 1e-13);
    const double dR = pr.df(R);
    res.rhs = std::pow(std::sin(R), m) * m * std::cos(R) / std::sin(R) * dR * dR;
    res.defect = std::abs(res.lhs - res.rhs) / std::max(1.0, std::abs(res.rhs));
    return res;
}

double eigen_boundary_identity(const EigenResult& res, double a, int n, double R) {
    if (res.bc.kind != BcKind::robin) throw ParameterError("boundary identity needs a robin eigenfunction");
    require(res.n == n && std::abs(res.R - R) <= 1e-12, "result does not belong to this cap");
    require(std::abs(res.xi - n) <= 1e-6, "boundary identity needs eigenvalue n");
    require(res.r.size() >= 3 && res.u.size() == res.r.size() && res.du.size() == res.r.size(),
            "eigenfunction samples missing");
    const double k = res.ell * (res.ell + n - 2.0);
    std::vector<double> vals(res.r.size());
    for (std::size_t i = 0; i < res.r.size(); ++i) {
        const double s = std::sin(res.r[i]);
        const double u = res.u[i], du = res.du[i];
        const double angular = k == 0 ? 0.0 : k * u * u / (s * s);
        vals[i] = (n * u * u - du * du - angular) * std::pow(s, n - 1);
    }
    const double volume = simpson(res.r, vals);
    const double boundary = std::pow(std::sin(R), n - 1) * res.u.back() * res.u.back();
    return std::abs(volume - a * boundary) / std::max(1.0, std::abs(boundary));
}

CapHypotheses cap_hypotheses(int n, double theta) {
    require(n >= 2, "n must be at least 2");
    require(theta > 0 && theta < kPi / 2, "theta must lie in (0, pi/2)");
    const double a = 1 / std::tan(theta);
    const double R = kPi / 2 - theta;
    CapHypotheses c;
    c.h = std::cos(R) / std::sin(R);
    c.H = (n - 1) * c.h;
    c.h_margin = c.h + 2 * a;
    c.H_margin = c.H - (n - 1) / a;
    return c;
}

}  // namespace obata
