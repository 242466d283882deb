#include "obata/ode.hpp"

#include "obata/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace obata {

double flow_value(double alpha, double t, double L) { return L * std::sin(alpha + t); }

double metric_warp(double alpha, double t) {
    const double c0 = std::cos(alpha);
    require(std::abs(c0) > 1e-12, "metric warp needs cos(alpha) != 0");
    const double c = std::cos(alpha + t);
    return c * c / (c0 * c0);
}

WarpProfile integrate_metric_warp(double alpha, double t_end, double dt) {
    require(std::abs(std::cos(alpha)) > 1e-12, "metric warp needs cos(alpha) != 0");
    require(dt > 0 && t_end >= 0, "invalid warp integration range");
    auto rhs = [alpha](double t, double w) { return -2 * std::tan(alpha + t) * w; };
    WarpProfile p;
    p.alpha = alpha;
    double t = 0, w = 1;
    p.samples.push_back({t, w});
    const long steps = std::max(1L, std::lround(std::ceil(t_end / dt - 1e-9)));
    const double h = t_end / static_cast<double>(steps);
    for (long i = 0; i < steps; ++i) {
        const double k1 = rhs(t, w);
        const double k2 = rhs(t + h / 2, w + h / 2 * k1);
        const double k3 = rhs(t + h / 2, w + h / 2 * k2);
        const double k4 = rhs(t + h, w + h * k3);
        w += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        t = static_cast<double>(i + 1) * h;
        p.samples.push_back({t, w});
    }
    return p;
}

namespace {

double five_point(const std::function<double(double)>& g, double x, double h) {
    return (g(x - 2 * h) - 8 * g(x - h) + 8 * g(x + h) - g(x + 2 * h)) / (12 * h);
}

}  // namespace

double metric_ode_residual(const std::function<double(double)>& w, double alpha, double L,
                           const std::vector<double>& ts, double h) {
    double worst = 0;
    for (double t : ts) {
        const double f = L * std::sin(alpha + t);
        const double df = L * std::cos(alpha + t);
        worst = std::max(worst, std::abs(0.5 * df * five_point(w, t, h) + f * w(t)));
    }
    return worst;
}

std::string to_string(CurvatureBranch b) { return b == CurvatureBranch::mobius ? "mobius" : "constant_minus_a"; }

CurvatureBranch curvature_branch_from_string(const std::string& s) {
    if (s == "mobius") return CurvatureBranch::mobius;
    if (s == "constant_minus_a") return CurvatureBranch::constant_minus_a;
    throw ParameterError("unknown curvature branch '" + s + "'");
}

double curvature_closed_form(const CurvatureFamily& fam, double s) {
    require(fam.a != 0, "curvature family needs a != 0");
    if (fam.branch == CurvatureBranch::constant_minus_a) return -fam.a;
    const double k = std::sqrt(1 + fam.a * fam.a);
    const double ks = k * std::abs(s);
    const double c_min = ks >= kPi ? -1.0 : std::cos(ks);
    const double d_lo = fam.a - fam.mu * c_min;
    const double d_hi = fam.a - fam.mu;
    if (std::min(std::abs(d_lo), std::abs(d_hi)) < 1e-10 || (d_lo > 0) != (d_hi > 0)) {
        std::ostringstream msg;
        msg << "singular curvature family: a - mu cos(k s) vanishes on [0, " << s << "]";
        throw NumericalError(msg.str());
    }
    const double c = std::cos(k * s);
    return (fam.a * fam.mu * c + 1) / (fam.a - fam.mu * c);
}

namespace {

void check_grid_point(double k, double s) {
    if (std::abs(std::cos(k * s)) <= 1e-12)
        throw ParameterError("grid touches the focal endpoint where cos(k s) vanishes");
}

}  // namespace

double curvature_ode_residual(const CurvatureFamily& fam, const std::vector<double>& grid) {
    const double a = fam.a;
    const double k = std::sqrt(1 + a * a);
    double worst = 0;
    for (double s : grid) {
        check_grid_point(k, s);
        const double lam = curvature_closed_form(fam, s);
        double dlam = 0;
        if (fam.branch == CurvatureBranch::mobius) {
            const double c = std::cos(k * s);
            const double d = a - fam.mu * c;
            dlam = fam.mu * (1 + a * a) / (d * d) * (-k * std::sin(k * s));
        }
        const double r = k * std::cos(k * s) * dlam + std::sin(k * s) * (lam + a) * (a * lam - 1);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

double curvature_ode_residual(const std::function<double(double)>& lambda, double a,
                              const std::vector<double>& grid, double h) {
    const double k = std::sqrt(1 + a * a);
    double worst = 0;
    for (double s : grid) {
        check_grid_point(k, s);
        const double lam = lambda(s);
        const double d = (16 * five_point(lambda, s, h / 2) - five_point(lambda, s, h)) / 15;
        const double r = k * std::cos(k * s) * d + std::sin(k * s) * (lam + a) * (a * lam - 1);
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

NeumannFlowResult neumann_curvature_flow(double L, double lambda0, double s_end, double h) {
    require(L > 1, "Neumann curvature flow needs L > 1");
    require(std::abs(s_end) < kPi / 2, "|s_end| must be below pi/2");
    require(h > 0, "step must be positive");
    const double K = std::sqrt(L * L - 1);
    const double dir = s_end >= 0 ? 1.0 : -1.0;
    auto rhs = [K](double s, double lam) { return (lam * lam + K * std::sin(s) * lam) / (K * std::cos(s)); };
    NeumannFlowResult res;
    double s = 0, lam = lambda0;
    res.samples.push_back({s, lam, lam});
    while (dir * (s_end - s) > 1e-15) {
        const double hs = std::min({h, 0.02 * K * std::cos(s) / (std::abs(lam) + K), dir * (s_end - s)});
        const double g = dir * hs;
        const double k1 = rhs(s, lam);
        const double k2 = rhs(s + g / 2, lam + g / 2 * k1);
        const double k3 = rhs(s + g / 2, lam + g / 2 * k2);
        const double k4 = rhs(s + g, lam + g * k3);
        lam += g / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
        s += g;
        res.samples.push_back({s, lam, lam * std::cos(s)});
        if (!std::isfinite(lam) || std::abs(lam) > kBlowupThreshold) {
            res.blew_up = true;
            res.blowup_s = s;
            break;
        }
    }
    for (std::size_t i = 1; i < res.samples.size(); ++i) {
        // Increase in s is dir * (later - earlier).
        const double rise = dir * (res.samples[i].lambda_cos - res.samples[i - 1].lambda_cos);
        res.worst_decrease = std::max(res.worst_decrease, -rise);
    }
    res.monotone = res.worst_decrease <= 1e-10;
    return res;
}

std::string to_string(BaseGeometry b) { return b == BaseGeometry::round_cap ? "round_cap" : "flat_disk"; }

BaseGeometry base_geometry_from_string(const std::string& s) {
    if (s == "flat_disk") return BaseGeometry::flat_disk;
    if (s == "round_cap") return BaseGeometry::round_cap;
    throw ParameterError("unknown base geometry '" + s + "' (expected flat_disk or round_cap)");
}

namespace {

// d psi / d rho for psi = phi^2, regular at phi = 0.
double psi_rate(double a, double psi) {
    const double phi = std::sqrt(std::max(psi, 0.0));
    const double s = std::sin(phi), c = std::cos(phi);
    double radicand = c * c - a * a * s * s;
    if (radicand < -1e-12) throw NumericalError("phi solver left the admissible range (negative radicand)");
    radicand = std::max(radicand, 0.0);
    const double ratio = phi < 1e-8 ? 1.0 : phi / s;
    return 2 * c * std::sqrt(radicand) * ratio / std::abs(a);
}

double phi_rate(double a, double phi) {
    const double s = std::sin(phi), c = std::cos(phi);
    const double radicand = std::max(c * c - a * a * s * s, 0.0);
    return c * std::sqrt(radicand) / (std::abs(a) * s);
}

}  // namespace

PhiProfile phi_radial_solve(double a, BaseGeometry base, double rho_max, double h, double phi_start) {
    require(a < 0, "phi solver needs a < 0");
    require(rho_max > 0, "rho_max must be positive");
    require(base != BaseGeometry::round_cap || rho_max < kPi, "round cap radius must be below pi");
    require(h > 0 && h <= 0.1, "h must lie in (0, 0.1]");
    const double plateau = std::atan(1 / std::abs(a));
    require(phi_start >= 0 && phi_start < plateau, "phi_start must lie in [0, pi - theta)");
    const double kappa = 2 * std::sin(plateau) * std::cos(plateau) * (1 + a * a);
    const double switch_gap = 1e-7;

    PhiProfile p;
    p.a = a;
    p.base = base;
    p.rho_max = rho_max;
    p.h = h;
    const long n = std::max(4L, std::lround(rho_max / h));
    p.h = rho_max / static_cast<double>(n);

    double psi = phi_start * phi_start;
    bool local = false;
    double rho_s = 0, u_s = 0;
    p.samples.push_back({0.0, phi_start});
    for (long j = 1; j <= n; ++j) {
        const double rho_j = static_cast<double>(j) * p.h;
        if (!local) {
            double rho = rho_j - p.h;
            while (rho_j - rho > 1e-15) {
                const double phi = std::sqrt(psi);
                const double gap = plateau - phi;
                if (gap < switch_gap) {
                    local = true;
                    rho_s = rho;
                    u_s = std::sqrt(std::max(gap, 0.0));
                    p.plateau_rho = rho_s + 2 * u_s / std::sqrt(kappa);
                    break;
                }
                double hs = rho_j - rho;
                if (gap < 0.1) hs = std::min(hs, 0.25 * gap / phi_rate(a, phi));
                const double k1 = psi_rate(a, psi);
                const double k2 = psi_rate(a, psi + hs / 2 * k1);
                const double k3 = psi_rate(a, psi + hs / 2 * k2);
                const double k4 = psi_rate(a, psi + hs * k3);
                psi += hs / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
                rho += hs;
            }
        }
        double phi;
        if (local) {
            const double u = std::max(0.0, u_s - 0.5 * std::sqrt(kappa) * (rho_j - rho_s));
            phi = plateau - u * u;
        } else {
            phi = std::sqrt(psi);
        }
        p.samples.push_back({rho_j, phi});
    }
    return p;
}

double phi_equation_residual(double a, double phi, double dphi) {
    const double c = std::cos(phi);
    return c / std::sqrt(1 + dphi * dphi / (c * c)) + a * std::sin(phi);
}

namespace {

std::vector<double> phi_slopes(const PhiProfile& p) {
    std::vector<double> psi;
    psi.reserve(p.samples.size());
    for (const auto& s : p.samples) psi.push_back(s.phi * s.phi);
    std::vector<double> d = uniform_derivative(psi, p.h);
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = p.samples[i].phi > 0 ? d[i] / (2 * p.samples[i].phi) : INFINITY;
    return d;
}

bool near_kink(const PhiProfile& p, double rho) {
    return p.plateau_rho >= 0 && std::abs(rho - p.plateau_rho) <= 3 * p.h;
}

}  // namespace

double phi_profile_residual(const PhiProfile& p) {
    require(p.samples.size() >= 5, "profile too short");
    const auto d = phi_slopes(p);
    double worst = 0;
    for (std::size_t i = 1; i + 1 < p.samples.size(); ++i) {
        if (near_kink(p, p.samples[i].rho)) continue;
        worst = std::max(worst, std::abs(phi_equation_residual(p.a, p.samples[i].phi, d[i])));
    }
    return worst;
}

double phi_pair_identity_residual(const PhiProfile& plus, const PhiProfile& minus) {
    require(plus.a == minus.a, "profiles must share a");
    require(std::abs(plus.h - minus.h) <= 1e-12, "profiles must share the grid step");
    require(plus.samples.size() >= 5 && minus.samples.size() >= 5, "profiles too short");
    const double a = plus.a;
    auto F = [a](double phi) {
        const double c = std::cos(phi), s = std::sin(phi);
        return c * c * (c * c / (a * a * s * s) - 1);
    };
    const auto dp = phi_slopes(plus);
    const auto dm = phi_slopes(minus);
    const std::size_t np = plus.samples.size(), nm = minus.samples.size();
    double worst = 0;
    for (std::size_t i = 0; i < std::min(np, nm); ++i) {
        // i counts grid steps from the center of the base.
        const std::size_t jp = np - 1 - i, jm = nm - 1 - i;
        const double fp = plus.samples[jp].phi, fm = minus.samples[jm].phi;
        if (fp < 0.05 || fm < 0.05) continue;
        if (near_kink(plus, plus.samples[jp].rho) || near_kink(minus, minus.samples[jm].rho)) continue;
        const double lhs = dp[jp] * dp[jp] - dm[jm] * dm[jm];
        worst = std::max(worst, std::abs(lhs - (F(fp) - F(fm))));
    }
    return worst;
}

double WarpedModel::residual(const Vec& y) const {
    const double s = std::sin(s_max_);
    return (y(n_) * y(n_) - s * s) / (2 * s);
}

Vec WarpedModel::residual_gradient(const Vec& y) const {
    Vec g = Vec::Zero(n_ + 1);
    g(n_) = y(n_) / std::sin(s_max_);
    return g;
}

Vec WarpedModel::project_to_boundary(const Vec& y) const {
    Vec out(n_ + 1);
    Vec rest = y.head(n_);
    const double norm = rest.norm();
    if (norm < 1e-300) {
        rest = Vec::Unit(n_, 0);
    } else {
        rest /= norm;
    }
    out.head(n_) = std::cos(s_max_) * rest;
    out(n_) = (y(n_) < 0 ? -1.0 : 1.0) * std::sin(s_max_);
    return out;
}

Vec WarpedModel::sample_boundary(std::mt19937_64& rng) const {
    std::normal_distribution<double> g;
    Vec y(n_ + 1);
    for (int i = 0; i <= n_; ++i) y(i) = g(rng);
    return project_to_boundary(y);
}

std::string WarpedModel::describe() const {
    std::ostringstream s;
    s << "warped band |s| <= " << s_max_ << " in S^" << n_ << " (a = " << a_ << ")";
    return s.str();
}

double warped_end_residual(double a, double s, bool upper_end, double L) {
    return (upper_end ? 1.0 : -1.0) * L * std::cos(s) + a * L * std::sin(s);
}

WarpedModel warped_model_build(int n, double a, const std::string& base_metric, double s_lo, double s_hi) {
    require(n >= 2, "n must be at least 2");
    require(a < 0, "warped model needs a < 0");
    require(base_metric == "round", "unsupported base metric '" + base_metric + "' (only round is available)");
    require(s_lo < s_hi && s_lo > -kPi / 2 && s_hi < kPi / 2, "interval must lie in (-pi/2, pi/2)");
    for (const bool upper : {false, true}) {
        const double s = upper ? s_hi : s_lo;
        const double r = warped_end_residual(a, s, upper);
        if (std::abs(r) > 1e-10) {
            std::ostringstream msg;
            msg << "Robin condition fails at s = " << s << " (residual " << r << ")";
            throw ParameterError(msg.str());
        }
    }
    return WarpedModel(n, a, s_hi);
}

}  // namespace obata
