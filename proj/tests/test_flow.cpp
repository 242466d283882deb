#include <doctest.h>

#include "obata/flow.hpp"

#include <cmath>
#include <random>

using namespace obata;

namespace {

const double kThetas[] = {kPi / 6, kPi / 4, kPi / 3};

Vec unit(int dim, int i) { return Vec::Unit(dim, i); }

// Boundary point of the canonical T^m(theta): first block scaled by cos, second by sin.
SpherePoint torus_point(int n, int m, double theta, const Vec& u, const Vec& v) {
    Vec y(n + 1);
    y.head(m + 1) = std::cos(theta) * u.normalized();
    y.tail(n - m) = std::sin(theta) * v.normalized();
    return SpherePoint(y);
}

SpherePoint random_interior(const Region& r, const ObataFunction& f, bool positive, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    const int dim = r.n() + 1;
    for (;;) {
        Vec y(dim);
        for (int i = 0; i < dim; ++i) y(i) = g(rng);
        y.normalize();
        const double v = f.value(y);
        if (r.residual(y) < -1e-6 && (positive ? v > 1e-6 : v < -1e-6) && f.gradient(y).norm() > 1e-4)
            return SpherePoint(y);
    }
}

void check_trace_invariants(const FlowTrace& tr, const ObataFunction& f, double dt) {
    for (std::size_t i = 0; i < tr.samples.size(); ++i) {
        const auto& s = tr.samples[i];
        CHECK(s.f == f.value(s.p));
        if (i == 0) continue;
        CHECK(s.t > tr.samples[i - 1].t);
        CHECK((s.p - tr.samples[i - 1].p).norm() <= 2 * dt);
    }
}

}  // namespace

TEST_CASE("equator start on S^2 reaches the maximum at pi/2") {
    const auto f = ObataFunction::height(2);
    FlowOptions opt;
    const auto tr = normalized_gradient_flow(f, SpherePoint(unit(3, 0)), nullptr, opt);
    CHECK(tr.terminal_event == TerminalEvent::interior_max);
    CHECK(std::abs(tr.terminal_time - kPi / 2) < 1e-8);
    CHECK((tr.samples.back().p - unit(3, 2)).norm() == 0.0);
    CHECK(interior_fit_residual(tr, f, FlowDirection::forward) < 1e-6);
    check_trace_invariants(tr, f, opt.dt);

    opt.direction = FlowDirection::backward;
    const auto back = normalized_gradient_flow(f, SpherePoint(unit(3, 0)), nullptr, opt);
    CHECK(back.terminal_event == TerminalEvent::interior_min);
    CHECK(std::abs(back.terminal_time - kPi / 2) < 1e-8);
    CHECK(interior_fit_residual(back, f, FlowDirection::backward) < 1e-6);
}

TEST_CASE("cap complement flows hit the maximum at pi/2 - theta") {
    for (int n : {2, 3, 4}) {
        for (double theta : kThetas) {
            for (double L : {1.0, 2.5}) {
                const auto d = make_model_domain(n, n - 1, theta, Side::complement);
                const auto f = ObataFunction::height(n, L);
                Vec y = Vec::Zero(n + 1);
                y(0) = std::cos(theta);
                y(n) = std::sin(theta);
                const SpherePoint start(y);
                REQUIRE(d.on_boundary(y));
                const auto tr = normalized_gradient_flow(f, start, &d, FlowOptions{});
                CHECK(tr.terminal_event == TerminalEvent::interior_max);
                CHECK(std::abs(tr.terminal_time - (kPi / 2 - theta)) < 1e-6);
                CHECK(tr.defects.conservation <= 1e-10);
                CHECK(tr.defects.geodesic <= 1e-6);
                CHECK(interior_fit_residual(tr, f, FlowDirection::forward) < 1e-6);
            }
        }
    }
}

TEST_CASE("a > 0 models: forward flows from f > 0 never hit the boundary first") {
    std::mt19937_64 rng(2024);
    for (int n : {2, 3, 4}) {
        for (int m = 0; m <= n - 1; ++m) {
            for (double theta : kThetas) {
                const auto d = make_model_domain(n, m, theta, Side::complement);
                const double a = d.matched_robin_coefficient();
                REQUIRE(a > 0);
                const auto f = ObataFunction::height(n, 1.7);
                for (int k = 0; k < 100; ++k) {
                    const auto p = random_interior(d, f, true, rng);
                    CHECK(first_hit_classification(f, a, d, p, 1e-2) == TerminalEvent::interior_max);
                }
                if (m == n - 1) continue;  // the complement of D^{n-1} lies in {f > 0}
                for (int k = 0; k < 100; ++k) {
                    const auto p = random_interior(d, f, false, rng);
                    CHECK(first_hit_classification(f, a, d, p, 1e-2) == TerminalEvent::interior_min);
                }
            }
        }
    }
}

TEST_CASE("classification preconditions") {
    const auto d = make_model_domain(2, 0, kPi / 4, Side::complement);
    const auto f = ObataFunction::height(2);
    const SpherePoint eq(unit(3, 1));
    CHECK_THROWS_AS(first_hit_classification(f, -1.0, d, eq), ParameterError);
    CHECK_THROWS_AS(first_hit_classification(f, 1.0, d, eq), ParameterError);
}

TEST_CASE("ball model: backward flow from the maximum reaches the boundary at 3pi/2 - theta") {
    const double eps = 1e-6;
    for (int n : {2, 3, 5}) {
        for (double theta : {2 * kPi / 3, 3 * kPi / 4, 5 * kPi / 6}) {
            const NegativeBallModel ball(n, theta);
            const auto f = ObataFunction::height(n);
            for (int dir = 0; dir < n; ++dir) {
                const Vec y = std::cos(eps) * unit(n + 1, n) + std::sin(eps) * unit(n + 1, dir);
                FlowOptions opt;
                opt.direction = FlowDirection::backward;
                const auto tr = normalized_gradient_flow(f, SpherePoint(y), &ball, opt);
                CHECK(tr.terminal_event == TerminalEvent::boundary_hit);
                CHECK(std::abs(eps + tr.terminal_time - ball.radius()) < 1e-6);
                CHECK(ball.on_boundary(tr.samples.back().p));
                CHECK(tr.defects.conservation <= 1e-10);
            }
        }
    }
}

TEST_CASE("flow preconditions") {
    const auto f = ObataFunction::height(2);
    CHECK_THROWS_AS(normalized_gradient_flow(f, SpherePoint(unit(3, 2)), nullptr, FlowOptions{}), ParameterError);
    const auto d = make_model_domain(2, 1, kPi / 4, Side::complement);
    CHECK_THROWS_AS(normalized_gradient_flow(f, SpherePoint(unit(3, 0)), &d, FlowOptions{}), ParameterError);
    FlowOptions bad;
    bad.dt = 0.05;
    CHECK_THROWS_AS(normalized_gradient_flow(f, SpherePoint(unit(3, 0)), nullptr, bad), ParameterError);
}

TEST_CASE("gradient flows are geodesics, rotated fields are not") {
    const auto f = ObataFunction(Vec::Unit(3, 2));
    const SpherePoint start = SpherePoint::normalized((Vec(3) << 1, 0.3, -0.4).finished());
    FlowOptions opt;
    opt.t_max = 1.0;
    const auto grad = normalized_gradient_flow(f, start, nullptr, opt);
    CHECK(geodesic_defect(grad) <= 1e-6);

    const double c = std::cos(kPi / 4), s = std::sin(kPi / 4);
    auto rotated = [&f, c, s](const Vec& y) -> Vec {
        const Eigen::Vector3d g = f.gradient(y).head<3>().normalized();
        const Eigen::Vector3d p = y.head<3>();
        return Vec(c * g + s * p.cross(g));
    };
    const auto rot = unit_field_flow(rotated, f, start, opt);
    CHECK(rot.terminal_event == TerminalEvent::time_exhausted);
    CHECK(std::abs(rot.terminal_time - 1.0) < 1e-12);
    CHECK(geodesic_defect(rot) > 0.1);

    FlowTrace tiny;
    tiny.samples = {grad.samples[0], grad.samples[1]};
    CHECK_THROWS_AS(geodesic_defect(tiny), ParameterError);
}

TEST_CASE("conservation defect: reprojection on vs off") {
    const auto f = ObataFunction((Vec(4) << 0.4, -0.2, 0.1, 1.3).finished());
    const SpherePoint start = SpherePoint::normalized((Vec(4) << 0.5, 0.6, -0.6, -0.2).finished());
    FlowOptions opt;
    opt.dt = 1e-2;
    opt.t_max = 6.0;
    opt.direction = FlowDirection::backward;
    const auto on = normalized_gradient_flow(f, start, nullptr, opt);
    CHECK(on.defects.conservation <= 1e-10);
    opt.reproject = false;
    const auto off = normalized_gradient_flow(f, start, nullptr, opt);
    CHECK(off.defects.renorm > on.defects.renorm);
    FlowTrace half;
    half.samples.assign(off.samples.begin(), off.samples.begin() + static_cast<long>(off.samples.size() / 4));
    const double early = conservation_defect(half, f);
    const double late = conservation_defect(off, f);
    CHECK(late > early);
    CHECK(late > 1e3 * on.defects.conservation);
}

TEST_CASE("boundary flows fit the transnormal sine law") {
    for (int n : {2, 3, 4}) {
        for (int m = 0; m < n - 1; ++m) {
            for (double theta : kThetas) {
                const auto d = make_model_domain(n, m, theta, Side::complement);
                const double a = d.matched_robin_coefficient();
                const double L = 1.3;
                const auto f = ObataFunction::height(n, L);
                Vec u = Vec::Ones(m + 1), v = Vec::Ones(n - m);
                v(n - m - 1) = 0.2;
                const auto start = torus_point(n, m, theta, u, v);
                REQUIRE(d.on_boundary(start.coords()));
                for (auto dir : {FlowDirection::forward, FlowDirection::backward}) {
                    const auto tr = boundary_flow(d, f, a, start, 1e-3, dir);
                    CHECK(tr.terminal_event ==
                          (dir == FlowDirection::forward ? TerminalEvent::interior_max : TerminalEvent::interior_min));
                    CHECK(boundary_fit_residual(tr, f, a, dir) <= 1e-6);
                    const double focal = tr.samples.back().f;
                    CHECK(std::abs(std::abs(focal) - L * std::sin(theta)) < 1e-10);
                    double worst = 0;
                    for (const auto& s : tr.samples) {
                        CHECK(d.on_boundary(s.p));
                        worst = std::max(worst, transnormal_defect(d, f, a, SpherePoint(s.p)));
                    }
                    CHECK(worst <= 1e-10);
                    check_trace_invariants(tr, f, 1e-3);
                }
            }
        }
    }
}

TEST_CASE("boundary circle periods on surfaces") {
    for (double theta : kThetas) {
        const auto d = make_model_domain(2, 0, theta, Side::complement);
        const auto f = ObataFunction::height(2);
        const auto start = torus_point(2, 0, theta, Vec::Ones(1), (Vec(2) << 1, 0.3).finished());
        const double period = boundary_period(d, f, d.matched_robin_coefficient(), start);
        CHECK(std::abs(period - 2 * kPi * std::sin(theta)) < 1e-6);
    }
    const auto d = make_model_domain(2, 0, kPi / 4, Side::complement);
    const auto start = torus_point(2, 0, kPi / 4, Vec::Ones(1), (Vec(2) << 1, 0).finished());
    CHECK(std::abs(boundary_period(d, ObataFunction::height(2), 1.0, start) - kPi * std::sqrt(2.0)) < 1e-6);
}

TEST_CASE("k-fold boundary walks have length 2 pi k sin theta and k maxima") {
    for (double theta : kThetas) {
        const auto d = make_model_domain(2, 0, theta, Side::complement);
        const auto f = ObataFunction::height(2);
        const auto start = torus_point(2, 0, theta, Vec::Ones(1), (Vec(2) << 0.4, -1).finished());
        for (int k = 1; k <= 3; ++k) {
            const auto sig = boundary_loop_signature(d, f, start, k);
            CHECK(std::abs(sig.length - 2 * kPi * k * std::sin(theta)) < 1e-6);
            CHECK(sig.maxima == k);
        }
    }
}

TEST_CASE("boundary flow preconditions") {
    const auto f = ObataFunction::height(2);
    const auto d = make_model_domain(2, 1, kPi / 4, Side::complement);
    Vec y = Vec::Zero(3);
    y(0) = std::cos(kPi / 4);
    y(2) = std::sin(kPi / 4);
    CHECK_THROWS_AS(boundary_flow(d, f, 1.0, SpherePoint(y)), ParameterError);
    CHECK_THROWS_AS(boundary_flow(d, f, 1.0, SpherePoint(unit(3, 2))), BoundaryError);
}

TEST_CASE("Neumann hemisphere: backward flows share one terminal point") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> g;
    for (int n : {2, 3, 4}) {
        const auto f = ObataFunction(2.0 * unit(n + 1, 0));
        Vec common;
        for (int k = 0; k < 50; ++k) {
            Vec y(n + 1);
            for (int i = 0; i <= n; ++i) y(i) = g(rng);
            y(n) = std::abs(y(n));
            const SpherePoint p = SpherePoint::normalized(y);
            if (f.gradient(p.coords()).norm() < 1e-3) continue;
            FlowOptions opt;
            opt.dt = 1e-2;
            opt.direction = FlowDirection::backward;
            const auto tr = normalized_gradient_flow(f, p, nullptr, opt);
            REQUIRE(tr.terminal_event == TerminalEvent::interior_min);
            for (const auto& s : tr.samples) CHECK(s.p(n) >= -1e-12);
            if (common.size() == 0) common = tr.samples.back().p;
            CHECK((tr.samples.back().p - common).norm() == 0.0);
        }
    }
}
