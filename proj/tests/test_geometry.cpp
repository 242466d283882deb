#include <doctest.h>

#include "obata/geometry.hpp"

#include <cmath>
#include <random>

using namespace obata;

namespace {

Vec vec(std::initializer_list<double> xs) {
    Vec v(static_cast<Eigen::Index>(xs.size()));
    int i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

const double kThetas[] = {kPi / 6, kPi / 4, kPi / 3};

}  // namespace

TEST_CASE("robin parameter round trips between a and theta") {
    for (double theta : {0.3, 1.2, 2.0, 2.9}) {
        const auto r = RobinParameter::from_theta(theta);
        CHECK(std::abs(r.a - 1 / std::tan(theta)) < 1e-12);
        const auto back = RobinParameter::from_a(r.a);
        CHECK(std::abs(back.theta - theta) < 1e-12);
        CHECK((r.a > 0) == (theta < kPi / 2));
    }
    CHECK_THROWS_AS(RobinParameter::from_a(0.0), ParameterError);
}

TEST_CASE("sphere points and Obata functions") {
    CHECK_THROWS_AS(SpherePoint(vec({1, 1, 0})), ParameterError);
    const auto f = ObataFunction(vec({0.3, -1.2, 2.0}));
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g;
    for (int i = 0; i < 50; ++i) {
        const Vec y = SpherePoint::normalized(vec({g(rng), g(rng), g(rng)})).coords();
        const double v = f.value(y);
        CHECK(std::abs(f.gradient(y).squaredNorm() + v * v - f.amplitude() * f.amplitude()) < 1e-12);
        CHECK(std::abs(f.gradient(y).dot(y)) < 1e-14);
    }
}

TEST_CASE("model domains follow the three-case definition") {
    const double t = kPi / 4;
    // n=3, m=2: {y4 <= sin t}
    const auto d32 = make_model_domain(3, 2, t, Side::core);
    CHECK(d32.contains(vec({1, 0, 0, 0})));
    CHECK_FALSE(d32.contains(vec({0, 0, 0, 1})));
    CHECK(d32.contains(SpherePoint::normalized(vec({1, 0, 0, std::sin(t) - 1e-3})).coords()));

    // n=2, m=0: {y1 >= cos(pi/3)}
    const auto d20 = make_model_domain(2, 0, kPi / 3, Side::core);
    CHECK(d20.contains(vec({1, 0, 0})));
    CHECK_FALSE(d20.contains(vec({0, 0, 1})));

    // n=3, m=1: y2^2 + y3^2 + y4^2 <= sin^2 t holds at (1,0,0,0)
    const auto d31 = make_model_domain(3, 1, t, Side::core);
    CHECK(contains(d31, SpherePoint(vec({1, 0, 0, 0}))));
    CHECK_FALSE(contains(d31, SpherePoint(vec({0, 0, 0, 1}))));

    CHECK_THROWS_AS(make_model_domain(3, 3, t, Side::core), ParameterError);
    CHECK_THROWS_AS(make_model_domain(3, -1, t, Side::core), ParameterError);
    CHECK_THROWS_AS(make_model_domain(3, 1, 2.0, Side::core), ParameterError);
    CHECK_THROWS_AS(make_model_domain(1, 0, t, Side::core), ParameterError);
    CHECK_THROWS_AS(contains(d31, SpherePoint(vec({1, 0, 0}))), ParameterError);
}

TEST_CASE("membership edge cases") {
    for (int n = 2; n <= 4; ++n) {
        for (double t : kThetas) {
            Vec pole = Vec::Zero(n + 1);
            pole(n) = 1;
            CHECK(make_model_domain(n, n - 1, t, Side::complement).contains(pole));
            Vec eq = Vec::Zero(n + 1);
            eq(0) = 1;
            CHECK(make_model_domain(n, n - 1, t, Side::core).contains(eq));
            std::mt19937_64 rng(n);
            for (int m = 0; m < n; ++m) {
                const auto core = make_model_domain(n, m, t, Side::core);
                const auto comp = make_model_domain(n, m, t, Side::complement);
                for (int i = 0; i < 20; ++i) {
                    const Vec p = core.sample_boundary(rng);
                    CHECK(std::abs(p.norm() - 1) < 1e-12);
                    CHECK(std::abs(core.residual(p)) <= 1e-12);
                    CHECK(core.contains(p));
                    CHECK(comp.contains(p));
                }
            }
        }
    }
}

TEST_CASE("outward normals") {
    const double t = 0.6;
    const Vec p = vec({std::cos(t), 0, std::sin(t)});
    const auto comp = make_model_domain(2, 1, t, Side::complement);
    const auto core = make_model_domain(2, 1, t, Side::core);

    // Oracle: normalized tangential projection of grad y3, oriented by membership.
    Vec e3 = vec({0, 0, 1});
    Vec proj = e3 - e3.dot(p) * p;
    proj.normalize();
    const Vec nu_core = outward_normal(core, SpherePoint(p));
    const Vec nu_comp = outward_normal(comp, SpherePoint(p));
    CHECK((nu_core - proj).norm() < 1e-14);
    CHECK((nu_core - vec({-std::sin(t), 0, std::cos(t)})).norm() < 1e-14);
    CHECK((nu_comp - vec({std::sin(t), 0, -std::cos(t)})).norm() < 1e-14);
    // stepping along the outward normal leaves the domain
    const Vec out_core = SpherePoint::normalized(p + 1e-5 * nu_core).coords();
    CHECK(core.residual(out_core) > 0);
    const Vec out_comp = SpherePoint::normalized(p + 1e-5 * nu_comp).coords();
    CHECK(comp.residual(out_comp) > 0);

    // m = 0: parallel to the tangential projection of grad y1
    const auto d0 = make_model_domain(3, 0, kPi / 3, Side::core);
    std::mt19937_64 rng(3);
    for (int i = 0; i < 10; ++i) {
        const Vec q = d0.sample_boundary(rng);
        Vec e1 = Vec::Zero(4);
        e1(0) = 1;
        const Vec tp = e1 - e1.dot(q) * q;
        const Vec nu = d0.outward_normal(q);
        CHECK(std::abs(std::abs(nu.dot(tp.normalized())) - 1) < 1e-12);
        CHECK(std::abs(nu.dot(q)) < 1e-14);
        CHECK(d0.residual(SpherePoint::normalized(q + 1e-5 * nu).coords()) > 0);
    }

    CHECK_THROWS_AS(outward_normal(core, SpherePoint(vec({1, 0, 0}))), BoundaryError);
}

TEST_CASE("Robin residual vanishes on matched models") {
    std::mt19937_64 rng(11);
    for (int n = 2; n <= 4; ++n) {
        const auto f = ObataFunction::height(n, 1.7);
        for (double t : kThetas) {
            for (int m = 0; m < n; ++m) {
                for (Side side : {Side::complement, Side::core}) {
                    const auto d = make_model_domain(n, m, t, side);
                    const double a = d.matched_robin_coefficient();
                    CHECK(std::abs(a - (side == Side::complement ? 1 : -1) / std::tan(t)) < 1e-12);
                    for (int i = 0; i < 25; ++i) {
                        const SpherePoint p(d.sample_boundary(rng));
                        CHECK(std::abs(robin_residual(d, f, a, p)) <= 1e-10);
                        const double fp = f.value(p.coords());
                        CHECK(std::abs(robin_residual(d, f, a + 1, p) - fp) < 1e-12);
                        if (side == Side::complement)
                            CHECK(transnormal_defect(d, f, a, p) <= 1e-10);
                    }
                }
            }
        }
    }
}

TEST_CASE("rotations about the y_{n+1} axis are honoured") {
    const Mat R = plane_rotation(3, 0, 2, 0.7) * plane_rotation(3, 1, 2, -0.4);
    const auto d = make_model_domain(3, 1, kPi / 5, Side::complement, R);
    const auto f = ObataFunction::height(3);
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20; ++i) {
        const SpherePoint p(d.sample_boundary(rng));
        CHECK(std::abs(robin_residual(d, f, d.matched_robin_coefficient(), p)) < 1e-10);
        CHECK(numeric_second_fundamental(d, p).matches(model_boundary_spectrum(3, 1, 1 / std::tan(kPi / 5)), 1e-4));
    }
    CHECK_THROWS_AS(make_model_domain(3, 1, 0.5, Side::core, plane_rotation(3, 0, 3, 0.2)), ParameterError);
}

TEST_CASE("closed-form boundary spectra") {
    const auto cap = model_boundary_spectrum(5, 4, 2.0);
    REQUIRE(cap.entries.size() == 1);
    CHECK(cap.entries[0].value == doctest::Approx(0.5));
    CHECK(cap.entries[0].multiplicity == 4);
    const auto sph = model_boundary_spectrum(5, 0, 2.0);
    REQUIRE(sph.entries.size() == 1);
    CHECK(sph.entries[0].value == -2.0);
    const auto mixed = model_boundary_spectrum(4, 1, 1.0);
    REQUIRE(mixed.entries.size() == 2);
    CHECK(mixed.entries[0].value == -1.0);
    CHECK(mixed.entries[0].multiplicity == 2);
    CHECK(mixed.entries[1].value == 1.0);
    CHECK(mixed.entries[1].multiplicity == 1);
    CHECK(mixed.total_multiplicity() == 3);
    CHECK_THROWS_AS(model_boundary_spectrum(4, 1, -1.0), ParameterError);
}

TEST_CASE("finite-difference shape operators match the closed form") {
    std::mt19937_64 rng(2024);
    for (int n = 2; n <= 4; ++n) {
        for (double t : kThetas) {
            const double a = 1 / std::tan(t);
            for (int m = 0; m < n; ++m) {
                const auto d = make_model_domain(n, m, t, Side::complement);
                const auto expected = model_boundary_spectrum(n, m, a);
                for (int i = 0; i < 100; ++i) {
                    const SpherePoint p(d.sample_boundary(rng));
                    const auto s = numeric_second_fundamental(d, p);
                    CHECK(s.total_multiplicity() == n - 1);
                    CHECK(s.matches(expected, 1e-4));
                }
            }
        }
    }
}

TEST_CASE("Clifford torus T^1(pi/4) in S^3") {
    const auto d = make_model_domain(3, 1, kPi / 4, Side::complement);
    const double h = std::sqrt(0.5);
    const SpherePoint p(vec({0.5, 0.5, h * std::cos(0.3), h * std::sin(0.3)}));
    REQUIRE(d.on_boundary(p.coords()));
    const auto s = numeric_second_fundamental(d, p);
    REQUIRE(s.entries.size() == 2);
    CHECK(std::abs(s.entries[0].value + 1) < 1e-4);
    CHECK(s.entries[0].multiplicity == 1);
    CHECK(std::abs(s.entries[1].value - 1) < 1e-4);
    CHECK(s.entries[1].multiplicity == 1);
}

TEST_CASE("equator limit is totally geodesic") {
    const double t = kPi / 2 - 1e-5;
    const auto d = make_model_domain(3, 0, t, Side::complement);
    std::mt19937_64 rng(1);
    const auto s = numeric_second_fundamental(d, SpherePoint(d.sample_boundary(rng)));
    REQUIRE(s.entries.size() == 1);
    CHECK(std::abs(s.entries[0].value) < 1e-4);
    CHECK(s.entries[0].multiplicity == 2);
}

TEST_CASE("ambiguous clustering is reported") {
    CHECK_THROWS_AS(cluster_eigenvalues({0.0, 5e-4}, 1e-4), NumericalError);
    const auto s = cluster_eigenvalues({1.0, 1.00005, -1.0}, 1e-4);
    REQUIRE(s.entries.size() == 2);
    CHECK(s.entries[1].multiplicity == 2);
    const auto d = make_model_domain(3, 1, 0.5, Side::complement);
    std::mt19937_64 rng(1);
    const SpherePoint p(d.sample_boundary(rng));
    CHECK_THROWS_AS(numeric_second_fundamental(d, p, 1e-8), ParameterError);
}

TEST_CASE("boundary identities from the Robin condition") {
    std::mt19937_64 rng(99);
    for (int n = 3; n <= 4; ++n) {
        const auto f = ObataFunction::height(n, 1.3);
        for (double t : kThetas) {
            for (int m = 0; m < n - 1; ++m) {
                const auto d = make_model_domain(n, m, t, Side::complement);
                const double a = d.matched_robin_coefficient();
                for (int i = 0; i < 20; ++i) {
                    const SpherePoint p(d.sample_boundary(rng));
                    const auto r = boundary_identity_residuals(d, f, a, p);
                    CHECK(r.r1 <= 1e-4);
                    CHECK(r.r2 <= 1e-4);
                    // wrong sign of a
                    const double gnorm = boundary_gradient(d, f, p.coords()).norm();
                    const auto w = boundary_identity_residuals(d, f, -a, p);
                    CHECK(std::abs(w.r1 - 2 * std::abs(a) * gnorm) <= 1e-4);
                }
            }
            // cap boundary: f is constant, the gradient vanishes
            const auto cap = make_model_domain(n, n - 1, t, Side::complement);
            const SpherePoint p(cap.sample_boundary(rng));
            const auto r = boundary_identity_residuals(cap, f, cap.matched_robin_coefficient(), p);
            CHECK(r.r1 <= 1e-12);
            CHECK(r.r2 <= 1e-4);
        }
    }
}

TEST_CASE("focal values of f on the boundary") {
    // T^1(theta) in S^3: grad_bar f = 0 at (cos t u, 0, +-sin t), where f = +-L sin t.
    const double t = kPi / 3, L = 2.0;
    const auto d = make_model_domain(3, 1, t, Side::complement);
    const auto f = ObataFunction::height(3, L);
    const double a = d.matched_robin_coefficient();
    for (double sgn : {1.0, -1.0}) {
        const Vec p = vec({std::cos(t), 0, 0, sgn * std::sin(t)});
        CHECK(boundary_gradient(d, f, p).norm() < 1e-14);
        CHECK(std::abs(f.value(p) - sgn * L / std::sqrt(1 + a * a)) < 1e-12);
    }
}

TEST_CASE("negative ball model satisfies the Robin condition") {
    const double theta = 2.2;
    const NegativeBallModel ball(3, theta);
    const auto f = ObataFunction::height(3, 1.5);
    std::mt19937_64 rng(4);
    for (int i = 0; i < 20; ++i) {
        const SpherePoint p(ball.sample_boundary(rng));
        CHECK(std::abs(robin_residual(ball, f, 1 / std::tan(theta), p)) < 1e-12);
        CHECK(std::abs(f.value(p.coords()) + 1.5 * std::sin(theta)) < 1e-12);
    }
}
