#pragma once

// Model domains on the round sphere S^n ⊂ R^{n+1} and the geometric oracles
// used by the rest of the toolkit: membership, outward normals, the Robin
// residual of a linear Obata function, and finite-difference shape operators.

#include "obata/common.hpp"

#include <memory>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace obata {

/// Robin coefficient a together with its angle, a = cot(theta).
struct RobinParameter {
    double a = 1.0;
    double theta = kPi / 4;

    static RobinParameter from_theta(double theta);
    static RobinParameter from_a(double a);
};

/// Unit vector in R^{n+1}.
class SpherePoint {
public:
    /// Throws ParameterError unless ||y| - 1| <= 1e-12.
    explicit SpherePoint(Vec y);
    /// Normalizes an arbitrary non-zero vector.
    static SpherePoint normalized(const Vec& y);

    const Vec& coords() const { return y_; }
    int ambient_dim() const { return static_cast<int>(y_.size()); }

private:
    Vec y_;
};

/// f(y) = <c, y>. Every such function solves the Obata equation on the round
/// sphere and satisfies |grad f|^2 + f^2 = |c|^2.
class ObataFunction {
public:
    explicit ObataFunction(Vec c);
    /// L * y_{n+1} on S^n.
    static ObataFunction height(int n, double L = 1.0);

    const Vec& coefficients() const { return c_; }
    double amplitude() const { return L_; }
    double value(const Vec& y) const { return c_.dot(y); }
    /// Intrinsic gradient c - <c,y> y.
    Vec gradient(const Vec& y) const { return c_ - c_.dot(y) * y; }

private:
    Vec c_;
    double L_;
};

/// Closed region of S^n described by a scalar defining function: a point is
/// inside when residual(y) <= kMembershipTol.
class Region {
public:
    static constexpr double kMembershipTol = 1e-10;

    virtual ~Region() = default;

    virtual int n() const = 0;
    /// Signed defining residual; negative inside, zero on the boundary.
    virtual double residual(const Vec& y) const = 0;
    /// Ambient gradient of residual(); its tangential part points outward.
    virtual Vec residual_gradient(const Vec& y) const = 0;
    /// Nearest boundary point (used to keep curves on the boundary).
    virtual Vec project_to_boundary(const Vec& y) const = 0;
    /// Random point on the boundary.
    virtual Vec sample_boundary(std::mt19937_64& rng) const = 0;
    virtual std::string describe() const = 0;

    bool contains(const Vec& y) const { return residual(y) <= kMembershipTol; }
    bool on_boundary(const Vec& y) const { return std::abs(residual(y)) <= kMembershipTol; }
    /// Outward unit normal, tangent to the sphere. Throws BoundaryError off the boundary.
    Vec outward_normal(const Vec& y) const;
    /// Outward normal without the boundary check (for points near the boundary).
    Vec normal_field(const Vec& y) const;
};

enum class Side { complement, core };

std::string to_string(Side side);
Side side_from_string(const std::string& s);

/// D^m(theta) (core) or S^n \ D^m(theta) (complement), possibly rotated by an
/// orthogonal map fixing the y_{n+1} axis.
class ModelDomain final : public Region {
public:
    ModelDomain(int n, int m, double theta, Side side, Mat rotation);

    int n() const override { return n_; }
    int m() const { return m_; }
    double theta() const { return theta_; }
    Side side() const { return side_; }
    const Mat& rotation() const { return rotation_; }

    /// Robin coefficient for which f = L y_{n+1} satisfies the boundary condition.
    double matched_robin_coefficient() const;

    double residual(const Vec& y) const override;
    Vec residual_gradient(const Vec& y) const override;
    Vec project_to_boundary(const Vec& y) const override;
    Vec sample_boundary(std::mt19937_64& rng) const override;
    std::string describe() const override;

private:
    // Defining function of the core in canonical (unrotated) coordinates.
    double core_residual(const Vec& q) const;
    Vec core_gradient(const Vec& q) const;

    int n_;
    int m_;
    double theta_;
    Side side_;
    Mat rotation_;
};

/// Geodesic ball {y_{n+1} >= -sin(theta)} of radius 3pi/2 - theta, theta in (pi/2, pi):
/// the a<0 model with a constant-f boundary and one interior maximum.
class NegativeBallModel final : public Region {
public:
    NegativeBallModel(int n, double theta);

    int n() const override { return n_; }
    double theta() const { return theta_; }
    double radius() const { return 1.5 * kPi - theta_; }

    double residual(const Vec& y) const override;
    Vec residual_gradient(const Vec& y) const override;
    Vec project_to_boundary(const Vec& y) const override;
    Vec sample_boundary(std::mt19937_64& rng) const override;
    std::string describe() const override;

private:
    int n_;
    double theta_;
};

ModelDomain make_model_domain(int n, int m, double theta, Side side);
ModelDomain make_model_domain(int n, int m, double theta, Side side, const Mat& rotation);

/// Rotation by `angle` in the (y_i, y_j) plane; fixes y_{n+1} when i, j < n.
Mat plane_rotation(int n, int i, int j, double angle);

bool contains(const Region& region, const SpherePoint& p);
Vec outward_normal(const Region& region, const SpherePoint& p);

/// d f / d nu + a f at a boundary point.
double robin_residual(const Region& region, const ObataFunction& f, double a, const SpherePoint& p);

/// Tangential (boundary) gradient of f.
Vec boundary_gradient(const Region& region, const ObataFunction& f, const Vec& y);

/// | |grad_bar f|^2 + (1 + a^2) f^2 - L^2 | at a boundary point.
double transnormal_defect(const Region& region, const ObataFunction& f, double a, const SpherePoint& p);

struct SpectrumEntry {
    double value;
    int multiplicity;
};

/// Distinct principal curvatures with multiplicities, sorted by value.
struct SecondFundamentalSpectrum {
    std::vector<SpectrumEntry> entries;

    int total_multiplicity() const;
    /// Same cluster structure and values within tol.
    bool matches(const SecondFundamentalSpectrum& other, double tol) const;
};

/// {(-a, n-1-m), (1/a, m)} with zero-multiplicity entries dropped.
SecondFundamentalSpectrum model_boundary_spectrum(int n, int m, double a);

/// Groups sorted eigenvalues into clusters of width tol. Throws NumericalError
/// when two neighbouring values are separated by more than tol but less than 10*tol.
SecondFundamentalSpectrum cluster_eigenvalues(std::vector<double> values, double tol);

/// Orthonormal tangent frame of the boundary at y (columns), with the
/// finite-difference shape operator h_ij = <D_{e_i} nu, e_j> in that frame.
struct ShapeOperator {
    Mat frame;
    Mat h;
};

inline constexpr double kDefaultFdStep = 1e-4;
inline constexpr double kClusterTol = 1e-4;

ShapeOperator numeric_shape_operator(const Region& region, const SpherePoint& p,
                                     double step = kDefaultFdStep);

SecondFundamentalSpectrum numeric_second_fundamental(const Region& region, const SpherePoint& p,
                                                     double step = kDefaultFdStep);

/// r1 = |h(grad_bar f, .) + a grad_bar f|, r2 = operator norm of
/// Hess_bar f - a f h + f g_bar.
struct BoundaryIdentityResiduals {
    double r1;
    double r2;
};

BoundaryIdentityResiduals boundary_identity_residuals(const Region& region, const ObataFunction& f,
                                                      double a, const SpherePoint& p,
                                                      double step = kDefaultFdStep);

}  // namespace obata
