#include "obata/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace obata {

RobinParameter RobinParameter::from_theta(double theta) {
    require(theta > 0 && theta < kPi && std::abs(theta - kPi / 2) > 1e-14,
            "theta must lie in (0, pi/2) or (pi/2, pi)");
    return {std::cos(theta) / std::sin(theta), theta};
}

RobinParameter RobinParameter::from_a(double a) {
    require(a != 0 && std::isfinite(a), "Robin coefficient must be finite and non-zero");
    // arccot with range (0, pi)
    return {a, kPi / 2 - std::atan(a)};
}

SpherePoint::SpherePoint(Vec y) : y_(std::move(y)) {
    if (std::abs(y_.norm() - 1.0) > 1e-12) throw ParameterError("point is not on the unit sphere");
}

SpherePoint SpherePoint::normalized(const Vec& y) {
    const double r = y.norm();
    require(r > 0, "cannot normalize the zero vector");
    return SpherePoint(y / r);
}

ObataFunction::ObataFunction(Vec c) : c_(std::move(c)), L_(c_.norm()) {
    require(L_ > 0, "Obata function needs a non-zero coefficient vector");
}

ObataFunction ObataFunction::height(int n, double L) {
    Vec c = Vec::Zero(n + 1);
    c(n) = L;
    return ObataFunction(c);
}

Vec Region::normal_field(const Vec& y) const {
    Vec g = residual_gradient(y);
    g -= g.dot(y) * y;
    const double norm = g.norm();
    if (norm == 0) throw NumericalError("defining function is critical at this point");
    return g / norm;
}

Vec Region::outward_normal(const Vec& y) const {
    if (!on_boundary(y)) throw BoundaryError("point is not on the boundary of " + describe());
    return normal_field(y);
}

std::string to_string(Side side) { return side == Side::core ? "core" : "complement"; }

Side side_from_string(const std::string& s) {
    if (s == "core") return Side::core;
    if (s == "complement") return Side::complement;
    throw ParameterError("unknown side '" + s + "' (expected core or complement)");
}

namespace {

bool fixes_top_axis(const Mat& R) {
    const int N = static_cast<int>(R.rows());
    if (R.cols() != N) return false;
    if (!(R.transpose() * R).isApprox(Mat::Identity(N, N), 1e-12)) return false;
    Vec e = Vec::Zero(N);
    e(N - 1) = 1;
    return (R * e - e).norm() <= 1e-12;
}

Vec gaussian(int dim, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = g(rng);
    return v;
}

void scale_block(Vec& q, int first, int count, double radius) {
    const double r = q.segment(first, count).norm();
    if (r == 0) throw NumericalError("cannot project a point on the focal set onto the boundary");
    q.segment(first, count) *= radius / r;
}

}  // namespace

ModelDomain::ModelDomain(int n, int m, double theta, Side side, Mat rotation)
    : n_(n), m_(m), theta_(theta), side_(side), rotation_(std::move(rotation)) {
    require(n >= 2, "sphere dimension n must be >= 2");
    require(m >= 0 && m <= n - 1, "torus index m must lie in [0, n-1]");
    require(theta > 0 && theta < kPi / 2, "theta must lie in (0, pi/2)");
    require(fixes_top_axis(rotation_) && rotation_.rows() == n + 1,
            "rotation must be orthogonal, of size n+1 and fix the y_{n+1} axis");
}

double ModelDomain::matched_robin_coefficient() const {
    const double cot = std::cos(theta_) / std::sin(theta_);
    return side_ == Side::complement ? cot : -cot;
}

double ModelDomain::core_residual(const Vec& q) const {
    if (m_ == 0) return std::cos(theta_) - q(0);
    if (m_ == n_ - 1) return q(n_) - std::sin(theta_);
    const double s = std::sin(theta_);
    return q.segment(m_ + 1, n_ - m_).squaredNorm() - s * s;
}

Vec ModelDomain::core_gradient(const Vec& q) const {
    Vec g = Vec::Zero(n_ + 1);
    if (m_ == 0) {
        g(0) = -1;
    } else if (m_ == n_ - 1) {
        g(n_) = 1;
    } else {
        g.segment(m_ + 1, n_ - m_) = 2 * q.segment(m_ + 1, n_ - m_);
    }
    return g;
}

double ModelDomain::residual(const Vec& y) const {
    const double r = core_residual(rotation_.transpose() * y);
    return side_ == Side::core ? r : -r;
}

Vec ModelDomain::residual_gradient(const Vec& y) const {
    Vec g = rotation_ * core_gradient(rotation_.transpose() * y);
    return side_ == Side::core ? g : Vec(-g);
}

Vec ModelDomain::project_to_boundary(const Vec& y) const {
    Vec q = rotation_.transpose() * y;
    const double c = std::cos(theta_), s = std::sin(theta_);
    if (m_ == 0) {
        q(0) = c;
        scale_block(q, 1, n_, s);
    } else if (m_ == n_ - 1) {
        q(n_) = s;
        scale_block(q, 0, n_, c);
    } else {
        scale_block(q, 0, m_ + 1, c);
        scale_block(q, m_ + 1, n_ - m_, s);
    }
    return rotation_ * q;
}

Vec ModelDomain::sample_boundary(std::mt19937_64& rng) const {
    return project_to_boundary(rotation_ * gaussian(n_ + 1, rng));
}

std::string ModelDomain::describe() const {
    std::ostringstream os;
    os << (side_ == Side::core ? "D^" : "S^n \\ D^") << m_ << "(theta=" << theta_ << ") in S^" << n_;
    return os.str();
}

NegativeBallModel::NegativeBallModel(int n, double theta) : n_(n), theta_(theta) {
    require(n >= 2, "sphere dimension n must be >= 2");
    require(theta > kPi / 2 && theta < kPi, "a<0 models need theta in (pi/2, pi)");
}

double NegativeBallModel::residual(const Vec& y) const { return -std::sin(theta_) - y(n_); }

Vec NegativeBallModel::residual_gradient(const Vec&) const {
    Vec g = Vec::Zero(n_ + 1);
    g(n_) = -1;
    return g;
}

Vec NegativeBallModel::project_to_boundary(const Vec& y) const {
    Vec q = y;
    q(n_) = -std::sin(theta_);
    scale_block(q, 0, n_, std::abs(std::cos(theta_)));
    return q;
}

Vec NegativeBallModel::sample_boundary(std::mt19937_64& rng) const {
    return project_to_boundary(gaussian(n_ + 1, rng));
}

std::string NegativeBallModel::describe() const {
    std::ostringstream os;
    os << "geodesic ball of radius " << radius() << " in S^" << n_;
    return os.str();
}

ModelDomain make_model_domain(int n, int m, double theta, Side side) {
    require(n >= 2, "sphere dimension n must be >= 2");
    return ModelDomain(n, m, theta, side, Mat::Identity(n + 1, n + 1));
}

ModelDomain make_model_domain(int n, int m, double theta, Side side, const Mat& rotation) {
    return ModelDomain(n, m, theta, side, rotation);
}

Mat plane_rotation(int n, int i, int j, double angle) {
    require(i >= 0 && j >= 0 && i <= n && j <= n && i != j, "invalid rotation plane");
    Mat R = Mat::Identity(n + 1, n + 1);
    R(i, i) = std::cos(angle);
    R(j, j) = std::cos(angle);
    R(i, j) = -std::sin(angle);
    R(j, i) = std::sin(angle);
    return R;
}

namespace {

void check_dim(const Region& region, const Vec& y) {
    if (y.size() != region.n() + 1) throw ParameterError("point dimension does not match the domain");
}

}  // namespace

bool contains(const Region& region, const SpherePoint& p) {
    check_dim(region, p.coords());
    return region.contains(p.coords());
}

Vec outward_normal(const Region& region, const SpherePoint& p) {
    check_dim(region, p.coords());
    return region.outward_normal(p.coords());
}

double robin_residual(const Region& region, const ObataFunction& f, double a, const SpherePoint& p) {
    check_dim(region, p.coords());
    const Vec& y = p.coords();
    return f.gradient(y).dot(region.outward_normal(y)) + a * f.value(y);
}

Vec boundary_gradient(const Region& region, const ObataFunction& f, const Vec& y) {
    const Vec nu = region.normal_field(y);
    Vec g = f.gradient(y);
    return g - g.dot(nu) * nu;
}

double transnormal_defect(const Region& region, const ObataFunction& f, double a, const SpherePoint& p) {
    const Vec& y = p.coords();
    if (!region.on_boundary(y)) throw BoundaryError("point is not on the boundary");
    const double v = f.value(y);
    const double L = f.amplitude();
    return std::abs(boundary_gradient(region, f, y).squaredNorm() + (1 + a * a) * v * v - L * L);
}

int SecondFundamentalSpectrum::total_multiplicity() const {
    int total = 0;
    for (const auto& e : entries) total += e.multiplicity;
    return total;
}

bool SecondFundamentalSpectrum::matches(const SecondFundamentalSpectrum& other, double tol) const {
    if (entries.size() != other.entries.size()) return false;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].multiplicity != other.entries[i].multiplicity) return false;
        if (std::abs(entries[i].value - other.entries[i].value) > tol) return false;
    }
    return true;
}

SecondFundamentalSpectrum model_boundary_spectrum(int n, int m, double a) {
    require(a > 0, "model boundary spectrum is defined for a > 0");
    require(n >= 2 && m >= 0 && m <= n - 1, "invalid (n, m)");
    SecondFundamentalSpectrum s;
    if (n - 1 - m > 0) s.entries.push_back({-a, n - 1 - m});
    if (m > 0) s.entries.push_back({1 / a, m});
    return s;
}

SecondFundamentalSpectrum cluster_eigenvalues(std::vector<double> values, double tol) {
    std::sort(values.begin(), values.end());
    SecondFundamentalSpectrum s;
    double sum = 0;
    int count = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) {
            const double gap = values[i] - values[i - 1];
            if (gap > tol && gap < 10 * tol) {
                std::ostringstream os;
                os << "ambiguous principal curvature clustering: gap " << gap << " between "
                   << values[i - 1] << " and " << values[i];
                throw NumericalError(os.str());
            }
            if (gap > tol) {
                s.entries.push_back({sum / count, count});
                sum = 0;
                count = 0;
            }
        }
        sum += values[i];
        ++count;
    }
    if (count > 0) s.entries.push_back({sum / count, count});
    return s;
}

namespace {

// Tangent frame of the boundary at y: orthonormal complement of {y, nu}.
Mat tangent_frame(const Vec& y, const Vec& nu) {
    const int N = static_cast<int>(y.size());
    Mat basis(N, 2);
    basis.col(0) = y;
    basis.col(1) = nu;
    Mat Q = basis.householderQr().householderQ();
    return Q.rightCols(N - 2);
}

// Richardson-extrapolated derivative of a vector field along the boundary
// curve t -> project(y + t e).
template <typename Field>
Vec boundary_derivative(const Region& region, const Field& field, const Vec& y, const Vec& e, double step) {
    auto central = [&](double s) {
        const Vec plus = region.project_to_boundary(y + s * e);
        const Vec minus = region.project_to_boundary(y - s * e);
        return Vec((field(plus) - field(minus)) / (2 * s));
    };
    return (4 * central(step / 2) - central(step)) / 3;
}

void check_step(double step) {
    require(step >= 1e-6 && step <= 1e-2, "finite-difference step must lie in [1e-6, 1e-2]");
}

Mat matrix_along_frame(const Region& region, const Mat& frame, const Vec& y, double step,
                       const auto& field) {
    const int k = static_cast<int>(frame.cols());
    Mat h(k, k);
    for (int i = 0; i < k; ++i) {
        const Vec d = boundary_derivative(region, field, y, frame.col(i), step);
        for (int j = 0; j < k; ++j) h(i, j) = d.dot(frame.col(j));
    }
    return 0.5 * (h + h.transpose());
}

}  // namespace

ShapeOperator numeric_shape_operator(const Region& region, const SpherePoint& p, double step) {
    check_step(step);
    const Vec& y = p.coords();
    const Vec nu = region.outward_normal(y);
    ShapeOperator out;
    out.frame = tangent_frame(y, nu);
    out.h = matrix_along_frame(region, out.frame, y, step,
                               [&](const Vec& q) { return region.normal_field(q); });
    return out;
}

SecondFundamentalSpectrum numeric_second_fundamental(const Region& region, const SpherePoint& p, double step) {
    const ShapeOperator op = numeric_shape_operator(region, p, step);
    Eigen::SelfAdjointEigenSolver<Mat> eig(op.h, Eigen::EigenvaluesOnly);
    const Vec ev = eig.eigenvalues();
    return cluster_eigenvalues(std::vector<double>(ev.data(), ev.data() + ev.size()), kClusterTol);
}

BoundaryIdentityResiduals boundary_identity_residuals(const Region& region, const ObataFunction& f,
                                                      double a, const SpherePoint& p, double step) {
    const ShapeOperator op = numeric_shape_operator(region, p, step);
    const Vec& y = p.coords();
    const Vec grad_bar = boundary_gradient(region, f, y);
    const Vec g = op.frame.transpose() * grad_bar;

    const Mat hess = matrix_along_frame(region, op.frame, y, step,
                                        [&](const Vec& q) { return boundary_gradient(region, f, q); });
    const double v = f.value(y);
    const Mat tensor = hess - a * v * op.h + v * Mat::Identity(op.h.rows(), op.h.cols());

    BoundaryIdentityResiduals r;
    r.r1 = (op.h * g + a * g).norm();
    Eigen::SelfAdjointEigenSolver<Mat> eig(tensor, Eigen::EigenvaluesOnly);
    r.r2 = eig.eigenvalues().cwiseAbs().maxCoeff();
    return r;
}

}  // namespace obata
