#include "obata/numerics.hpp"

#include "obata/common.hpp"

#include <algorithm>
#include <cmath>

namespace obata {

std::vector<std::vector<double>> fornberg_weights(double x0, const std::vector<double>& xs, int order) {
    const int n = static_cast<int>(xs.size());
    require(n > order && order >= 0, "not enough nodes for the requested derivative");
    std::vector<std::vector<double>> c(order + 1, std::vector<double>(n, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, order);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    return c;
}

std::vector<double> uniform_derivative(const std::vector<double>& v, double h) {
    const int n = static_cast<int>(v.size());
    require(n >= 5, "derivative needs at least five samples");
    std::vector<double> d(n);
    for (int i = 2; i < n - 2; ++i) d[i] = (v[i - 2] - 8 * v[i - 1] + 8 * v[i + 1] - v[i + 2]) / (12 * h);
    auto fwd = [&](int i, int s) {
        return s * (-25 * v[i] + 48 * v[i + s] - 36 * v[i + 2 * s] + 16 * v[i + 3 * s] - 3 * v[i + 4 * s]) /
               (12 * h);
    };
    auto fwd1 = [&](int i, int s) {
        return s * (-3 * v[i - s] - 10 * v[i] + 18 * v[i + s] - 6 * v[i + 2 * s] + v[i + 3 * s]) / (12 * h);
    };
    d[0] = fwd(0, 1);
    d[1] = fwd1(1, 1);
    d[n - 1] = fwd(n - 1, -1);
    d[n - 2] = fwd1(n - 2, -1);
    return d;
}

std::vector<double> grid_derivative(const std::vector<double>& x, const std::vector<double>& v) {
    const int n = static_cast<int>(x.size());
    require(n >= 5 && static_cast<int>(v.size()) == n, "derivative needs at least five matching samples");
    std::vector<double> d(n);
    for (int i = 0; i < n; ++i) {
        const int lo = std::clamp(i - 2, 0, n - 5);
        const std::vector<double> nodes(x.begin() + lo, x.begin() + lo + 5);
        const auto w = fornberg_weights(x[i], nodes, 1);
        double s = 0;
        for (int j = 0; j < 5; ++j) s += w[1][j] * v[lo + j];
        d[i] = s;
    }
    return d;
}

double simpson(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    require(n >= 2 && y.size() == n, "quadrature needs matching samples");
    double total = 0;
    std::size_t i = 0;
    for (; i + 2 < n; i += 2) {
        const double h0 = x[i + 1] - x[i];
        const double h1 = x[i + 2] - x[i + 1];
        const double hs = h0 + h1;
        total += hs / 6 *
                 ((2 - h1 / h0) * y[i] + hs * hs / (h0 * h1) * y[i + 1] + (2 - h0 / h1) * y[i + 2]);
    }
    if (i + 1 < n) {
        // Last odd interval: quadratic through the final three points.
        if (n >= 3) {
            const double h0 = x[n - 2] - x[n - 3];
            const double h1 = x[n - 1] - x[n - 2];
            total += h1 * (y[n - 1] * (2 * h1 + 3 * h0) / (6 * (h0 + h1)) +
                           y[n - 2] * (h1 + 3 * h0) / (6 * h0) - y[n - 3] * h1 * h1 / (6 * h0 * (h0 + h1)));
        } else {
            total += 0.5 * (x[1] - x[0]) * (y[0] + y[1]);
        }
    }
    return total;
}

}  // namespace obata
