#include "obata/jets.hpp"

#include "obata/common.hpp"

#include <algorithm>
#include <cmath>

namespace obata {

namespace {

template <class T>
T half();
template <>
double half<double>() {
    return 0.5;
}
template <>
TrigRational half<TrigRational>() {
    return TrigRational(Rational(1, 2));
}

bool is_zero(double x) { return x == 0; }
bool is_zero(const TrigRational& x) { return x.is_zero(); }

// Coefficient k of phi(f(r)) from phi^(m)(f_0) and f_1..f_k.
template <class T>
T compose_phi(const std::vector<T>& phi, const std::vector<T>& f, int k) {
    if (k == 0) return phi.empty() ? T(0) : phi[0];
    std::vector<T> base(k + 1, T(0));
    for (int i = 1; i <= k; ++i) base[i] = f[i];
    std::vector<T> power = base;
    T total(0);
    long factorial = 1;
    for (int m = 1; m <= k; ++m) {
        if (m > 1) {
            std::vector<T> next(k + 1, T(0));
            for (int i = 0; i <= k; ++i) {
                if (is_zero(power[i])) continue;
                for (int j = 1; i + j <= k; ++j) next[i + j] += power[i] * base[j];
            }
            power = std::move(next);
            factorial *= m;
        }
        if (m < static_cast<int>(phi.size()) && !is_zero(phi[m])) total += phi[m] * power[k] / T(factorial);
    }
    return total;
}

template <class T>
void check_homogeneous(const HomogeneousData<T>& d);
template <>
void check_homogeneous<double>(const HomogeneousData<double>& d) {
    require(d.g0 > 0, "g0 must be positive definite");
    require(d.f1 != 0, "f1 must not vanish");
}
template <>
void check_homogeneous<TrigRational>(const HomogeneousData<TrigRational>& d) {
    require(!d.g0.is_zero(), "g0 must be non-zero");
    require(!d.f1.is_zero(), "f1 must not vanish");
}

}  // namespace

template <class T>
HomogeneousJet<T> jet_extend(const HomogeneousData<T>& data, int K) {
    require(K >= 1, "jet order K must be at least 1");
    check_homogeneous(data);
    HomogeneousJet<T> jet;
    jet.reference = data.reference;
    jet.K = K;
    jet.f = {data.f0, data.f1};
    jet.g = {data.g0};
    jet.G = {T(1) / data.g0};
    const T h = half<T>();
    for (int k = 0; k < K; ++k) {
        jet.F.push_back(compose_phi(data.phi, jet.f, k));
        jet.f.push_back(-jet.F[k] / T((k + 2L) * (k + 1L)));
        T s1(0);
        for (int j = 1; j <= k; ++j) s1 += T(static_cast<long>(j) * (k + 2 - j)) * jet.f[k + 2 - j] * jet.g[j];
        T s2(0);
        for (int i = 0; i <= k; ++i) s2 += jet.F[i] * jet.g[k - i];
        const T rhs = h * s1 + s2;
        jet.g.push_back(-(T(2) * rhs) / (T(k + 1L) * data.f1));
        T acc(0);
        for (int j = 1; j <= k + 1; ++j) acc += jet.g[j] * jet.G[k + 1 - j];
        jet.G.push_back(-(jet.G[0] * acc));
    }
    jet.F.push_back(compose_phi(data.phi, jet.f, K));
    return jet;
}

template <class T>
std::vector<T> jet_constraint_residual(const HomogeneousJet<T>& jet) {
    require(static_cast<int>(jet.g.size()) == jet.K + 1 && static_cast<int>(jet.f.size()) == jet.K + 2,
            "incomplete jet");
    return std::vector<T>(jet.K, T(0));
}

template <class T>
std::vector<T> scalar_conservation_residual(const HomogeneousJet<T>& jet, const T& L_squared) {
    const int K = jet.K;
    require(static_cast<int>(jet.f.size()) == K + 2, "incomplete jet");
    std::vector<T> out;
    for (int k = 0; k < K; ++k) {
        T c(0);
        for (int i = 0; i <= k; ++i) {
            c += T(i + 1L) * jet.f[i + 1] * T(k - i + 1L) * jet.f[k - i + 1];
            c += jet.f[i] * jet.f[k - i];
        }
        if (k == 0) c -= L_squared;
        out.push_back(c);
    }
    return out;
}

template HomogeneousJet<double> jet_extend(const HomogeneousData<double>&, int);
template HomogeneousJet<TrigRational> jet_extend(const HomogeneousData<TrigRational>&, int);
template std::vector<double> jet_constraint_residual(const HomogeneousJet<double>&);
template std::vector<TrigRational> jet_constraint_residual(const HomogeneousJet<TrigRational>&);
template std::vector<double> scalar_conservation_residual(const HomogeneousJet<double>&, const double&);
template std::vector<TrigRational> scalar_conservation_residual(const HomogeneousJet<TrigRational>&,
                                                                const TrigRational&);

namespace {

template <class T>
void check_comparable(const HomogeneousJet<T>& A, const HomogeneousJet<T>& B, int K) {
    if (A.reference != B.reference)
        throw ParameterError("jets use different reference metrics (" + A.reference + " vs " + B.reference + ")");
    require(K >= 0 && K <= A.K && K <= B.K, "comparison order exceeds the jet order");
}

}  // namespace

bool jets_match(const HomogeneousJet<double>& A, const HomogeneousJet<double>& B, int K, double tol) {
    check_comparable(A, B, K);
    require(tol > 0, "tolerance must be positive");
    for (int k = 0; k <= K; ++k) {
        const double sign = k % 2 ? -1.0 : 1.0;
        if (std::abs(B.g[k] - sign * A.g[k]) > tol || std::abs(B.f[k] - sign * A.f[k]) > tol) return false;
    }
    return true;
}

bool jets_match(const HomogeneousJet<TrigRational>& A, const HomogeneousJet<TrigRational>& B, int K) {
    check_comparable(A, B, K);
    for (int k = 0; k <= K; ++k) {
        const TrigRational a_g = k % 2 ? -A.g[k] : A.g[k];
        const TrigRational a_f = k % 2 ? -A.f[k] : A.f[k];
        if (B.g[k] != a_g || B.f[k] != a_f) return false;
    }
    return true;
}

std::string to_string(JetModel m) {
    switch (m) {
        case JetModel::cap_complement: return "cap_complement";
        case JetModel::cap_core: return "cap_core";
        case JetModel::hemisphere: return "hemisphere";
    }
    return "unknown";
}

JetModel jet_model_from_string(const std::string& s) {
    if (s == "cap_complement") return JetModel::cap_complement;
    if (s == "cap_core") return JetModel::cap_core;
    if (s == "hemisphere") return JetModel::hemisphere;
    throw ParameterError("unknown jet model '" + s + "' (expected cap_complement, cap_core or hemisphere)");
}

HomogeneousData<double> model_data(JetModel model, double theta, double L) {
    require(L > 0, "L must be positive");
    HomogeneousData<double> d;
    if (model == JetModel::hemisphere) {
        d.g0 = 1;
        d.f0 = 0;
        d.f1 = L;
    } else {
        require(theta > 0 && theta < kPi / 2, "theta must lie in (0, pi/2)");
        const double c = std::cos(theta);
        d.g0 = c * c;
        d.f0 = L * std::sin(theta);
        d.f1 = (model == JetModel::cap_core ? -L : L) * c;
    }
    d.phi = phi_identity(d.f0);
    return d;
}

HomogeneousData<TrigRational> model_data_exact(JetModel model, const Rational& L) {
    require(L > 0, "L must be positive");
    HomogeneousData<TrigRational> d;
    if (model == JetModel::hemisphere) {
        d.g0 = TrigRational(1);
        d.f0 = TrigRational(0);
        d.f1 = TrigRational(L);
    } else {
        const TrigRational c = TrigRational::cos();
        d.g0 = c * c;
        d.f0 = TrigRational(L) * TrigRational::sin();
        d.f1 = TrigRational(model == JetModel::cap_core ? Rational(-L) : L) * c;
    }
    d.phi = phi_identity(d.f0);
    return d;
}

ExactSeries model_series_exact(JetModel model, const Rational& L, int K) {
    require(K >= 0, "K must be non-negative");
    const bool hemi = model == JetModel::hemisphere;
    const TrigRational c = hemi ? TrigRational(1) : TrigRational::cos();
    const TrigRational s = hemi ? TrigRational(0) : TrigRational::sin();
    const int sign = model == JetModel::cap_core ? -1 : 1;
    const TrigRational cos_cycle[4] = {c, -s, -c, s};
    const TrigRational sin_cycle[4] = {s, c, -s, -c};
    std::vector<TrigRational> C, S;
    Rational inv_fact = 1;
    for (int k = 0; k <= K + 1; ++k) {
        if (k > 0) inv_fact /= k;
        const Rational w = (k % 2 && sign < 0) ? Rational(-inv_fact) : inv_fact;
        C.push_back(TrigRational(w) * cos_cycle[k % 4]);
        S.push_back(TrigRational(w) * sin_cycle[k % 4]);
    }
    ExactSeries out;
    for (int k = 0; k <= K; ++k) {
        TrigRational g(0);
        for (int i = 0; i <= k; ++i) g += C[i] * C[k - i];
        out.g.push_back(g);
    }
    for (int k = 0; k <= K + 1; ++k) out.f.push_back(TrigRational(L) * S[k]);
    return out;
}

double jet_vs_exact(JetModel model, double theta, double L, int K) {
    require(K >= 0 && K <= 12, "K must lie in [0, 12]");
    const auto data = model_data(model, theta, L);
    const auto series = model_series_exact(model, 1, K);
    // Errors are scaled by the order's magnitude bound (2^k/k! for g, L/k! for f).
    auto bound = [](int k, double base) {
        double b = 1;
        for (int i = 1; i <= k; ++i) b *= base / i;
        return b;
    };
    auto rel = [](double got, double want, double scale) { return std::abs(got - want) / scale; };
    if (K == 0) {
        return std::max({rel(data.g0, series.g[0].evaluate(theta), 1.0),
                         rel(data.f0, L * series.f[0].evaluate(theta), L),
                         rel(data.f1, L * series.f[1].evaluate(theta), L)});
    }
    const auto jet = jet_extend(data, K);
    double worst = 0;
    for (int k = 0; k <= K; ++k) worst = std::max(worst, rel(jet.g[k], series.g[k].evaluate(theta), bound(k, 2.0)));
    for (int k = 0; k <= K + 1; ++k) worst = std::max(worst, rel(jet.f[k], L * series.f[k].evaluate(theta), L * bound(k, 1.0)));
    return worst;
}

bool jet_vs_exact_rational(JetModel model, const Rational& L, int K) {
    require(K >= 1 && K <= 12, "K must lie in [1, 12]");
    const auto jet = jet_extend(model_data_exact(model, L), K);
    const auto series = model_series_exact(model, L, K);
    return jet.g == series.g && jet.f == series.f;
}

// ---------------------------------------------------------------------- grid

int PeriodicGrid::size() const {
    int total = 1;
    for (int a = 0; a < d; ++a) total *= N;
    return total;
}

double PeriodicGrid::coordinate(int index, int axis) const {
    int i = index;
    for (int a = 0; a < axis; ++a) i /= N;
    i %= N;
    return period * (i + (half_offset ? 0.5 : 0.0)) / N;
}

namespace {

void check_grid(const PeriodicGrid& g) {
    require(g.d >= 1 && g.d <= 4, "grid dimension must lie in [1, 4]");
    require(g.N >= 4, "grid needs at least 4 points per axis");
    require(g.period > 0, "grid period must be positive");
}

// Periodic spectral differentiation matrix, rows summing to zero.
std::vector<double> diff_matrix(const PeriodicGrid& g) {
    const int N = g.N;
    std::vector<double> D(static_cast<std::size_t>(N) * N, 0.0);
    const double scale = 2 * kPi / g.period;
    for (int i = 0; i < N; ++i) {
        for (int j = 0; j < N; ++j) {
            if (i == j) continue;
            const double x = (i - j) * kPi / N;
            const double sgn = ((i - j) % 2 == 0) ? 1.0 : -1.0;
            D[static_cast<std::size_t>(i) * N + j] =
                0.5 * sgn * scale * (N % 2 == 0 ? std::cos(x) / std::sin(x) : 1 / std::sin(x));
        }
    }
    return D;
}

Field derivative(const PeriodicGrid& g, const std::vector<double>& D, const Field& u, int axis) {
    const int N = g.N;
    int stride = 1;
    for (int a = 0; a < axis; ++a) stride *= N;
    Field out(u.size());
    for (int p = 0; p < static_cast<int>(u.size()); ++p) {
        const int i = (p / stride) % N;
        const int base = p - i * stride;
        double s = 0;
        for (int j = 0; j < N; ++j) {
            if (j == i) continue;
            s += D[static_cast<std::size_t>(i) * N + j] * (u[base + j * stride] - u[p]);
        }
        out[p] = s;
    }
    return out;
}

using Small = std::vector<double>;  // d x d row-major

Small at(const TensorField& t, int p, int d) {
    Small m(static_cast<std::size_t>(d) * d);
    for (int c = 0; c < d * d; ++c) m[c] = t.comp[c][p];
    return m;
}

Small matmul(const Small& A, const Small& B, int d) {
    Small C(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0;
            for (int k = 0; k < d; ++k) s += A[i * d + k] * B[k * d + j];
            C[i * d + j] = s;
        }
    return C;
}

// Gauss-Jordan with partial pivoting.
Small inverse(Small A, int d) {
    Small inv(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) inv[i * d + i] = 1;
    for (int col = 0; col < d; ++col) {
        int piv = col;
        for (int r = col + 1; r < d; ++r)
            if (std::abs(A[r * d + col]) > std::abs(A[piv * d + col])) piv = r;
        if (A[piv * d + col] == 0) throw NumericalError("singular metric sample");
        if (piv != col)
            for (int j = 0; j < d; ++j) {
                std::swap(A[piv * d + j], A[col * d + j]);
                std::swap(inv[piv * d + j], inv[col * d + j]);
            }
        const double p = A[col * d + col];
        for (int j = 0; j < d; ++j) {
            A[col * d + j] /= p;
            inv[col * d + j] /= p;
        }
        for (int r = 0; r < d; ++r) {
            if (r == col) continue;
            const double factor = A[r * d + col];
            if (factor == 0) continue;
            for (int j = 0; j < d; ++j) {
                A[r * d + j] -= factor * A[col * d + j];
                inv[r * d + j] -= factor * inv[col * d + j];
            }
        }
    }
    return inv;
}

bool positive_definite(const Small& A, int d) {
    Small L(static_cast<std::size_t>(d) * d, 0.0);
    for (int j = 0; j < d; ++j) {
        double s = A[j * d + j];
        for (int k = 0; k < j; ++k) s -= L[j * d + k] * L[j * d + k];
        if (!(s > 0)) return false;
        L[j * d + j] = std::sqrt(s);
        for (int i = j + 1; i < d; ++i) {
            double t = A[i * d + j];
            for (int k = 0; k < j; ++k) t -= L[i * d + k] * L[j * d + k];
            L[i * d + j] = t / L[j * d + j];
        }
    }
    return true;
}

TensorField zero_tensor(int d, int size) {
    TensorField t;
    t.comp.assign(static_cast<std::size_t>(d) * d, Field(size, 0.0));
    return t;
}

void store(TensorField& t, int p, const Small& m) {
    for (std::size_t c = 0; c < m.size(); ++c) t.comp[c][p] = m[c];
}

}  // namespace

Field periodic_derivative(const PeriodicGrid& grid, const Field& u, int axis) {
    check_grid(grid);
    require(static_cast<int>(u.size()) == grid.size(), "field size does not match the grid");
    require(axis >= 0 && axis < grid.d, "axis out of range");
    return derivative(grid, diff_matrix(grid), u, axis);
}

std::vector<std::function<double(double)>> phi_identity_handles() {
    return {[](double x) { return x; }, [](double) { return 1.0; }};
}

GridData constant_grid_data(const PeriodicGrid& grid, double c0, double f0, double f1,
                            std::vector<std::function<double(double)>> phi) {
    check_grid(grid);
    GridData data;
    data.grid = grid;
    const int n = grid.size(), d = grid.d;
    data.g0 = zero_tensor(d, n);
    for (int a = 0; a < d; ++a) data.g0.comp[a * d + a].assign(n, c0);
    data.f0.assign(n, f0);
    data.f1.assign(n, f1);
    data.phi = std::move(phi);
    return data;
}

GridJet jet_extend(const GridData& data, int K) {
    require(K >= 1, "jet order K must be at least 1");
    const PeriodicGrid& grid = data.grid;
    check_grid(grid);
    const int n = grid.size(), d = grid.d;
    require(static_cast<int>(data.g0.comp.size()) == d * d, "g0 needs d*d components");
    for (const auto& c : data.g0.comp) require(static_cast<int>(c.size()) == n, "g0 size does not match the grid");
    require(static_cast<int>(data.f0.size()) == n && static_cast<int>(data.f1.size()) == n,
            "f0/f1 size does not match the grid");
    for (int p = 0; p < n; ++p) {
        const Small m = at(data.g0, p, d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < a; ++b)
                require(m[a * d + b] == m[b * d + a], "g0 must be symmetric");
        require(positive_definite(m, d), "g0 is not positive definite at sample " + std::to_string(p));
        require(data.f1[p] != 0, "f1 vanishes at sample " + std::to_string(p));
    }
    const auto D = diff_matrix(grid);

    GridJet jet;
    jet.grid = grid;
    jet.K = K;
    jet.f = {data.f0, data.f1};
    jet.g = {data.g0};
    jet.G = {zero_tensor(d, n)};
    for (int p = 0; p < n; ++p) store(jet.G[0], p, inverse(at(data.g0, p, d), d));

    // Per-point phi derivative values at f0.
    std::vector<std::vector<double>> phi(n);
    for (int p = 0; p < n; ++p)
        for (const auto& h : data.phi) phi[p].push_back(h(data.f0[p]));

    auto compose_at = [&](int k) {
        Field out(n);
        std::vector<double> series(k + 1);
        for (int p = 0; p < n; ++p) {
            for (int i = 0; i <= k; ++i) series[i] = jet.f[i][p];
            out[p] = compose_phi(phi[p], series, k);
        }
        return out;
    };

    // df[m][axis] and dg[j][axis] are filled lazily as orders appear.
    std::vector<std::vector<Field>> df;
    std::vector<std::vector<TensorField>> dg;
    auto grad_f = [&](int m) -> const std::vector<Field>& {
        while (static_cast<int>(df.size()) <= m) {
            const int idx = static_cast<int>(df.size());
            std::vector<Field> g;
            for (int a = 0; a < d; ++a) g.push_back(derivative(grid, D, jet.f[idx], a));
            df.push_back(std::move(g));
        }
        return df[m];
    };
    auto grad_g = [&](int j) -> const std::vector<TensorField>& {
        while (static_cast<int>(dg.size()) <= j) {
            const int idx = static_cast<int>(dg.size());
            std::vector<TensorField> g;
            for (int a = 0; a < d; ++a) {
                TensorField t;
                for (const auto& c : jet.g[idx].comp) t.comp.push_back(derivative(grid, D, c, a));
                g.push_back(std::move(t));
            }
            dg.push_back(std::move(g));
        }
        return dg[j];
    };

    const double h = 0.5;
    for (int k = 0; k < K; ++k) {
        jet.F.push_back(compose_at(k));
        Field next_f(n);
        for (int p = 0; p < n; ++p) next_f[p] = -jet.F[k][p] / static_cast<double>((k + 2L) * (k + 1L));
        jet.f.push_back(std::move(next_f));

        const auto& dfk = grad_f(k);
        std::vector<std::vector<Field>> ddf(d);
        for (int a = 0; a < d; ++a)
            for (int b = 0; b < d; ++b) ddf[a].push_back(derivative(grid, D, dfk[b], a));

        TensorField gk1 = zero_tensor(d, n);
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                for (int p = 0; p < n; ++p) {
                    double s1 = 0;
                    for (int j = 1; j <= k; ++j)
                        s1 += static_cast<double>(static_cast<long>(j) * (k + 2 - j)) * jet.f[k + 2 - j][p] *
                              jet.g[j].comp[a * d + b][p];
                    double chris = 0;
                    for (int i = 0; i <= k; ++i) {
                        for (int j = 0; j <= k - i; ++j) {
                            const auto& dgj = grad_g(j);
                            const auto& dfm = grad_f(k - i - j);
                            for (int del = 0; del < d; ++del) {
                                for (int gam = 0; gam < d; ++gam) {
                                    const double lam = dgj[a].comp[b * d + gam][p] + dgj[b].comp[a * d + gam][p] -
                                                       dgj[gam].comp[a * d + b][p];
                                    chris += jet.G[i].comp[del * d + gam][p] * lam * dfm[del][p];
                                }
                            }
                        }
                    }
                    double s2 = 0;
                    for (int i = 0; i <= k; ++i) s2 += jet.F[i][p] * jet.g[k - i].comp[a * d + b][p];
                    const double rhs = ddf[a][b][p] + h * s1 - h * chris + s2;
                    gk1.comp[a * d + b][p] = -(2.0 * rhs) / (static_cast<double>(k + 1L) * data.f1[p]);
                }
            }
        }
        jet.g.push_back(std::move(gk1));

        TensorField Gk1 = zero_tensor(d, n);
        for (int p = 0; p < n; ++p) {
            Small acc(static_cast<std::size_t>(d) * d, 0.0);
            for (int j = 1; j <= k + 1; ++j) {
                const Small term = matmul(at(jet.g[j], p, d), at(jet.G[k + 1 - j], p, d), d);
                for (std::size_t c = 0; c < acc.size(); ++c) acc[c] += term[c];
            }
            Small out = matmul(at(jet.G[0], p, d), acc, d);
            for (double& x : out) x = -x;
            store(Gk1, p, out);
        }
        jet.G.push_back(std::move(Gk1));
    }
    jet.F.push_back(compose_at(K));
    return jet;
}

std::vector<double> jet_constraint_residual(const GridJet& jet) {
    const PeriodicGrid& grid = jet.grid;
    const int n = grid.size(), d = grid.d, K = jet.K;
    require(static_cast<int>(jet.g.size()) == K + 1 && static_cast<int>(jet.f.size()) == K + 2 &&
                static_cast<int>(jet.G.size()) == K + 1,
            "incomplete jet");
    const auto D = diff_matrix(grid);
    std::vector<std::vector<Field>> df(K + 1);
    for (int m = 0; m <= K; ++m)
        for (int a = 0; a < d; ++a) df[m].push_back(derivative(grid, D, jet.f[m], a));
    std::vector<double> out;
    for (int k = 0; k < K; ++k) {
        double worst = 0;
        for (int a = 0; a < d; ++a) {
            for (int p = 0; p < n; ++p) {
                double sum = 0;
                for (int i = 0; i <= k; ++i)
                    for (int j = 0; j <= k - i; ++j)
                        for (int del = 0; del < d; ++del)
                            for (int b = 0; b < d; ++b)
                                sum += (i + 1.0) * jet.g[i + 1].comp[a * d + del][p] *
                                       jet.G[j].comp[b * d + del][p] * df[k - i - j][b][p];
                const double r = (k + 1.0) * df[k + 1][a][p] - 0.5 * sum;
                worst = std::max(worst, std::abs(r));
            }
        }
        out.push_back(worst);
    }
    return out;
}

bool jets_match(const GridJet& A, const GridJet& B, int K, double tol) {
    if (A.grid.d != B.grid.d || A.grid.N != B.grid.N || A.grid.period != B.grid.period ||
        A.grid.half_offset != B.grid.half_offset)
        throw ParameterError("jets live on different grids");
    require(K >= 0 && K <= A.K && K <= B.K, "comparison order exceeds the jet order");
    require(tol > 0, "tolerance must be positive");
    for (int k = 0; k <= K; ++k) {
        const double sign = k % 2 ? -1.0 : 1.0;
        for (std::size_t c = 0; c < A.g[k].comp.size(); ++c)
            for (std::size_t p = 0; p < A.g[k].comp[c].size(); ++p)
                if (std::abs(B.g[k].comp[c][p] - sign * A.g[k].comp[c][p]) > tol) return false;
        for (std::size_t p = 0; p < A.f[k].size(); ++p)
            if (std::abs(B.f[k][p] - sign * A.f[k][p]) > tol) return false;
    }
    return true;
}

}  // namespace obata
