#include "obata/cli.hpp"

#include "obata/batch.hpp"
#include "obata/jets.hpp"
#include "obata/ode.hpp"
#include "obata/report.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

namespace obata {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

using json = nlohmann::ordered_json;

// ------------------------------------------------------------------ options

struct OutputArgs {
    std::string path;
    std::string format = "json";
    std::string config;
};

// Reads key=value lines ('#' comments) into "--key value" tokens.
std::vector<std::string> config_tokens(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot read config file '" + path + "'");
    std::vector<std::string> tokens;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos || line[b] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ParameterError(path + ":" + std::to_string(lineno) + ": expected key=value");
        auto trim = [](std::string x) {
            const auto lo = x.find_first_not_of(" \t");
            const auto hi = x.find_last_not_of(" \t");
            return lo == std::string::npos ? std::string() : x.substr(lo, hi - lo + 1);
        };
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || key.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-") !=
                               std::string::npos || key == "config")
            throw ParameterError(path + ":" + std::to_string(lineno) + ": invalid key '" + key + "'");
        for (char& c : key)
            if (c == '_') c = '-';
        tokens.push_back("--" + key);
        tokens.push_back(value);
    }
    return tokens;
}

// Splices config-file entries in right after the subcommand name.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw ParameterError("--config needs a file");
            if (!path.empty()) throw ParameterError("--config given twice");
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            if (!path.empty()) throw ParameterError("--config given twice");
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (path.empty() || rest.empty()) return rest;
    const auto tokens = config_tokens(path);
    std::vector<std::string> out = {rest[0]};
    out.insert(out.end(), tokens.begin(), tokens.end());
    out.insert(out.end(), rest.begin() + 1, rest.end());
    return out;
}

// Unset values stay NaN.
struct AngleArgs {
    double theta = kUnset;
    double a = kUnset;

    bool given() const { return !std::isnan(theta) || !std::isnan(a); }
    std::optional<RobinParameter> resolve() const {
        require(std::isnan(theta) || std::isnan(a), "theta and a are mutually exclusive");
        if (!std::isnan(theta)) return RobinParameter::from_theta(theta);
        if (!std::isnan(a)) return RobinParameter::from_a(a);
        return std::nullopt;
    }
};

void add_common(CLI::App* sub, OutputArgs& out) {
    sub->add_option("--output,-o", out.path, "Report file (stdout when omitted)");
    sub->add_option("--format", out.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--config", out.config, "Flat key=value file; command-line flags override it");
}

void add_angle(CLI::App* sub, AngleArgs& angle) {
    auto* theta = sub->add_option("--theta", angle.theta, "Model angle in radians");
    auto* a = sub->add_option("--a", angle.a, "Robin coefficient a = cot(theta)");
    theta->excludes(a);
}

CLI::Option* add_tol(CLI::App* sub, const std::string& name, double& value, const std::string& what) {
    return sub->add_option(name, value, what)->capture_default_str()->check(CLI::PositiveNumber);
}

void echo_angle(json& params, const RobinParameter& rp) {
    params["theta"] = rp.theta;
    params["a"] = rp.a;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw ParameterError("empty entry in list '" + s + "'");
        out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw ParameterError("not a number: '" + s + "'");
    }
    if (used != s.size()) throw ParameterError("not a number: '" + s + "'");
    return v;
}

int parse_int(const std::string& s) {
    const double v = parse_double(s);
    if (v != std::floor(v)) throw ParameterError("not an integer: '" + s + "'");
    return static_cast<int>(v);
}

// ------------------------------------------------------------------ eigen

struct EigenArgs {
    int n = 3;
    AngleArgs angle;
    double R = kUnset;
    std::string bc = "robin";
    int ell_max = 3;
    double tol = 1e-6;
    double residual_tol = 1e-6;
};

Report run_eigen(const EigenArgs& args) {
    require(args.n >= 2 && args.n <= 12, "n must lie in [2, 12]");
    require(args.ell_max >= 0 && args.ell_max <= 20, "ell-max must lie in [0, 20]");
    const BcKind kind = bc_kind_from_string(args.bc);
    Report rep;
    rep.command = "eigen";
    rep.parameters["n"] = args.n;
    const bool R_given = !std::isnan(args.R);
    BoundaryCondition bc;
    double R = args.R;
    if (kind == BcKind::robin) {
        const auto rp = args.angle.resolve();
        require(rp.has_value(), "robin boundary condition needs --theta or --a");
        if (!R_given) {
            require(rp->theta > 0 && rp->theta < kPi / 2,
                    "the cap radius pi/2 - theta needs theta in (0, pi/2); pass --R for a < 0");
            R = kPi / 2 - rp->theta;
        }
        echo_angle(rep.parameters, *rp);
        bc = BoundaryCondition::robin(rp->a);
    } else {
        require(!args.angle.given(), "--theta/--a apply to the robin condition only");
        if (!R_given) R = kPi / 2;
        bc = kind == BcKind::dirichlet ? BoundaryCondition::dirichlet() : BoundaryCondition::neumann();
    }
    require(R > 0 && R <= kPi / 2 + 1e-12, "R must lie in (0, pi/2]");
    rep.parameters["R"] = R;
    rep.parameters["bc"] = to_string(kind);
    rep.parameters["ell_max"] = args.ell_max;
    rep.parameters["tol"] = args.tol;
    rep.parameters["residual_tol"] = args.residual_tol;

    const auto res = first_eigenvalue_scan(args.n, R, bc, args.ell_max);
    rep.data["xi"] = res.xi;
    rep.data["ell"] = res.ell;
    rep.data["bc_residual"] = res.bc_residual;
    rep.data["ode_residual"] = res.ode_residual;
    if (!R_given) {
        rep.add(check_le("xi_minus_n", std::abs(res.xi - args.n), args.tol));
        if (kind == BcKind::neumann) rep.add(check_true("minimizer_at_ell_1", res.ell == 1));
    }
    rep.add(check_le("bc_residual", res.bc_residual, args.residual_tol));
    rep.add(check_le("ode_residual", res.ode_residual, args.residual_tol));
    return rep;
}

// ------------------------------------------------------------------ flow

struct FlowArgs {
    int n = 3;
    int m = 1;
    AngleArgs angle;
    int count = 100;
    std::uint64_t seed = 1;
    double dt = 1e-3;
    double t_max = 10;
    std::string sign = "any";
    double conservation_tol = 1e-10;
};

struct FlowRun {
    Report report;
    CsvTable table;
};

ModelDomain positive_domain(int n, int m, const RobinParameter& rp) {
    require(n >= 2 && n <= 8, "n must lie in [2, 8]");
    require(m >= 0 && m <= n - 1, "m must lie in [0, n-1]");
    require(rp.a > 0, "flows run on a > 0 models (theta in (0, pi/2))");
    return make_model_domain(n, m, rp.theta, Side::complement);
}

FlowRun run_flow_batch(const FlowArgs& args) {
    const auto rp = args.angle.resolve();
    require(rp.has_value(), "flow needs --theta or --a");
    const auto domain = positive_domain(args.n, args.m, *rp);
    require(args.count >= 0 && args.count <= 100000, "count must lie in [0, 100000]");
    require(args.dt > 0 && args.dt <= 1e-2, "dt must lie in (0, 1e-2]");
    require(args.t_max > 0, "t-max must be positive");
    int sign = 0;
    if (args.sign == "positive") sign = 1;
    else if (args.sign == "negative") sign = -1;
    else require(args.sign == "any", "sign must be any, positive or negative");

    FlowRun run;
    Report& rep = run.report;
    rep.command = "flow";
    rep.parameters["n"] = args.n;
    rep.parameters["m"] = args.m;
    echo_angle(rep.parameters, *rp);
    rep.parameters["count"] = args.count;
    rep.parameters["seed"] = args.seed;
    rep.parameters["dt"] = args.dt;
    rep.parameters["t_max"] = args.t_max;
    rep.parameters["sign"] = args.sign;
    rep.parameters["conservation_tol"] = args.conservation_tol;

    const auto f = ObataFunction::height(args.n);
    const auto starts = seeded_interior_starts(domain, f, args.count, args.seed, sign);
    const auto rows = flow_batch(domain, f, starts, args.dt, args.t_max, ExecPolicy::parallel);

    run.table.comments = {"seed=" + std::to_string(args.seed)};
    run.table.header = {"index",          "start",        "f_start",      "expected_event", "terminal_event",
                        "terminal_time",  "conservation", "tolerance",    "pass"};
    json arr = json::array();
    for (const auto& r : rows) {
        const TerminalEvent expected = r.f_start > 0 ? TerminalEvent::interior_max : TerminalEvent::interior_min;
        const std::string id = "start[" + std::to_string(r.index) + "]";
        const Check ev = check_true(id + ".terminal_event", r.event == expected);
        const Check cons = check_le(id + ".conservation", r.conservation, args.conservation_tol);
        rep.add(ev);
        rep.add(cons);
        std::string coords;
        for (int i = 0; i < r.start.size(); ++i) coords += (i ? " " : "") + format_number(r.start(i));
        run.table.rows.push_back({std::to_string(r.index), coords, format_number(r.f_start), to_string(expected),
                                  to_string(r.event), format_number(r.terminal_time), format_number(r.conservation),
                                  format_number(args.conservation_tol), ev.pass && cons.pass ? "true" : "false"});
        json e;
        e["index"] = r.index;
        e["start"] = std::vector<double>(r.start.data(), r.start.data() + r.start.size());
        e["f_start"] = r.f_start;
        e["terminal_event"] = to_string(r.event);
        e["terminal_time"] = r.terminal_time;
        e["conservation"] = r.conservation;
        arr.push_back(e);
    }
    rep.data["flows"] = arr;
    return run;
}

// ------------------------------------------------------------------ boundary

struct BoundaryArgs {
    int n = 3;
    int m = 1;
    AngleArgs angle;
    int samples = 100;
    std::uint64_t seed = 1;
    double shape_tol = 1e-4;
    double law_tol = 1e-10;
    double length_tol = 1e-6;
};

Report run_boundary(const BoundaryArgs& args) {
    const auto rp = args.angle.resolve();
    require(rp.has_value(), "boundary needs --theta or --a");
    const auto domain = positive_domain(args.n, args.m, *rp);
    require(args.samples >= 1 && args.samples <= 100000, "samples must lie in [1, 100000]");
    Report rep;
    rep.command = "boundary";
    rep.parameters["n"] = args.n;
    rep.parameters["m"] = args.m;
    echo_angle(rep.parameters, *rp);
    rep.parameters["samples"] = args.samples;
    rep.parameters["seed"] = args.seed;
    rep.parameters["shape_tol"] = args.shape_tol;
    rep.parameters["law_tol"] = args.law_tol;

    const auto f = ObataFunction::height(args.n);
    const auto points = seeded_boundary_points(domain, args.samples, args.seed);
    const auto shapes = shape_batch(domain, points, args.shape_tol, ExecPolicy::parallel);
    double shape_dev = 0, transnormal = 0, robin = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        shape_dev = std::max(shape_dev, shapes[i].max_deviation);
        const SpherePoint p(points[i]);
        transnormal = std::max(transnormal, transnormal_defect(domain, f, rp->a, p));
        robin = std::max(robin, std::abs(robin_residual(domain, f, rp->a, p)));
    }
    json spec = json::array();
    for (const auto& e : model_boundary_spectrum(args.n, args.m, rp->a).entries)
        spec.push_back({{"value", e.value}, {"multiplicity", e.multiplicity}});
    rep.data["model_spectrum"] = spec;
    rep.add(check_le("shape_spectrum_deviation", shape_dev, args.shape_tol));
    rep.add(check_le("transnormal_defect", transnormal, args.law_tol));
    rep.add(check_le("robin_residual", robin, args.law_tol));
    if (args.n == 2 && args.m == 0) {
        const double expected = 2 * kPi * std::sin(rp->theta);
        const double len = boundary_period(domain, f, rp->a, SpherePoint(points[0]));
        rep.data["boundary_length"] = len;
        rep.add(check_le("boundary_length_error", std::abs(len - expected), args.length_tol));
    }
    return rep;
}

// ------------------------------------------------------------------ phi

struct PhiArgs {
    AngleArgs angle;
    std::string base = "flat_disk";
    double rho_max = 2.5;
    double h = 1e-3;
    double residual_tol = 1e-6;
    double plateau_tol = 1e-8;
    double twin_tol = 1e-5;
};

Report run_phi(const PhiArgs& args) {
    const auto rp = args.angle.resolve();
    require(rp.has_value(), "phi needs --theta or --a");
    require(rp->a < 0, "the phi equation needs a < 0 (theta in (pi/2, pi))");
    const BaseGeometry base = base_geometry_from_string(args.base);
    Report rep;
    rep.command = "phi";
    echo_angle(rep.parameters, *rp);
    rep.parameters["base"] = to_string(base);
    rep.parameters["rho_max"] = args.rho_max;
    rep.parameters["h"] = args.h;
    rep.parameters["residual_tol"] = args.residual_tol;
    rep.parameters["plateau_tol"] = args.plateau_tol;
    rep.parameters["twin_tol"] = args.twin_tol;

    const auto p = phi_radial_solve(rp->a, base, args.rho_max, args.h);
    const auto twin = phi_radial_solve(rp->a, base, args.rho_max, args.h, 2e-6);
    const double plateau = kPi - rp->theta;
    double twin_diff = 0;
    bool monotone = true;
    for (std::size_t i = 0; i < p.samples.size(); ++i) {
        twin_diff = std::max(twin_diff, std::abs(p.samples[i].phi - twin.samples[i].phi));
        if (i > 0 && p.samples[i].phi < p.samples[i - 1].phi) monotone = false;
    }
    rep.data["plateau"] = plateau;
    rep.data["plateau_rho"] = p.plateau_rho;
    rep.data["phi_end"] = p.samples.back().phi;
    rep.add(check_le("graph_equation_residual", phi_profile_residual(p), args.residual_tol));
    if (p.plateau_rho > 0)
        rep.add(check_le("plateau_error", std::abs(p.samples.back().phi - plateau), args.plateau_tol));
    rep.add(check_true("monotone", monotone));
    rep.add(check_le("twin_difference", twin_diff, args.twin_tol));
    return rep;
}

// ------------------------------------------------------------------ jet

struct JetArgs {
    std::string model = "cap_complement";
    AngleArgs angle;
    double L = 1;
    int K = 8;
    double tol = 1e-12;
    double constraint_tol = 1e-10;
};

json jet_json(const HomogeneousJet<double>& jet) {
    return {{"backend", "homogeneous"}, {"K", jet.K}, {"g_coeffs", jet.g}, {"f_coeffs", jet.f}};
}

json jet_json(const HomogeneousJet<TrigRational>& jet) {
    std::vector<std::string> g, f;
    for (const auto& x : jet.g) g.push_back(x.str());
    for (const auto& x : jet.f) f.push_back(x.str());
    return {{"backend", "exact"}, {"K", jet.K}, {"g_coeffs", g}, {"f_coeffs", f}};
}

Report run_jet(const JetArgs& args) {
    const JetModel model = jet_model_from_string(args.model);
    require(args.K >= 1 && args.K <= 12, "K must lie in [1, 12]");
    require(args.L > 0, "L must be positive");
    const auto rp = args.angle.resolve();
    const double theta = rp ? rp->theta : kPi / 4;
    require(model == JetModel::hemisphere || (theta > 0 && theta < kPi / 2), "theta must lie in (0, pi/2)");
    Report rep;
    rep.command = "jet";
    rep.parameters["model"] = to_string(model);
    if (model != JetModel::hemisphere) {
        rep.parameters["theta"] = theta;
        rep.parameters["a"] = std::cos(theta) / std::sin(theta);
    }
    rep.parameters["L"] = args.L;
    rep.parameters["K"] = args.K;
    rep.parameters["tol"] = args.tol;
    rep.parameters["constraint_tol"] = args.constraint_tol;

    const auto data = model_data(model, theta, args.L);
    const auto jet = jet_extend(data, args.K);
    const auto exact = jet_extend(model_data_exact(model, Rational(args.L)), args.K);
    rep.data["jets"] = json::array({jet_json(jet), jet_json(exact)});

    rep.add(check_le("double_vs_series", jet_vs_exact(model, theta, args.L, args.K), args.tol));
    rep.add(check_true("exact_equals_series", jet_vs_exact_rational(model, Rational(args.L), args.K)));

    PeriodicGrid grid;
    grid.N = 8;
    const auto gjet = jet_extend(constant_grid_data(grid, data.g0, data.f0, data.f1, phi_identity_handles()), args.K);
    double constraint = 0;
    for (double r : jet_constraint_residual(gjet)) constraint = std::max(constraint, r);
    bool same = true;
    for (int k = 0; k <= args.K; ++k)
        for (int p = 0; p < grid.size(); ++p)
            same = same && gjet.g[k].comp[0][p] == jet.g[k] && gjet.f[k][p] == jet.f[k];
    rep.add(check_le("grid_constraint_residual", constraint, args.constraint_tol));
    rep.add(check_true("grid_equals_homogeneous", same));

    auto partner = data;
    if (model == JetModel::cap_complement) partner = model_data(JetModel::cap_core, theta, args.L);
    else if (model == JetModel::cap_core) partner = model_data(JetModel::cap_complement, theta, args.L);
    else partner.f1 = -partner.f1;
    rep.add(check_true("glues_with_partner", jets_match(jet, jet_extend(partner, args.K), args.K, args.tol)));
    if (model != JetModel::hemisphere) {
        const double other = theta + 0.01 < kPi / 2 ? theta + 0.01 : theta - 0.01;
        auto wrong = model_data(model == JetModel::cap_core ? JetModel::cap_complement : JetModel::cap_core, other,
                                args.L);
        rep.add(check_true("rejects_theta_mismatch", !jets_match(jet, jet_extend(wrong, args.K), 0, args.tol)));
    }
    return rep;
}

// ------------------------------------------------------------------ reilly

struct ReillyArgs {
    int n = 3;
    double R = kPi / 4;
    std::string profile = "cos";
    double tol = 1e-6;
};

Report run_reilly(const ReillyArgs& args) {
    require(args.n >= 2 && args.n <= 12, "n must lie in [2, 12]");
    RadialProfile profile;
    if (args.profile == "cos") {
        profile = {[](double r) { return std::cos(r); }, [](double r) { return -std::sin(r); },
                   [](double r) { return -std::cos(r); }};
    } else if (args.profile == "r2") {
        profile = {[](double r) { return r * r; }, [](double r) { return 2 * r; }, [](double) { return 2.0; }};
    } else {
        throw ParameterError("profile must be cos or r2");
    }
    Report rep;
    rep.command = "reilly";
    rep.parameters["n"] = args.n;
    rep.parameters["R"] = args.R;
    rep.parameters["profile"] = args.profile;
    rep.parameters["tol"] = args.tol;
    const auto res = reilly_identity_check(args.n, args.R, profile);
    rep.data["lhs"] = res.lhs;
    rep.data["rhs"] = res.rhs;
    rep.add(check_le("relative_defect", res.defect, args.tol));
    return rep;
}

// ------------------------------------------------------------------ verify-all

struct Profile {
    int flow_starts;
    int boundary_samples;
    int max_n;
    int neumann_range;
};

Profile profile_from(const std::string& name) {
    if (name == "quick") return {20, 20, 3, 3};
    if (name == "full") return {100, 100, 5, 10};
    throw ParameterError("profile must be quick or full");
}

void merge(Report& into, const Report& part, const std::string& label) {
    for (const auto& c : part.checks) into.add({label + "." + c.name, c.value, c.tolerance, c.pass});
}

std::string label(const std::string& base, const std::vector<std::pair<std::string, std::string>>& kv) {
    std::string s = base;
    for (const auto& [k, v] : kv) s += "[" + k + "=" + v + "]";
    return s;
}

Report run_verify_all(const std::string& profile_name) {
    const Profile prof = profile_from(profile_name);
    Report rep;
    rep.command = "verify-all";
    rep.parameters["profile"] = profile_name;
    const double thetas[] = {kPi / 6, kPi / 4, kPi / 3};
    const std::string theta_names[] = {"pi/6", "pi/4", "pi/3"};

    std::vector<EigenCell> cells;
    for (int n = 2; n <= 5; ++n)
        for (double t : thetas) cells.push_back(robin_cap_cell(n, t));
    for (int n = 2; n <= 5; ++n) {
        cells.push_back({n, kPi / 2, BoundaryCondition::dirichlet(), 3});
        cells.push_back({n, kPi / 2, BoundaryCondition::neumann(), 3});
    }
    const auto eig = eigen_sweep(cells, {}, ExecPolicy::parallel);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        const std::string name = label("eigen", {{"n", std::to_string(c.n)}, {"bc", to_string(c.bc.kind)},
                                                 {"R", format_number(c.R)}});
        rep.add(check_le(name + ".xi_minus_n", std::abs(eig[i].xi - c.n), 1e-6));
        if (c.bc.kind == BcKind::neumann) rep.add(check_true(name + ".minimizer_at_ell_1", eig[i].ell == 1));
    }

    for (int n = 2; n <= prof.max_n; ++n) {
        for (int ti = 0; ti < 3; ++ti) {
            const double t = thetas[ti];
            const auto d = make_model_domain(n, n - 1, t, Side::complement);
            const auto f = ObataFunction::height(n);
            Vec y = Vec::Zero(n + 1);
            y(0) = std::cos(t);
            y(n) = std::sin(t);
            const auto tr = normalized_gradient_flow(f, SpherePoint(y), &d, FlowOptions{});
            const std::string name = label("cap_flow", {{"n", std::to_string(n)}, {"theta", theta_names[ti]}});
            rep.add(check_true(name + ".reaches_max", tr.terminal_event == TerminalEvent::interior_max));
            rep.add(check_le(name + ".hit_time_error", std::abs(tr.terminal_time - (kPi / 2 - t)), 1e-6));
            rep.add(check_le(name + ".conservation", tr.defects.conservation, 1e-10));
        }
        for (double t : {2 * kPi / 3, 3 * kPi / 4, 5 * kPi / 6}) {
            const NegativeBallModel ball(n, t);
            const auto f = ObataFunction::height(n);
            const double eps = 1e-6;
            const Vec y = std::cos(eps) * Vec::Unit(n + 1, n) + std::sin(eps) * Vec::Unit(n + 1, 0);
            FlowOptions opt;
            opt.direction = FlowDirection::backward;
            const auto tr = normalized_gradient_flow(f, SpherePoint(y), &ball, opt);
            const std::string name = label("ball_flow", {{"n", std::to_string(n)}, {"theta", format_number(t)}});
            rep.add(check_true(name + ".hits_boundary", tr.terminal_event == TerminalEvent::boundary_hit));
            rep.add(check_le(name + ".distance_error", std::abs(eps + tr.terminal_time - ball.radius()), 1e-6));

            const double s = kPi - t;
            const auto warped = warped_model_build(n, 1 / std::tan(t), "round", -s, s);
            Vec z = Vec::Zero(n + 1);
            z(0) = std::cos(s);
            z(n) = -std::sin(s);
            const auto wt = normalized_gradient_flow(f, SpherePoint(z), &warped, FlowOptions{});
            const std::string wname = label("warped_flow", {{"n", std::to_string(n)}, {"theta", format_number(t)}});
            rep.add(check_true(wname + ".hits_boundary", wt.terminal_event == TerminalEvent::boundary_hit));
            rep.add(check_le(wname + ".crossing_time_error", std::abs(wt.terminal_time - (2 * kPi - 2 * t)), 1e-6));
        }
        for (int m = 0; m <= n - 1; ++m) {
            FlowArgs fa;
            fa.n = n;
            fa.m = m;
            fa.count = prof.flow_starts;
            fa.seed = 1;
            fa.angle.theta = 0.7;
            merge(rep, run_flow_batch(fa).report, label("flow", {{"n", std::to_string(n)}, {"m", std::to_string(m)}}));

            BoundaryArgs ba;
            ba.n = n;
            ba.m = m;
            ba.samples = prof.boundary_samples;
            ba.angle = fa.angle;
            merge(rep, run_boundary(ba), label("boundary", {{"n", std::to_string(n)}, {"m", std::to_string(m)}}));
        }
    }

    const double a_values[] = {-0.5, -1.0, -2.0};
    for (double a : a_values) {
        for (const char* base : {"flat_disk", "round_cap"}) {
            PhiArgs pa;
            pa.angle.a = a;
            pa.base = base;
            merge(rep, run_phi(pa), label("phi", {{"a", format_number(a)}, {"base", base}}));
        }
    }

    for (const char* model : {"cap_complement", "cap_core", "hemisphere"}) {
        JetArgs ja;
        ja.model = model;
        merge(rep, run_jet(ja), label("jet", {{"model", model}}));
    }

    for (int n = 2; n <= 5; ++n)
        for (double R : {kPi / 4, kPi / 2})
            for (const char* pr : {"cos", "r2"})
                merge(rep, run_reilly({n, R, pr, 1e-6}),
                      label("reilly", {{"n", std::to_string(n)}, {"R", format_number(R)}, {"profile", pr}}));

    const double s_lim = kPi / 2 - 1e-3;
    for (double L : {std::sqrt(2.0), 3.0}) {
        for (int i = -prof.neumann_range; i <= prof.neumann_range; ++i) {
            bool bounded = true, monotone = true;
            for (double s_end : {s_lim, -s_lim}) {
                const auto r = neumann_curvature_flow(L, i, s_end);
                monotone = monotone && r.monotone;
                bounded = bounded && !r.blew_up;
            }
            const std::string name = label("neumann", {{"L", format_number(L)}, {"lambda0", std::to_string(i)}});
            rep.add(check_true(name + ".lambda_cos_nondecreasing", monotone));
            rep.add(check_true(name + ".bounded_iff_zero", bounded == (i == 0)));
        }
    }

    for (double a : {0.5, 1.0, 2.0}) {
        const double k = std::sqrt(1 + a * a);
        std::vector<double> grid;
        for (int i = 0; i <= 100; ++i) grid.push_back(-kPi / (2 * k) + 1e-3 + (kPi / k - 2e-3) * i / 100);
        for (double mu : {-0.4 * a, 0.0, 0.3 * a, 0.9 * a}) {
            const double res = curvature_ode_residual({a, mu, CurvatureBranch::mobius}, grid);
            rep.add(check_le(label("curvature", {{"a", format_number(a)}, {"mu", format_number(mu)}}) + ".ode_residual",
                             res, 1e-9));
        }
    }
    return rep;
}

// ------------------------------------------------------------------ sweep

struct SweepArgs {
    std::string kind = "eigen";
    std::string n_list = "2,3,4,5";
    std::string theta_list;
    std::string bc = "robin";
    int ell_max = 3;
    double tol = 1e-6;
    FlowArgs flow;
};

FlowRun run_sweep(const SweepArgs& args) {
    if (args.kind == "flow") {
        FlowRun run = run_flow_batch(args.flow);
        run.report.command = "sweep";
        run.report.parameters["kind"] = "flow";
        run.table.comments.push_back("kind=flow");
        return run;
    }
    require(args.kind == "eigen", "sweep kind must be eigen or flow");
    const BcKind kind = bc_kind_from_string(args.bc);
    std::vector<int> ns;
    for (const auto& s : split_list(args.n_list)) ns.push_back(parse_int(s));
    std::vector<double> thetas;
    if (kind == BcKind::robin) {
        const std::string list = args.theta_list.empty() && !ns.empty()
                                     ? format_number(kPi / 6) + "," + format_number(kPi / 4) + "," +
                                           format_number(kPi / 3)
                                     : args.theta_list;
        for (const auto& s : split_list(list)) thetas.push_back(parse_double(s));
    } else {
        require(args.theta_list.empty(), "theta-list applies to the robin condition only");
        thetas.push_back(kUnset);
    }
    FlowRun run;
    Report& rep = run.report;
    rep.command = "sweep";
    rep.parameters["kind"] = "eigen";
    rep.parameters["n_list"] = ns;
    if (kind == BcKind::robin) rep.parameters["theta_list"] = thetas;
    rep.parameters["bc"] = to_string(kind);
    rep.parameters["ell_max"] = args.ell_max;
    rep.parameters["tol"] = args.tol;

    std::vector<EigenCell> cells;
    for (int n : ns) {
        require(n >= 2 && n <= 12, "n must lie in [2, 12]");
        for (double t : thetas) {
            if (kind == BcKind::robin) {
                cells.push_back(robin_cap_cell(n, t, args.ell_max));
            } else {
                cells.push_back({n, kPi / 2,
                                 kind == BcKind::dirichlet ? BoundaryCondition::dirichlet()
                                                           : BoundaryCondition::neumann(),
                                 args.ell_max});
            }
        }
    }
    const auto res = eigen_sweep(cells, {}, ExecPolicy::parallel);
    run.table.comments = {"seed=" + std::to_string(args.flow.seed), "kind=eigen"};
    run.table.header = {"n",  "theta",        "R",            "ell",       "bc",  "xi",
                        "bc_residual", "ode_residual", "tolerance", "pass"};
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& c = cells[i];
        const double t = kind == BcKind::robin ? kPi / 2 - c.R : kUnset;
        const Check chk = check_le(label("cell", {{"n", std::to_string(c.n)}, {"theta", format_number(t)}}) +
                                       ".xi_minus_n",
                                   std::abs(res[i].xi - c.n), args.tol);
        rep.add(chk);
        run.table.rows.push_back({std::to_string(c.n), kind == BcKind::robin ? format_number(t) : "",
                                  format_number(c.R), std::to_string(res[i].ell), to_string(c.bc.kind),
                                  format_number(res[i].xi), format_number(res[i].bc_residual),
                                  format_number(res[i].ode_residual), format_number(args.tol),
                                  chk.pass ? "true" : "false"});
    }
    return run;
}

// ------------------------------------------------------------------ driver

void emit(const std::string& text, const OutputArgs& out, std::ostream& stream) {
    if (out.path.empty()) {
        stream << text;
        return;
    }
    std::ofstream file(out.path, std::ios::binary);
    if (!file) throw ParameterError("cannot open output file '" + out.path + "'");
    file << text;
}

std::string render(const Report& rep, const std::optional<CsvTable>& table, const std::string& format) {
    if (format == "csv") return (table ? *table : checks_table(rep)).str();
    return rep.to_json().dump(2) + "\n";
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical verification toolkit for the Obata equation with Robin and Neumann boundaries"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.set_help_all_flag("--help-all");

    OutputArgs o_eigen, o_flow, o_boundary, o_phi, o_jet, o_reilly, o_verify, o_sweep;

    EigenArgs ea;
    auto* eigen = app.add_subcommand("eigen", "First eigenvalue of a geodesic ball by shooting");
    eigen->add_option("--n", ea.n, "Dimension")->capture_default_str();
    add_angle(eigen, ea.angle);
    eigen->add_option("--R", ea.R, "Ball radius (default pi/2 - theta for robin, pi/2 otherwise)");
    eigen->add_option("--bc", ea.bc, "Boundary condition")->capture_default_str()->check(CLI::IsMember({"robin", "dirichlet", "neumann"}));
    eigen->add_option("--ell-max", ea.ell_max, "Largest angular degree scanned")->capture_default_str();
    add_tol(eigen, "--tol", ea.tol, "Tolerance on |xi - n|");
    add_tol(eigen, "--residual-tol", ea.residual_tol, "Tolerance on boundary and ODE residuals");
    add_common(eigen, o_eigen);

    FlowArgs fa;
    auto* flow = app.add_subcommand("flow", "Normalized gradient flows from seeded interior starts");
    flow->add_option("--n", fa.n, "Dimension")->capture_default_str();
    flow->add_option("--m", fa.m, "Core dimension")->capture_default_str();
    add_angle(flow, fa.angle);
    flow->add_option("--count", fa.count, "Number of starts")->capture_default_str();
    flow->add_option("--seed", fa.seed, "Random seed")->capture_default_str();
    add_tol(flow, "--dt", fa.dt, "Step size");
    add_tol(flow, "--t-max", fa.t_max, "Time limit");
    flow->add_option("--sign", fa.sign, "Sign filter on f at the start")->capture_default_str()
        ->check(CLI::IsMember({"any", "positive", "negative"}));
    add_tol(flow, "--conservation-tol", fa.conservation_tol, "Tolerance on the conservation defect");
    add_common(flow, o_flow);

    BoundaryArgs ba;
    auto* boundary = app.add_subcommand("boundary", "Boundary curvature and transnormal checks");
    boundary->add_option("--n", ba.n, "Dimension")->capture_default_str();
    boundary->add_option("--m", ba.m, "Core dimension")->capture_default_str();
    add_angle(boundary, ba.angle);
    boundary->add_option("--samples", ba.samples, "Boundary samples")->capture_default_str();
    boundary->add_option("--seed", ba.seed, "Random seed")->capture_default_str();
    add_tol(boundary, "--shape-tol", ba.shape_tol, "Tolerance on principal curvatures");
    add_tol(boundary, "--law-tol", ba.law_tol, "Tolerance on transnormal and Robin residuals");
    add_tol(boundary, "--length-tol", ba.length_tol, "Tolerance on the boundary length (n = 2, m = 0)");
    add_common(boundary, o_boundary);

    PhiArgs pa;
    auto* phi = app.add_subcommand("phi", "Radial profile of the graph equation (a < 0)");
    add_angle(phi, pa.angle);
    phi->add_option("--base", pa.base, "Base geometry")->capture_default_str()->check(CLI::IsMember({"flat_disk", "round_cap"}));
    add_tol(phi, "--rho-max", pa.rho_max, "Radial extent");
    add_tol(phi, "--step", pa.h, "Step size");
    add_tol(phi, "--residual-tol", pa.residual_tol, "Tolerance on the equation residual");
    add_tol(phi, "--plateau-tol", pa.plateau_tol, "Tolerance on the plateau value");
    add_tol(phi, "--twin-tol", pa.twin_tol, "Tolerance on the twin-solve difference");
    add_common(phi, o_phi);

    JetArgs ja;
    auto* jet = app.add_subcommand("jet", "Boundary Taylor jets and gluing checks");
    jet->add_option("--model", ja.model, "Model")->capture_default_str()
        ->check(CLI::IsMember({"cap_complement", "cap_core", "hemisphere"}));
    add_angle(jet, ja.angle);
    add_tol(jet, "--L", ja.L, "Amplitude of f");
    jet->add_option("--K", ja.K, "Jet order")->capture_default_str();
    add_tol(jet, "--tol", ja.tol, "Tolerance on coefficient errors");
    add_tol(jet, "--constraint-tol", ja.constraint_tol, "Tolerance on constraint residuals");
    add_common(jet, o_jet);

    ReillyArgs ra;
    auto* reilly = app.add_subcommand("reilly", "Reilly identity for a radial function on a cap");
    reilly->add_option("--n", ra.n, "Dimension")->capture_default_str();
    add_tol(reilly, "--R", ra.R, "Cap radius");
    reilly->add_option("--profile", ra.profile, "Radial function")->capture_default_str()->check(CLI::IsMember({"cos", "r2"}));
    add_tol(reilly, "--tol", ra.tol, "Tolerance on the relative defect");
    add_common(reilly, o_reilly);

    std::string profile = "quick";
    auto* verify = app.add_subcommand("verify-all", "Run the whole verification suite");
    verify->add_option("--profile", profile, "Suite size")->capture_default_str()->check(CLI::IsMember({"quick", "full"}));
    add_common(verify, o_verify);

    SweepArgs sa;
    auto* sweep = app.add_subcommand("sweep", "Cross-product sweep written as CSV");
    sweep->add_option("--kind", sa.kind, "Sweep kind")->capture_default_str()->check(CLI::IsMember({"eigen", "flow"}));
    sweep->add_option("--n-list", sa.n_list, "Comma-separated dimensions (eigen)")->capture_default_str();
    sweep->add_option("--theta-list", sa.theta_list, "Comma-separated angles in radians (eigen, robin)");
    sweep->add_option("--bc", sa.bc, "Boundary condition (eigen)")->capture_default_str()
        ->check(CLI::IsMember({"robin", "dirichlet", "neumann"}));
    sweep->add_option("--ell-max", sa.ell_max, "Largest angular degree (eigen)")->capture_default_str();
    add_tol(sweep, "--tol", sa.tol, "Tolerance on |xi - n| (eigen)");
    sweep->add_option("--n", sa.flow.n, "Dimension (flow)")->capture_default_str();
    sweep->add_option("--m", sa.flow.m, "Core dimension (flow)")->capture_default_str();
    add_angle(sweep, sa.flow.angle);
    sweep->add_option("--count", sa.flow.count, "Number of starts (flow)")->capture_default_str();
    sweep->add_option("--seed", sa.flow.seed, "Random seed recorded in the header")->capture_default_str();
    add_tol(sweep, "--dt", sa.flow.dt, "Step size (flow)");
    sweep->add_option("--sign", sa.flow.sign, "Sign filter (flow)")->capture_default_str()
        ->check(CLI::IsMember({"any", "positive", "negative"}));
    add_tol(sweep, "--conservation-tol", sa.flow.conservation_tol, "Conservation tolerance (flow)");
    add_common(sweep, o_sweep);
    o_sweep.format = "csv";

    try {
        const auto expanded = expand_config(args);
        std::vector<std::string> reversed(expanded.rbegin(), expanded.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitPass;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitPass;
    } catch (const CLI::ParseError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const ParameterError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    }

    try {
        Report rep;
        std::optional<CsvTable> table;
        const OutputArgs* o = nullptr;
        if (eigen->parsed()) {
            rep = run_eigen(ea);
            o = &o_eigen;
        } else if (flow->parsed()) {
            auto run = run_flow_batch(fa);
            rep = std::move(run.report);
            table = std::move(run.table);
            o = &o_flow;
        } else if (boundary->parsed()) {
            rep = run_boundary(ba);
            o = &o_boundary;
        } else if (phi->parsed()) {
            rep = run_phi(pa);
            o = &o_phi;
        } else if (jet->parsed()) {
            rep = run_jet(ja);
            o = &o_jet;
        } else if (reilly->parsed()) {
            rep = run_reilly(ra);
            o = &o_reilly;
        } else if (verify->parsed()) {
            rep = run_verify_all(profile);
            o = &o_verify;
        } else {
            auto run = run_sweep(sa);
            rep = std::move(run.report);
            table = std::move(run.table);
            o = &o_sweep;
        }
        emit(render(rep, table, o->format), *o, out);
        if (const Check* c = rep.first_failure()) {
            err << "verification failed: " << c->name << " = " << format_number(c->value)
                << " (tolerance " << format_number(c->tolerance) << ")\n";
            return kExitVerificationFailure;
        }
        return kExitPass;
    } catch (const ParameterError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const BoundaryError& e) {
        err << "configuration error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        err << "verification failed: " << e.what() << "\n";
        return kExitVerificationFailure;
    }
}

}  // namespace obata
