#include "obata/flow.hpp"

#include <algorithm>
#include <cmath>

namespace obata {

std::string to_string(TerminalEvent e) {
    switch (e) {
        case TerminalEvent::interior_max: return "interior_max";
        case TerminalEvent::interior_min: return "interior_min";
        case TerminalEvent::boundary_hit: return "boundary_hit";
        case TerminalEvent::time_exhausted: return "time_exhausted";
    }
    return "unknown";
}

namespace {

// Unit-field integrator shared by the interior, boundary and generic flows.
struct Integrator {
    std::function<Vec(const Vec&)> field;
    std::function<Vec(const Vec&)> project;
    // Hessian scale of f along the flow near a critical point; the distance to
    // the critical point is approximately |grad| / scale.
    std::function<double(const Vec&)> hessian_scale;
    const ObataFunction* f = nullptr;
    const Region* region = nullptr;
    double sign = 1.0;
    bool reproject = true;

    Vec unit(const Vec& y) const {
        Vec g = field(y);
        const double norm = g.norm();
        if (!(norm > 1e-300)) throw NumericalError("unit field vanishes inside a step");
        return (sign / norm) * g;
    }

    Vec rk4(const Vec& y, double h) const {
        const Vec k1 = unit(y);
        const Vec k2 = unit(y + 0.5 * h * k1);
        const Vec k3 = unit(y + 0.5 * h * k2);
        const Vec k4 = unit(y + h * k3);
        return y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    }

    Vec step(const Vec& y, double h) const { return reproject ? project(rk4(y, h)) : Vec(rk4(y, h)); }

    bool toward_critical(const Vec& y) const { return sign * f->value(y) > 0; }
};

FlowTrace run(const Integrator& in, const Vec& start, const FlowOptions& opt,
              const std::function<Vec(const Vec&)>& snap) {
    require(opt.dt > 0 && opt.dt <= 1e-2, "dt must lie in (0, 1e-2]");
    require(opt.t_max > 0, "t_max must be positive");
    FlowTrace trace;
    Vec y = start;
    double t = 0;
    trace.samples.push_back({0.0, y, in.f->value(y)});
    const long max_steps = static_cast<long>(opt.t_max / opt.dt) * 4 + 10000;
    for (long step = 0;; ++step) {
        if (step > max_steps) throw NumericalError("flow did not terminate");
        const double gn = in.field(y).norm();
        const bool detect = static_cast<bool>(in.hessian_scale) && in.toward_critical(y);
        double dist = 0;
        if (detect) {
            const double scale = in.hessian_scale(y);
            dist = scale > 0 ? gn / scale : INFINITY;
            if (gn < kCriticalThreshold) {
                trace.terminal_event =
                    in.sign > 0 ? TerminalEvent::interior_max : TerminalEvent::interior_min;
                trace.terminal_time = t + dist;
                const Vec end = snap ? snap(y) : y;
                trace.samples.push_back({trace.terminal_time, end, in.f->value(end)});
                break;
            }
        }
        if (t >= opt.t_max - 1e-15) {
            trace.terminal_event = TerminalEvent::time_exhausted;
            trace.terminal_time = t;
            break;
        }
        double h = std::min(opt.dt, opt.t_max - t);
        if (detect) h = std::min(h, 0.5 * dist);
        const Vec raw = in.rk4(y, h);
        trace.defects.renorm = std::max(trace.defects.renorm, std::abs(1.0 - raw.norm()));
        Vec next = in.reproject ? in.project(raw) : raw;
        if (in.region && in.region->residual(next) > 0) {
            double lo = 0, hi = h;
            while (hi - lo > kEventTimeTol) {
                const double mid = 0.5 * (lo + hi);
                (in.region->residual(in.step(y, mid)) > 0 ? hi : lo) = mid;
            }
            const Vec end = in.region->project_to_boundary(in.step(y, hi));
            trace.terminal_event = TerminalEvent::boundary_hit;
            trace.terminal_time = t + hi;
            trace.samples.push_back({trace.terminal_time, end, in.f->value(end)});
            break;
        }
        t += h;
        y = std::move(next);
        trace.samples.push_back({t, y, in.f->value(y)});
    }
    return trace;
}

Vec sphere_project(const Vec& y) { return y / y.norm(); }

double fill_conservation(FlowTrace& trace, const ObataFunction& f) {
    trace.defects.conservation = conservation_defect(trace, f);
    trace.defects.geodesic = trace.samples.size() >= 3 ? geodesic_defect(trace) : 0.0;
    return trace.defects.conservation;
}

void check_start(const ObataFunction& f, const SpherePoint& start) {
    require(start.ambient_dim() == f.coefficients().size(), "start point and function dimensions differ");
}

}  // namespace

FlowTrace normalized_gradient_flow(const ObataFunction& f, const SpherePoint& start, const Region* region,
                                   const FlowOptions& options) {
    check_start(f, start);
    const Vec& y0 = start.coords();
    require(f.gradient(y0).norm() > 1e-8, "flow starts at a critical point");
    if (region) require(region->contains(y0), "flow starts outside the region");
    Integrator in;
    in.field = [&f](const Vec& y) { return f.gradient(y); };
    in.project = sphere_project;
    in.hessian_scale = [&f](const Vec& y) { return std::abs(f.value(y)); };
    in.f = &f;
    in.region = region;
    in.sign = options.direction == FlowDirection::forward ? 1.0 : -1.0;
    in.reproject = options.reproject;
    const double s = in.sign;
    FlowTrace trace = run(in, y0, options, [&f, s](const Vec&) { return Vec(s * f.coefficients() / f.amplitude()); });
    fill_conservation(trace, f);
    return trace;
}

FlowTrace unit_field_flow(const std::function<Vec(const Vec&)>& field, const ObataFunction& f,
                          const SpherePoint& start, const FlowOptions& options) {
    check_start(f, start);
    Integrator in;
    in.field = field;
    in.project = sphere_project;
    in.f = &f;
    in.sign = options.direction == FlowDirection::forward ? 1.0 : -1.0;
    in.reproject = options.reproject;
    FlowTrace trace = run(in, start.coords(), options, nullptr);
    fill_conservation(trace, f);
    return trace;
}

TerminalEvent first_hit_classification(const ObataFunction& f, double a, const Region& region,
                                       const SpherePoint& start, double dt) {
    require(a > 0, "classification requires a > 0");
    const double v = f.value(start.coords());
    require(std::abs(v) > 1e-12, "f vanishes at the start point");
    FlowOptions opt;
    opt.dt = dt;
    opt.t_max = 2 * kPi;
    opt.direction = v > 0 ? FlowDirection::forward : FlowDirection::backward;
    return normalized_gradient_flow(f, start, &region, opt).terminal_event;
}

ZeroLevelReport zero_level_before_boundary(const ObataFunction& f, const Region& region, const SpherePoint& start,
                                           double dt) {
    require(f.value(start.coords()) > 0, "start point must have f > 0");
    FlowOptions opt;
    opt.dt = dt;
    opt.t_max = 2 * kPi;
    opt.direction = FlowDirection::backward;
    const FlowTrace trace = normalized_gradient_flow(f, start, &region, opt);
    ZeroLevelReport r;
    r.terminal_event = trace.terminal_event;
    r.terminal_time = trace.terminal_time;
    for (std::size_t i = 1; i < trace.samples.size(); ++i) {
        const auto& p = trace.samples[i - 1];
        const auto& q = trace.samples[i];
        if (q.f <= 0) {
            r.crossing_time = p.t + (q.t - p.t) * p.f / (p.f - q.f);
            r.crossed_before_boundary =
                trace.terminal_event == TerminalEvent::boundary_hit && r.crossing_time < trace.terminal_time;
            break;
        }
    }
    return r;
}

double geodesic_defect(const FlowTrace& trace) {
    const auto& s = trace.samples;
    if (s.size() < 3) throw ParameterError("geodesic defect needs at least three samples");
    double worst = 0;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        const double hm = s[i].t - s[i - 1].t;
        const double hp = s[i + 1].t - s[i].t;
        if (hm <= 0 || std::abs(hp - hm) > 1e-9 * std::max(hp, hm)) continue;
        const Vec& y = s[i].p;
        Vec acc = (s[i + 1].p - 2 * y + s[i - 1].p) / (hm * hm);
        Vec vel = s[i + 1].p - s[i - 1].p;
        acc -= acc.dot(y) / y.squaredNorm() * y;
        vel -= vel.dot(y) / y.squaredNorm() * y;
        if (vel.norm() > 0) {
            vel.normalize();
            acc -= acc.dot(vel) * vel;
        }
        worst = std::max(worst, acc.norm());
    }
    return worst;
}

double conservation_defect(const FlowTrace& trace, const ObataFunction& f) {
    const double L2 = f.amplitude() * f.amplitude();
    double worst = 0;
    for (const auto& s : trace.samples) {
        const double v = f.value(s.p);
        worst = std::max(worst, std::abs(f.gradient(s.p).squaredNorm() + v * v - L2));
    }
    return worst;
}

double interior_fit_residual(const FlowTrace& trace, const ObataFunction& f, FlowDirection direction) {
    require(!trace.samples.empty(), "empty trace");
    const double L = f.amplitude();
    const double alpha = std::asin(std::clamp(trace.samples.front().f / L, -1.0, 1.0));
    const double sign = direction == FlowDirection::forward ? 1.0 : -1.0;
    double worst = 0;
    for (const auto& s : trace.samples) worst = std::max(worst, std::abs(s.f - L * std::sin(alpha + sign * s.t)));
    return worst;
}

FlowTrace boundary_flow(const Region& region, const ObataFunction& f, double a, const SpherePoint& start,
                        double dt, FlowDirection direction, double t_max) {
    check_start(f, start);
    const Vec& y0 = start.coords();
    if (!region.on_boundary(y0)) throw BoundaryError("boundary flow must start on the boundary");
    require(boundary_gradient(region, f, y0).norm() > 1e-8, "boundary flow starts at a focal point");
    Integrator in;
    in.field = [&region, &f](const Vec& y) { return boundary_gradient(region, f, y); };
    in.project = [&region](const Vec& y) { return region.project_to_boundary(y); };
    const double k2 = 1 + a * a;
    in.hessian_scale = [&f, k2](const Vec& y) { return k2 * std::abs(f.value(y)); };
    in.f = &f;
    in.sign = direction == FlowDirection::forward ? 1.0 : -1.0;
    FlowOptions opt;
    opt.dt = dt;
    opt.t_max = t_max;
    opt.direction = direction;
    FlowTrace trace = run(in, y0, opt, nullptr);
    trace.defects.geodesic = trace.samples.size() >= 3 ? geodesic_defect(trace) : 0.0;
    return trace;
}

double boundary_fit_residual(const FlowTrace& trace, const ObataFunction& f, double a, FlowDirection direction) {
    require(!trace.samples.empty(), "empty trace");
    const double k = std::sqrt(1 + a * a);
    const double amp = f.amplitude() / k;
    const double beta = std::asin(std::clamp(trace.samples.front().f / amp, -1.0, 1.0));
    const double sign = direction == FlowDirection::forward ? 1.0 : -1.0;
    double worst = 0;
    for (const auto& s : trace.samples)
        worst = std::max(worst, std::abs(s.f - amp * std::sin(beta + sign * k * s.t)));
    return worst;
}

double boundary_period(const Region& region, const ObataFunction& f, double a, const SpherePoint& start,
                       double dt) {
    const FlowTrace fwd = boundary_flow(region, f, a, start, dt, FlowDirection::forward);
    const FlowTrace bwd = boundary_flow(region, f, a, start, dt, FlowDirection::backward);
    if (fwd.terminal_event != TerminalEvent::interior_max || bwd.terminal_event != TerminalEvent::interior_min)
        throw NumericalError("boundary flow line did not reach both focal points");
    return 2 * (fwd.terminal_time + bwd.terminal_time);
}

LoopSignature boundary_loop_signature(const Region& region, const ObataFunction& f, const SpherePoint& start,
                                      int sheets, double ds) {
    require(region.n() == 2, "loop signatures are defined for surfaces");
    require(sheets >= 1, "sheets must be positive");
    require(ds > 0 && ds <= 0.1, "ds must lie in (0, 0.1]");
    const Vec& y0 = start.coords();
    if (!region.on_boundary(y0)) throw BoundaryError("loop must start on the boundary");
    auto tangent = [&region](const Vec& y) -> Vec {
        const Eigen::Vector3d p = y.head<3>();
        const Eigen::Vector3d nu = region.normal_field(y).head<3>();
        return Vec(p.cross(nu));
    };
    Integrator in;
    in.field = tangent;
    in.project = [&region](const Vec& y) { return region.project_to_boundary(y); };
    in.f = &f;
    auto radial = [&](const Vec& y) { return (y - y0).dot(tangent(y)); };

    std::vector<double> values{f.value(y0)};
    Vec y = y0;
    double s = 0;
    int passes = 0;
    double prev = 0;
    const long max_steps = static_cast<long>(sheets * 2 * kPi / ds) * 2 + 1000;
    for (long step = 0; step < max_steps; ++step) {
        const Vec next = in.step(y, ds);
        const double r = radial(next);
        if (prev < 0 && r >= 0) {
            double lo = 0, hi = ds;
            while (hi - lo > kEventTimeTol) {
                const double mid = 0.5 * (lo + hi);
                (radial(in.step(y, mid)) >= 0 ? hi : lo) = mid;
            }
            if (++passes == sheets) {
                LoopSignature sig;
                sig.length = s + 0.5 * (lo + hi);
                const std::size_t m = values.size();
                for (std::size_t i = 0; i < m; ++i) {
                    const double v = values[i];
                    if (v > values[(i + m - 1) % m] && v >= values[(i + 1) % m]) ++sig.maxima;
                }
                return sig;
            }
        }
        prev = r;
        s += ds;
        y = next;
        values.push_back(f.value(y));
    }
    throw NumericalError("boundary walk did not close up");
}

}  // namespace obata
