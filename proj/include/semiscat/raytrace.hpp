#pragma once

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "semiscat/errors.hpp"
#include "semiscat/ode.hpp"
#include "semiscat/potential.hpp"

namespace semiscat {

/// Point in T*R^n, split into the normal pair (x, xi) and tangential (y, eta).
struct PhasePoint {
    double x = 0.0;
    std::vector<double> y;
    double xi = 0.0;
    std::vector<double> eta;
};

inline PhasePoint make_point(double x, std::vector<double> y, double xi, std::vector<double> eta) {
    PhasePoint p;
    p.x = x;
    p.y = std::move(y);
    p.xi = xi;
    p.eta = std::move(eta);
    return p;
}

/// Smooth metric block k^{ij}(x, y) on the tangential factor, row-major m*m.
/// Derivative callables are optional; 4th-order central differences fill in.
struct MetricField {
    int m = 1;
    std::function<void(double, std::span<const double>, std::span<double>)> eval;
    std::function<void(double, std::span<const double>, std::span<double>)> dx;
    std::function<void(double, std::span<const double>, int, std::span<double>)> dy;

    void eval_dx(double x, std::span<const double> y, std::span<double> out) const {
        if (dx) {
            dx(x, y, out);
            return;
        }
        const double d = 1e-5;
        const std::size_t n = static_cast<std::size_t>(m) * m;
        std::vector<double> kp(n), km(n), kp2(n), km2(n);
        eval(x + d, y, kp);
        eval(x - d, y, km);
        eval(x + 2 * d, y, kp2);
        eval(x - 2 * d, y, km2);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = (-kp2[i] + 8.0 * kp[i] - 8.0 * km[i] + km2[i]) / (12.0 * d);
    }

    void eval_dy(double x, std::span<const double> y, int i, std::span<double> out) const {
        if (dy) {
            dy(x, y, i, out);
            return;
        }
        const double d = 1e-5;
        const std::size_t n = static_cast<std::size_t>(m) * m;
        std::vector<double> yy(y.begin(), y.end());
        std::vector<double> kp(n), km(n), kp2(n), km2(n);
        yy[i] = y[i] + d;
        eval(x, yy, kp);
        yy[i] = y[i] - d;
        eval(x, yy, km);
        yy[i] = y[i] + 2 * d;
        eval(x, yy, kp2);
        yy[i] = y[i] - 2 * d;
        eval(x, yy, km2);
        for (std::size_t j = 0; j < n; ++j)
            out[j] = (-kp2[j] + 8.0 * kp[j] - 8.0 * km[j] + km2[j]) / (12.0 * d);
    }
};

inline MetricField identity_metric(int m) {
    MetricField f;
    f.m = m;
    f.eval = [m](double, std::span<const double>, std::span<double> k) {
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) k[i * m + j] = (i == j) ? 1.0 : 0.0;
    };
    f.dx = [m](double, std::span<const double>, std::span<double> k) {
        std::fill(k.begin(), k.begin() + m * m, 0.0);
    };
    f.dy = [m](double, std::span<const double>, int, std::span<double> k) {
        std::fill(k.begin(), k.begin() + m * m, 0.0);
    };
    return f;
}

/// Signed conormal profile w(x) along the normal coordinate: the tapered
/// barrier x_+^alpha or the two-sided well -c |x|^beta. `order` is the
/// conormal order at x = 0; it drives the reflected-strength increment, the
/// glancing policy, and the patch mesh grading.
struct NormalProfile {
    std::function<double(double)> value = [](double) { return 0.0; };
    std::function<double(double)> derivative = [](double) { return 0.0; };
    double order = std::numeric_limits<double>::infinity();
    bool two_sided = false;
    std::string label = "zero";

    bool derivative_defined_at_zero() const { return order > 1.0; }
};

inline NormalProfile zero_profile() { return {}; }

inline NormalProfile power_barrier_profile(const ConormalPotential1D& pot) {
    NormalProfile p;
    p.value = [pot](double x) { return eval_potential(pot, x); };
    p.derivative = [pot](double x) { return eval_potential_derivative(pot, x); };
    p.order = pot.alpha;
    p.two_sided = false;
    p.label = "barrier";
    return p;
}

inline NormalProfile two_sided_well_profile(double c, double beta) {
    NormalProfile p;
    p.value = [c, beta](double x) { return -c * std::pow(std::abs(x), beta); };
    p.derivative = [c, beta](double x) {
        if (x == 0.0) {
            if (beta <= 1.0) throw SingularDerivative("two-sided profile: w' undefined at 0");
            return 0.0;
        }
        return -c * beta * std::pow(std::abs(x), beta - 1.0) * (x > 0.0 ? 1.0 : -1.0);
    };
    p.order = beta;
    p.two_sided = true;
    p.label = "two_sided_well";
    return p;
}

/// p = xi^2 + k^{ij} eta_i eta_j + w(x) - E on T*R^dim. Setting energy = 0
/// recovers the convention with the energy folded into w.
struct HamiltonianSpec {
    int dim = 2;
    MetricField metric = identity_metric(1);
    NormalProfile profile;
    double energy = 1.0;
    std::string name = "custom";

    int m() const { return dim - 1; }
    double xi_min() const { return 1e-3 * std::sqrt(std::max(std::abs(energy), 1e-12)); }
};

namespace rt_detail {

inline double quadratic_form(std::span<const double> k, std::span<const double> v, int m) {
    double q = 0.0;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) q += k[i * m + j] * v[i] * v[j];
    return q;
}

}  // namespace rt_detail

inline double eval_p(const HamiltonianSpec& spec, const PhasePoint& pt) {
    const int m = spec.m();
    std::vector<double> k(static_cast<std::size_t>(m) * m);
    spec.metric.eval(pt.x, pt.y, k);
    return pt.xi * pt.xi + rt_detail::quadratic_form(k, pt.eta, m) + spec.profile.value(pt.x) -
           spec.energy;
}

/// Hamilton field (xdot, ydot.., xidot, etadot..) at pt. Throws
/// SingularDerivative on {x = 0} when the profile is kinked there.
inline std::vector<double> eval_hamilton_field(const HamiltonianSpec& spec, const PhasePoint& pt) {
    const int m = spec.m();
    const std::size_t mm = static_cast<std::size_t>(m) * m;
    std::vector<double> k(mm), dkx(mm), dky(mm);
    spec.metric.eval(pt.x, pt.y, k);
    spec.metric.eval_dx(pt.x, pt.y, dkx);

    std::vector<double> out(2 * spec.dim, 0.0);
    out[0] = 2.0 * pt.xi;
    for (int i = 0; i < m; ++i) {
        double yi = 0.0;
        for (int j = 0; j < m; ++j) yi += k[i * m + j] * pt.eta[j];
        out[1 + i] = 2.0 * yi;
    }
    out[1 + m] = -rt_detail::quadratic_form(dkx, pt.eta, m) - spec.profile.derivative(pt.x);
    for (int i = 0; i < m; ++i) {
        spec.metric.eval_dy(pt.x, pt.y, i, dky);
        out[2 + m + i] = -rt_detail::quadratic_form(dky, pt.eta, m);
    }
    return out;
}

enum class PointKind { elliptic, hyperbolic, glancing };

inline const char* to_string(PointKind k) {
    switch (k) {
        case PointKind::elliptic: return "elliptic";
        case PointKind::hyperbolic: return "hyperbolic";
        case PointKind::glancing: return "glancing";
    }
    return "?";
}

struct PointClass {
    PointKind kind = PointKind::glancing;
    double xi_plus = 0.0;  // positive root of xi^2 = -ptilde (hyperbolic only)
    double ptilde = 0.0;
};

/// Classifies the boundary point over (y, eta): ptilde = eta k(0,y) eta +
/// w(0) - E; elliptic / glancing / hyperbolic as ptilde >, =, < 0 within tol.
inline PointClass classify_boundary_point(const HamiltonianSpec& spec, std::span<const double> y,
                                          std::span<const double> eta, double tol = 1e-10) {
    const int m = spec.m();
    std::vector<double> k(static_cast<std::size_t>(m) * m);
    spec.metric.eval(0.0, y, k);
    PointClass c;
    c.ptilde = rt_detail::quadratic_form(k, eta, m) + spec.profile.value(0.0) - spec.energy;
    if (c.ptilde > tol) {
        c.kind = PointKind::elliptic;
    } else if (c.ptilde < -tol) {
        c.kind = PointKind::hyperbolic;
        c.xi_plus = std::sqrt(-c.ptilde);
    } else {
        c.kind = PointKind::glancing;
    }
    return c;
}

enum class SegmentStatus { completed, hit_interface, glancing_nonunique, step_underflow };

inline const char* to_string(SegmentStatus s) {
    switch (s) {
        case SegmentStatus::completed: return "completed";
        case SegmentStatus::hit_interface: return "hit_interface";
        case SegmentStatus::glancing_nonunique: return "glancing_nonunique";
        case SegmentStatus::step_underflow: return "step_underflow";
    }
    return "?";
}

/// A sampled arc of a bicharacteristic between interface interactions.
struct RaySegment {
    std::vector<double> s;
    std::vector<PhasePoint> points;
    SegmentStatus status = SegmentStatus::completed;

    const PhasePoint& front() const { return points.front(); }
    const PhasePoint& back() const { return points.back(); }
};

struct TraceOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double max_step = 0.02;
    double x_patch = 1e-3;    // Caratheodory patch half-width
    double class_tol = 1e-10;
    double p_tol = 1e-8;      // null-condition tolerance for seeds
};

namespace rt_detail {

inline void pack(const PhasePoint& pt, std::vector<double>& z) {
    const int m = static_cast<int>(pt.y.size());
    z.resize(2 * (m + 1));
    z[0] = pt.x;
    for (int i = 0; i < m; ++i) z[1 + i] = pt.y[i];
    z[1 + m] = pt.xi;
    for (int i = 0; i < m; ++i) z[2 + m + i] = pt.eta[i];
}

inline PhasePoint unpack(std::span<const double> z, int m) {
    PhasePoint pt;
    pt.x = z[0];
    pt.y.assign(z.begin() + 1, z.begin() + 1 + m);
    pt.xi = z[1 + m];
    pt.eta.assign(z.begin() + 2 + m, z.begin() + 2 + 2 * m);
    return pt;
}

/// |xi| from the conserved symbol: xi^2 = E - w(x) - eta k eta. Throws
/// TangentialIncidence if the root falls under the transversality floor.
inline double xi_from_energy(const HamiltonianSpec& spec, double x, std::span<const double> y,
                             std::span<const double> eta, std::vector<double>& kbuf) {
    const int m = spec.m();
    spec.metric.eval(x, y, kbuf);
    const double rad = spec.energy - spec.profile.value(x) - quadratic_form(kbuf, eta, m);
    const double floor = spec.xi_min();
    if (rad < floor * floor)
        throw TangentialIncidence("interface patch: |xi| fell below the transversality floor");
    return std::sqrt(rad);
}

/// One leg of the Caratheodory patch: (y, eta, s) driven by x from x_a to
/// x_b (one endpoint is 0), xi taken from the conserved symbol with fixed
/// sign. The normal mesh is graded into x = c u^G so the w-term is C^1 in u.
/// Appends post-step samples to collect when given.
inline void patch_leg(const HamiltonianSpec& spec, double x_a, double x_b, int xi_sign,
                      std::vector<double>& yz /* y.., eta.., s */, const TraceOptions& opt,
                      RaySegment* collect) {
    if (x_a == x_b) return;
    const int m = spec.m();
    const double c = (x_a == 0.0) ? x_b : x_a;
    const bool side_singular = spec.profile.order < 1.0 && (c > 0.0 || spec.profile.two_sided);
    const int G =
        side_singular ? static_cast<int>(std::ceil(1.0 / holder_exponent(spec.profile.order))) : 1;
    auto x_of_u = [&](double u) { return c * std::pow(u, G); };
    const double u_a = std::pow(x_a / c, 1.0 / G), u_b = std::pow(x_b / c, 1.0 / G);

    std::vector<double> kbuf(static_cast<std::size_t>(m) * m), dky(kbuf.size());
    auto rhs = [&](double u, std::span<const double> z, std::span<double> d) {
        const double x = x_of_u(u);
        const double dxdu = c * G * std::pow(u, G - 1);
        const std::span<const double> y = z.subspan(0, m);
        const std::span<const double> eta = z.subspan(m, m);
        const double xi = xi_sign * xi_from_energy(spec, x, y, eta, kbuf);
        for (int i = 0; i < m; ++i) {
            double yi = 0.0;
            for (int j = 0; j < m; ++j) yi += kbuf[i * m + j] * eta[j];
            d[i] = yi / xi * dxdu;
        }
        for (int i = 0; i < m; ++i) {
            spec.metric.eval_dy(x, y, i, dky);
            d[m + i] = -quadratic_form(dky, eta, m) / (2.0 * xi) * dxdu;
        }
        d[2 * m] = dxdu / (2.0 * xi);
    };

    DormandPrince5 stepper(2 * static_cast<std::size_t>(m) + 1);
    OdeOptions oo;
    oo.rel_tol = opt.rel_tol;
    oo.abs_tol = opt.abs_tol;
    oo.max_step = 0.1;  // in u; a leg spans at most one unit
    OdeObserver obs = nullptr;
    if (collect) {
        obs = [&](double u, std::span<const double> z) {
            PhasePoint pt;
            pt.x = x_of_u(u);
            pt.y.assign(z.begin(), z.begin() + m);
            pt.eta.assign(z.begin() + m, z.begin() + 2 * m);
            pt.xi = xi_sign * xi_from_energy(spec, pt.x, pt.y, pt.eta, kbuf);
            collect->s.push_back(z[2 * m]);
            collect->points.push_back(std::move(pt));
        };
    }
    stepper.integrate(rhs, u_a, u_b, yz, oo, nullptr, obs);
}

/// Runs patch legs from pt.x to x_to (through 0 when the sign changes),
/// with s accumulated into yz[2m]; returns the endpoint.
inline PhasePoint run_patch(const HamiltonianSpec& spec, const PhasePoint& pt, double x_to,
                            double s_start, const TraceOptions& opt, RaySegment* collect,
                            double* s_end) {
    const int m = spec.m();
    const int xi_sign = pt.xi > 0.0 ? +1 : -1;
    std::vector<double> yz(2 * m + 1);
    for (int i = 0; i < m; ++i) yz[i] = pt.y[i];
    for (int i = 0; i < m; ++i) yz[m + i] = pt.eta[i];
    yz[2 * m] = s_start;

    if (pt.x * x_to < 0.0) {
        patch_leg(spec, pt.x, 0.0, xi_sign, yz, opt, collect);
        patch_leg(spec, 0.0, x_to, xi_sign, yz, opt, collect);
    } else {
        patch_leg(spec, pt.x, x_to, xi_sign, yz, opt, collect);
    }

    PhasePoint out;
    out.x = x_to;
    out.y.assign(yz.begin(), yz.begin() + m);
    out.eta.assign(yz.begin() + m, yz.begin() + 2 * m);
    std::vector<double> kbuf(static_cast<std::size_t>(m) * m);
    out.xi = xi_sign * xi_from_energy(spec, x_to, out.y, out.eta, kbuf);
    if (s_end) *s_end = yz[2 * m];
    // The sub-floor final snap skips the observer; pin the exact endpoint.
    if (collect && (collect->points.empty() || collect->points.back().x != out.x)) {
        collect->s.push_back(yz[2 * m]);
        collect->points.push_back(out);
    }
    return out;
}

}  // namespace rt_detail

/// Carries a transversally incident point across (or off) the interface by
/// the x-parametrized Hamilton equations, |xi| supplied by the conserved
/// symbol. `pt` may sit anywhere in [-x_patch, x_patch]; the result sits at
/// direction * x_patch. Returns the endpoint and the elapsed flow time.
inline std::pair<PhasePoint, double> cross_interface_caratheodory(const HamiltonianSpec& spec,
                                                                  const PhasePoint& pt,
                                                                  int direction,
                                                                  const TraceOptions& opt = {}) {
    if (std::abs(pt.xi) < spec.xi_min())
        throw TangentialIncidence("cross_interface_caratheodory: |xi| below xi_min");
    if (std::abs(pt.x) > opt.x_patch * (1.0 + 1e-9))
        throw ConfigError("cross_interface_caratheodory: point outside the patch");
    double s_end = 0.0;
    PhasePoint out = rt_detail::run_patch(spec, pt, (direction >= 0 ? 1.0 : -1.0) * opt.x_patch,
                                          0.0, opt, nullptr, &s_end);
    return {out, s_end};
}

/// Integrates the bicharacteristic from pt0 over [s0, s1] (either direction).
/// Stops with hit_interface at a located x = 0 sign change; completes at s1.
/// A transverse start exactly on {x = 0} steps off through the patch.
inline RaySegment integrate_bicharacteristic(const HamiltonianSpec& spec, const PhasePoint& pt0,
                                             double s0, double s1, const TraceOptions& opt = {}) {
    if (std::abs(eval_p(spec, pt0)) > opt.p_tol * (1.0 + std::abs(spec.energy)))
        throw DomainError("integrate_bicharacteristic: seed is off the characteristic set");
    if (pt0.x == 0.0 && std::abs(pt0.xi) < spec.xi_min()) {
        if (spec.profile.order <= 2.0)
            throw SingularDerivative(
                "integrate_bicharacteristic: tangential start on the singular set");
    }

    const int m = spec.m();
    RaySegment seg;
    seg.s.push_back(s0);
    seg.points.push_back(pt0);
    double s = s0;
    PhasePoint cur = pt0;

    if (pt0.x == 0.0 && std::abs(pt0.xi) >= spec.xi_min()) {
        // Leave the interface along the motion direction via the patch.
        const double motion = (s1 >= s0 ? 1.0 : -1.0) * (pt0.xi > 0.0 ? 1.0 : -1.0);
        cur = rt_detail::run_patch(spec, pt0, motion * opt.x_patch, s0, opt, &seg, &s);
    }

    std::vector<double> z;
    rt_detail::pack(cur, z);

    const std::size_t mm = static_cast<std::size_t>(m) * m;
    std::vector<double> k(mm), dkx(mm), dky(mm);
    auto rhs = [&](double, std::span<const double> zz, std::span<double> d) {
        const double x = zz[0];
        const std::span<const double> y = zz.subspan(1, m);
        const double xi = zz[1 + m];
        const std::span<const double> eta = zz.subspan(2 + m, m);
        spec.metric.eval(x, y, k);
        spec.metric.eval_dx(x, y, dkx);
        d[0] = 2.0 * xi;
        for (int i = 0; i < m; ++i) {
            double yi = 0.0;
            for (int j = 0; j < m; ++j) yi += k[i * m + j] * eta[j];
            d[1 + i] = 2.0 * yi;
        }
        d[1 + m] = -rt_detail::quadratic_form(dkx, eta, m) - spec.profile.derivative(x);
        for (int i = 0; i < m; ++i) {
            spec.metric.eval_dy(x, y, i, dky);
            d[2 + m + i] = -rt_detail::quadratic_form(dky, eta, m);
        }
    };

    DormandPrince5 stepper(2 * static_cast<std::size_t>(spec.dim));
    OdeOptions oo;
    oo.rel_tol = opt.rel_tol;
    oo.abs_tol = opt.abs_tol;
    oo.max_step = opt.max_step;

    auto observer = [&](double t, std::span<const double> zz) {
        seg.s.push_back(t);
        seg.points.push_back(rt_detail::unpack(zz, m));
    };
    auto event = [](double, std::span<const double> zz) { return zz[0]; };

    try {
        OdeResult r = stepper.integrate(rhs, s, s1, z, oo, event, observer);
        if (r.status == OdeStatus::event) {
            seg.status = SegmentStatus::hit_interface;
            seg.points.back().x = 0.0;  // snap the located crossing
        } else {
            seg.status = SegmentStatus::completed;
        }
    } catch (const StepUnderflow&) {
        seg.status = SegmentStatus::step_underflow;
    }
    return seg;
}

enum class BranchKind { incident, transmitted, reflected, stuck };

inline const char* to_string(BranchKind k) {
    switch (k) {
        case BranchKind::incident: return "incident";
        case BranchKind::transmitted: return "transmitted";
        case BranchKind::reflected: return "reflected";
        case BranchKind::stuck: return "stuck";
    }
    return "?";
}

struct BranchChild {
    PhasePoint point;   // at x = 0, sharing (y, eta) with the crossing
    BranchKind kind = BranchKind::transmitted;
    double strength = 0.0;
};

/// Hyperbolic splitting: the transmitted continuation keeps xi and strength;
/// the reflected one flips xi and is weaker by alpha orders.
inline std::vector<BranchChild> branch_gbb(const HamiltonianSpec& spec, const PhasePoint& crossing,
                                           double parent_strength, double alpha) {
    const PointClass cls = classify_boundary_point(spec, crossing.y, crossing.eta);
    if (cls.kind != PointKind::hyperbolic)
        throw NotHyperbolic("branch_gbb: crossing point is not hyperbolic");
    BranchChild trans;
    trans.point = crossing;
    trans.kind = BranchKind::transmitted;
    trans.strength = parent_strength;
    BranchChild refl;
    refl.point = crossing;
    refl.point.xi = -crossing.xi;
    refl.kind = BranchKind::reflected;
    refl.strength = parent_strength + alpha;
    return {trans, refl};
}

struct GBBNode {
    int id = 0;
    int parent = -1;  // -1 at the root
    BranchKind kind = BranchKind::incident;
    double strength = 0.0;
    int reflect_count = 0;
    RaySegment segment;
};

struct GBBTree {
    std::string spec_name;
    double alpha = 0.0;  // strength increment per reflection (profile order)
    double energy = 0.0;
    std::vector<GBBNode> nodes;
};

/// Breadth-first GBB expansion: each branch is integrated to the interface,
/// carried across the Caratheodory patch, split at hyperbolic points, and
/// pruned by depth and strength. Glancing arrivals terminate (non-unique
/// continuation) unless the profile order exceeds 2, in which case the
/// unique C^1 ray continues through tangency unbranched. Per-branch failures
/// land in node statuses; the tree itself always completes.
inline GBBTree trace_gbb_tree(const HamiltonianSpec& spec, const PhasePoint& pt0, double s_max,
                              int max_depth, double strength_cap, const TraceOptions& opt = {}) {
    if (std::abs(eval_p(spec, pt0)) > opt.p_tol * (1.0 + std::abs(spec.energy)))
        throw DomainError("trace_gbb_tree: seed is off the characteristic set");

    GBBTree tree;
    tree.spec_name = spec.name;
    tree.alpha = spec.profile.order;
    tree.energy = spec.energy;

    struct Pending {
        PhasePoint start;
        double s_start = 0.0;
        BranchKind kind = BranchKind::incident;
        double strength = 0.0;
        int reflect_count = 0;
        int depth = 0;
        int parent = -1;
        bool at_interface = false;  // start at x = 0, step off through the patch
    };
    std::deque<Pending> queue;
    queue.push_back({pt0, 0.0, BranchKind::incident, 0.0, 0, 0, -1, pt0.x == 0.0});

    const double xi_min = spec.xi_min();
    // A smooth Hamiltonian has no interface: single unbroken trajectories.
    const bool has_interface = std::isfinite(spec.profile.order);

    while (!queue.empty()) {
        Pending br = std::move(queue.front());
        queue.pop_front();

        GBBNode node;
        node.id = static_cast<int>(tree.nodes.size());
        node.parent = br.parent;
        node.kind = br.kind;
        node.strength = br.strength;
        node.reflect_count = br.reflect_count;
        RaySegment& seg = node.segment;
        seg.s.push_back(br.s_start);
        seg.points.push_back(br.start);

        double s = br.s_start;
        PhasePoint cur = br.start;
        bool terminal = false;

        try {
            if (br.at_interface && has_interface) {
                if (std::abs(cur.xi) >= xi_min) {
                    const double dir = cur.xi > 0.0 ? 1.0 : -1.0;
                    cur = rt_detail::run_patch(spec, cur, dir * opt.x_patch, s, opt, &seg, &s);
                } else {
                    const PointClass cls =
                        classify_boundary_point(spec, cur.y, cur.eta, opt.class_tol);
                    if (!(cls.kind == PointKind::hyperbolic && cls.xi_plus >= xi_min) &&
                        spec.profile.order <= 2.0) {
                        seg.status = SegmentStatus::glancing_nonunique;
                        terminal = true;
                    }
                    // order > 2: the C^1 field continues straight through.
                }
            }

            while (!terminal && s < s_max) {
                // March in s until the ray dips into the interface patch.
                std::vector<double> z;
                rt_detail::pack(cur, z);
                const int m = spec.m();
                const std::size_t mm = static_cast<std::size_t>(m) * m;
                std::vector<double> k(mm), dkx(mm), dky(mm);
                auto rhs = [&](double, std::span<const double> zz, std::span<double> d) {
                    const double x = zz[0];
                    const std::span<const double> y = zz.subspan(1, m);
                    const double xi = zz[1 + m];
                    const std::span<const double> eta = zz.subspan(2 + m, m);
                    spec.metric.eval(x, y, k);
                    spec.metric.eval_dx(x, y, dkx);
                    d[0] = 2.0 * xi;
                    for (int i = 0; i < m; ++i) {
                        double yi = 0.0;
                        for (int j = 0; j < m; ++j) yi += k[i * m + j] * eta[j];
                        d[1 + i] = 2.0 * yi;
                    }
                    d[1 + m] =
                        -rt_detail::quadratic_form(dkx, eta, m) - spec.profile.derivative(x);
                    for (int i = 0; i < m; ++i) {
                        spec.metric.eval_dy(x, y, i, dky);
                        d[2 + m + i] = -rt_detail::quadratic_form(dky, eta, m);
                    }
                };
                DormandPrince5 stepper(2 * static_cast<std::size_t>(spec.dim));
                OdeOptions oo;
                oo.rel_tol = opt.rel_tol;
                oo.abs_tol = opt.abs_tol;
                oo.max_step = opt.max_step;
                if (has_interface) {
                    // Keep steps from vaulting over the patch shell: bound the
                    // normal displacement per step by a fraction of the
                    // distance to the shell (and of the shell width inside).
                    oo.step_cap = [&, m](double, std::span<const double> zz) {
                        const double x = zz[0], xi = zz[1 + m];
                        const double dist = std::max(std::abs(x) - opt.x_patch, 0.0);
                        const double D = std::max(dist / 3.0, opt.x_patch / 3.0);
                        const double speed = 2.0 * std::abs(xi);
                        double cap = std::numeric_limits<double>::infinity();
                        if (speed > 0.0) cap = std::min(cap, D / speed);
                        double xidot = 0.0;
                        if (x != 0.0 || spec.profile.derivative_defined_at_zero()) {
                            spec.metric.eval_dx(x, zz.subspan(1, m), dkx);
                            xidot = -rt_detail::quadratic_form(dkx, zz.subspan(2 + m, m), m) -
                                    spec.profile.derivative(x);
                        }
                        if (xidot != 0.0)
                            cap = std::min(cap, std::sqrt(D / (2.0 * std::abs(xidot))));
                        return cap;
                    };
                }
                auto observer = [&](double t, std::span<const double> zz) {
                    seg.s.push_back(t);
                    seg.points.push_back(rt_detail::unpack(zz, m));
                };
                OdeEvent event = nullptr;
                if (has_interface)
                    event = [&](double, std::span<const double> zz) {
                        return std::abs(zz[0]) - opt.x_patch;
                    };
                OdeResult r = stepper.integrate(rhs, s, s_max, z, oo, event, observer);
                s = r.t;
                cur = rt_detail::unpack(z, m);

                if (r.status != OdeStatus::event) {
                    seg.status = SegmentStatus::completed;
                    terminal = true;
                    break;
                }
                const bool approaching = cur.x * cur.xi < 0.0;
                if (!approaching) continue;  // leaving the patch zone: resume

                const PointClass cls = classify_boundary_point(spec, cur.y, cur.eta, opt.class_tol);
                if (cls.kind == PointKind::hyperbolic && cls.xi_plus >= xi_min &&
                    std::abs(cur.xi) >= xi_min) {
                    cur = rt_detail::run_patch(spec, cur, 0.0, s, opt, &seg, &s);
                    seg.status = SegmentStatus::hit_interface;
                    terminal = true;

                    if (br.depth + 1 <= max_depth) {
                        for (BranchChild& ch :
                             branch_gbb(spec, cur, br.strength, spec.profile.order)) {
                            const int rc =
                                br.reflect_count + (ch.kind == BranchKind::reflected ? 1 : 0);
                            // Strength from the root path, not accumulated, so
                            // the ledger identity holds exactly in floating point.
                            const double strength = spec.profile.order * rc;
                            if (strength > strength_cap) continue;
                            Pending p;
                            p.start = ch.point;
                            p.s_start = s;
                            p.kind = ch.kind;
                            p.strength = strength;
                            p.reflect_count = rc;
                            p.depth = br.depth + 1;
                            p.parent = node.id;
                            p.at_interface = true;
                            queue.push_back(std::move(p));
                        }
                    }
                } else if (cls.kind != PointKind::elliptic && spec.profile.order <= 2.0) {
                    seg.status = SegmentStatus::glancing_nonunique;
                    terminal = true;
                }
                // Elliptic (turns before reaching 0) or order > 2 (unique C^1
                // continuation through tangency): keep integrating in s.
            }
            if (!terminal) seg.status = SegmentStatus::completed;
        } catch (const StepUnderflow&) {
            seg.status = SegmentStatus::step_underflow;
        } catch (const TangentialIncidence&) {
            seg.status = SegmentStatus::glancing_nonunique;
        } catch (const SingularDerivative&) {
            seg.status = SegmentStatus::glancing_nonunique;
        }

        tree.nodes.push_back(std::move(node));
    }
    return tree;
}

/// The delayed-detachment family of Remark-type non-uniqueness: sticks to the
/// glancing set until s0, then detaches as x = (s-s0)_+^4, xi = 2 (s-s0)_+^3
/// with y = 2s, eta = 1. s0 = +infinity gives the sticking solution.
inline PhasePoint remark36_family(double s0, double s) {
    const double t = (std::isinf(s0)) ? -1.0 : s - s0;
    PhasePoint pt;
    if (t > 0.0) {
        pt.x = t * t * t * t;
        pt.xi = 2.0 * t * t * t;
    } else {
        pt.x = 0.0;
        pt.xi = 0.0;
    }
    pt.y = {2.0 * s};
    pt.eta = {1.0};
    return pt;
}

/// Analytic s-derivative of the family (for residual checks).
inline std::vector<double> remark36_family_derivative(double s0, double s) {
    const double t = (std::isinf(s0)) ? -1.0 : s - s0;
    const double dx = t > 0.0 ? 4.0 * t * t * t : 0.0;
    const double dxi = t > 0.0 ? 6.0 * t * t : 0.0;
    return {dx, 2.0, dxi, 0.0};
}

// Built-in demo specs.

/// (i) Flat metric, tapered x_+^alpha barrier at E = 1: transverse splitting.
inline HamiltonianSpec demo_barrier(double alpha = 0.5) {
    HamiltonianSpec s;
    s.dim = 2;
    s.metric = identity_metric(1);
    s.profile = power_barrier_profile(ConormalPotential1D(alpha, 0.5, 1.0));
    s.energy = 1.0;
    s.name = "barrier";
    return s;
}

/// (ii) Two-sided well w = -4 |x|^{3/2}, flat metric, E = 1: the glancing
/// point carries a one-parameter family of sticking/detaching rays.
inline HamiltonianSpec demo_remark36() {
    HamiltonianSpec s;
    s.dim = 2;
    s.metric = identity_metric(1);
    s.profile = two_sided_well_profile(4.0, 1.5);
    s.energy = 1.0;
    s.name = "remark36";
    return s;
}

/// (iii) k^11 = 1 + x, w = x_+^alpha with alpha > 2: a ray tangent to the
/// interface curves back; the C^1 flow continues uniquely through tangency.
inline HamiltonianSpec demo_glancing_detach(double alpha = 3.0) {
    HamiltonianSpec s;
    s.dim = 2;
    MetricField f;
    f.m = 1;
    f.eval = [](double x, std::span<const double>, std::span<double> k) { k[0] = 1.0 + x; };
    f.dx = [](double, std::span<const double>, std::span<double> k) { k[0] = 1.0; };
    f.dy = [](double, std::span<const double>, int, std::span<double> k) { k[0] = 0.0; };
    s.metric = f;
    s.profile = power_barrier_profile(ConormalPotential1D(alpha, 0.5, 1.0));
    s.energy = 1.0;
    s.name = "glancing-detach";
    return s;
}

inline HamiltonianSpec demo_spec(const std::string& name, double alpha = 0.5) {
    if (name == "barrier") return demo_barrier(alpha);
    if (name == "remark36") return demo_remark36();
    if (name == "glancing-detach") return demo_glancing_detach(alpha > 2.0 ? alpha : 3.0);
    throw ConfigError("unknown demo spec: " + name);
}

}  // namespace semiscat
