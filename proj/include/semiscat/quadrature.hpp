#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <vector>

#include "semiscat/errors.hpp"

namespace semiscat {

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1] (symmetric half listed).
inline constexpr double gk_nodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

template <class F>
inline void gk15(const F& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b), hw = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    // Gauss-7 lives on the odd-index Kronrod nodes (incl. the center, j = 7).
    for (int j = 0; j < 8; ++j) {
        const double x = hw * gk_nodes[j];
        double fv = (j == 7) ? f(c) : f(c - x) + f(c + x);
        resk += gk_wk[j] * fv;
        if (j % 2 == 1) resg += gk_wg[j / 2] * fv;
    }
    result = resk * hw;
    err = std::abs(resk - resg) * hw;
}

}  // namespace detail

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    double max_panel_width = std::numeric_limits<double>::infinity();
    std::size_t max_panels = 200000;
};

/// Adaptive Gauss-Kronrod 7/15 on [a, b]. Real or complex via two passes is
/// left to the caller; this integrates a real-valued integrand.
template <class F>
inline double integrate_adaptive(const F& f, double a, double b, const QuadratureOptions& opt = {}) {
    if (a == b) return 0.0;
    struct Panel {
        double a, b, value, err;
        bool operator<(const Panel& o) const { return err < o.err; }
    };
    std::priority_queue<Panel> heap;
    double total = 0.0, total_err = 0.0;

    const double span = b - a;
    const std::size_t n0 = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(std::abs(span) / opt.max_panel_width)));
    for (std::size_t i = 0; i < n0; ++i) {
        const double pa = a + span * static_cast<double>(i) / static_cast<double>(n0);
        const double pb = a + span * static_cast<double>(i + 1) / static_cast<double>(n0);
        double v, e;
        detail::gk15(f, pa, pb, v, e);
        heap.push({pa, pb, v, e});
        total += v;
        total_err += e;
    }

    auto tol = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
    while (total_err > tol()) {
        if (heap.size() >= opt.max_panels)
            throw QuadratureFailure("adaptive quadrature: panel budget exhausted");
        Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (m == p.a || m == p.b)
            throw QuadratureFailure("adaptive quadrature: interval underflow");
        double v1, e1, v2, e2;
        detail::gk15(f, p.a, m, v1, e1);
        detail::gk15(f, m, p.b, v2, e2);
        total += v1 + v2 - p.value;
        total_err += e1 + e2 - p.err;
        heap.push({p.a, m, v1, e1});
        heap.push({m, p.b, v2, e2});
    }
    return total;
}

}  // namespace semiscat
