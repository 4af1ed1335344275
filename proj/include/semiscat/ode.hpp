#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "semiscat/errors.hpp"

namespace semiscat {

/// Right-hand side of y' = f(t, y). Writes the derivative into dydt.
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

/// Scalar event function g(t, y); a sign change of g across an accepted step
/// is located by bisection on the dense output.
using OdeEvent = std::function<double(double t, std::span<const double> y)>;

/// Called after every accepted step (and after an event truncation).
using OdeObserver = std::function<void(double t, std::span<const double> y)>;

struct OdeOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    double min_step = 1e-15;      // below this the solver throws StepUnderflow
    double initial_step = 0.0;    // 0 -> choose automatically
    double event_tol = 1e-12;     // bisection width in t for event location
    // Optional state-dependent cap, checked at every step start (e.g. to keep
    // steps from vaulting over a thin event shell).
    std::function<double(double t, std::span<const double> y)> step_cap;
};

enum class OdeStatus { reached_end, event };

struct OdeResult {
    OdeStatus status = OdeStatus::reached_end;
    double t = 0.0;               // where integration actually stopped
    double defect = 0.0;          // accumulated embedded-pair error estimates
    std::size_t n_steps = 0;      // accepted steps
    std::size_t n_rejected = 0;
};

/// Adaptive Dormand-Prince 5(4) with dense output.
///
/// One instance holds the work arrays for a fixed dimension; integrate() may
/// be called repeatedly (the state vector is advanced in place). Integration
/// direction is the sign of (t_end - t0).
class DormandPrince5 {
  public:
    explicit DormandPrince5(std::size_t dim) : n_(dim) {
        for (auto* v : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &ytmp_, &ynew_, &yerr_,
                        &rcont1_, &rcont2_, &rcont3_, &rcont4_, &rcont5_, &yev_})
            v->assign(n_, 0.0);
    }

    std::size_t dim() const { return n_; }

    /// Advances y from t0 to t_end, or to the first root of `event` if given.
    /// On an event stop, y holds the state at the located event time.
    OdeResult integrate(const OdeRhs& rhs, double t0, double t_end, std::vector<double>& y,
                        const OdeOptions& opt, const OdeEvent& event = nullptr,
                        const OdeObserver& observer = nullptr) {
        opt_rel_ = opt.rel_tol;
        opt_abs_ = opt.abs_tol;
        OdeResult res;
        res.t = t0;
        if (t_end == t0) return res;
        const double dir = t_end > t0 ? 1.0 : -1.0;

        double t = t0;
        rhs(t, y, std::span<double>(k1_));  // FSAL seed
        double hstep = opt.initial_step != 0.0 ? std::abs(opt.initial_step)
                                               : guess_initial_step(rhs, t, y, dir, opt);
        double g_prev = event ? event(t, y) : 0.0;

        while (dir * (t_end - t) > 0.0) {
            hstep = std::min(hstep, opt.max_step);
            if (opt.step_cap) hstep = std::min(hstep, std::max(opt.step_cap(t, y), opt.min_step));
            const bool last = std::abs(t_end - t) <= hstep;
            if (last) hstep = std::abs(t_end - t);
            if (hstep < opt.min_step) {
                if (last) {  // sub-floor remainder: snap, the state is converged
                    t = t_end;
                    break;
                }
                throw StepUnderflow("ODE step underflow at t = " + std::to_string(t));
            }

            const double t_start = t;
            const double h = last ? (t_end - t) : dir * hstep;
            const double err = attempt_step(rhs, t, h, y);

            if (err <= 1.0) {
                prepare_dense(h, y);
                t = last ? t_end : t + h;  // snap the final step
                y = ynew_;
                std::swap(k1_, k7_);  // FSAL
                res.n_steps++;
                res.defect += err_abs_;

                if (event) {
                    const double g_now = event(t, y);
                    if (g_prev != 0.0 && g_now != 0.0 && std::signbit(g_prev) != std::signbit(g_now)) {
                        const double t_ev = locate_event(event, t_start, h, opt.event_tol);
                        dense_eval((t_ev - t_start) / h, yev_);
                        t = t_ev;
                        y = yev_;
                        rhs(t, y, std::span<double>(k1_));  // re-seed FSAL at the cut
                        res.t = t;
                        res.status = OdeStatus::event;
                        if (observer) observer(t, y);
                        return res;
                    }
                    g_prev = g_now;
                }
                if (observer) observer(t, y);

                double fac = safety_ * std::pow(err > 1e-30 ? err : 1e-30, -0.2);
                hstep *= std::clamp(fac, 0.2, 5.0);
            } else {
                res.n_rejected++;
                double fac = safety_ * std::pow(err, -0.2);
                hstep *= std::clamp(fac, 0.1, 0.9);
            }
        }
        res.t = t;
        return res;
    }

  private:
    std::size_t n_;
    std::vector<double> k1_, k2_, k3_, k4_, k5_, k6_, k7_;
    std::vector<double> ytmp_, ynew_, yerr_;
    std::vector<double> rcont1_, rcont2_, rcont3_, rcont4_, rcont5_, yev_;
    double err_abs_ = 0.0;
    static constexpr double safety_ = 0.9;

    // Dormand-Prince coefficients.
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                            d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                            d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    // Runs one trial step of size h from (t, y); fills ynew_, k2_..k7_, yerr_.
    // Returns the weighted error norm (accept iff <= 1).
    double attempt_step(const OdeRhs& rhs, double t, double h, const std::vector<double>& y) {
        auto stage = [&](double c, auto&&... terms) {
            for (std::size_t i = 0; i < n_; ++i)
                ytmp_[i] = y[i] + h * (... + (terms.first * (*terms.second)[i]));
            (void)c;
        };
        using P = std::pair<double, const std::vector<double>*>;

        stage(c2, P{a21, &k1_});
        rhs(t + c2 * h, ytmp_, std::span<double>(k2_));
        stage(c3, P{a31, &k1_}, P{a32, &k2_});
        rhs(t + c3 * h, ytmp_, std::span<double>(k3_));
        stage(c4, P{a41, &k1_}, P{a42, &k2_}, P{a43, &k3_});
        rhs(t + c4 * h, ytmp_, std::span<double>(k4_));
        stage(c5, P{a51, &k1_}, P{a52, &k2_}, P{a53, &k3_}, P{a54, &k4_});
        rhs(t + c5 * h, ytmp_, std::span<double>(k5_));
        stage(1.0, P{a61, &k1_}, P{a62, &k2_}, P{a63, &k3_}, P{a64, &k4_}, P{a65, &k5_});
        rhs(t + h, ytmp_, std::span<double>(k6_));
        for (std::size_t i = 0; i < n_; ++i)
            ynew_[i] = y[i] + h * (a71 * k1_[i] + a73 * k3_[i] + a74 * k4_[i] + a75 * k5_[i] +
                                   a76 * k6_[i]);
        rhs(t + h, ynew_, std::span<double>(k7_));

        double sum = 0.0, sum_abs = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            yerr_[i] = h * (e1 * k1_[i] + e3 * k3_[i] + e4 * k4_[i] + e5 * k5_[i] + e6 * k6_[i] +
                            e7 * k7_[i]);
            const double sc = opt_abs_ + opt_rel_ * std::max(std::abs(y[i]), std::abs(ynew_[i]));
            const double r = yerr_[i] / sc;
            sum += r * r;
            sum_abs += yerr_[i] * yerr_[i];
        }
        err_abs_ = std::sqrt(sum_abs / static_cast<double>(n_));
        return std::sqrt(sum / static_cast<double>(n_));
    }

    double opt_abs_ = 1e-12, opt_rel_ = 1e-12;  // set from OdeOptions on entry

    void prepare_dense(double h, const std::vector<double>& y) {
        for (std::size_t i = 0; i < n_; ++i) {
            const double ydiff = ynew_[i] - y[i];
            const double bspl = h * k1_[i] - ydiff;
            rcont1_[i] = y[i];
            rcont2_[i] = ydiff;
            rcont3_[i] = bspl;
            rcont4_[i] = ydiff - h * k7_[i] - bspl;
            rcont5_[i] = h * (d1 * k1_[i] + d3 * k3_[i] + d4 * k4_[i] + d5 * k5_[i] + d6 * k6_[i] +
                              d7 * k7_[i]);
        }
    }

    /// Evaluates the step interpolant at theta in [0,1] into out.
    void dense_eval(double theta, std::vector<double>& out) const {
        const double s = theta, s1 = 1.0 - theta;
        for (std::size_t i = 0; i < n_; ++i)
            out[i] = rcont1_[i] +
                     s * (rcont2_[i] + s1 * (rcont3_[i] + s * (rcont4_[i] + s1 * rcont5_[i])));
    }

    double locate_event(const OdeEvent& event, double t_lo, double h, double tol) {
        double lo = 0.0, hi = 1.0;
        dense_eval(lo, yev_);
        double g_lo = event(t_lo, yev_);
        for (int it = 0; it < 200 && std::abs(hi - lo) * std::abs(h) > tol; ++it) {
            const double mid = 0.5 * (lo + hi);
            dense_eval(mid, yev_);
            const double g_mid = event(t_lo + mid * h, yev_);
            if (g_mid == 0.0) { lo = hi = mid; break; }
            if (std::signbit(g_mid) == std::signbit(g_lo)) {
                lo = mid;
                g_lo = g_mid;
            } else {
                hi = mid;
            }
        }
        return t_lo + hi * h;  // land on the far side of the root
    }

    double guess_initial_step(const OdeRhs& rhs, double t, const std::vector<double>& y, double dir,
                              const OdeOptions& opt) {
        double ynorm = 0.0, fnorm = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            ynorm = std::max(ynorm, std::abs(y[i]));
            fnorm = std::max(fnorm, std::abs(k1_[i]));
        }
        double h0 = (fnorm > 1e-30) ? 0.01 * (ynorm + opt.abs_tol) / fnorm : 1e-6;
        h0 = std::min(h0, opt.max_step);
        (void)dir;
        return std::max(h0, opt.min_step * 10.0);
    }
};

}  // namespace semiscat
