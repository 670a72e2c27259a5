#ifndef MJT_ODE_HPP
#define MJT_ODE_HPP

#include <cmath>
#include <functional>
#include <vector>

#include "mjt/errors.hpp"
#include "mjt/linalg.hpp"

namespace mjt {

enum class OdeStatus { ok, left_domain, step_underflow };

struct OdeResult {
    std::vector<double> t;
    std::vector<Vec> y;
    OdeStatus status = OdeStatus::ok;
    double exit_param = 0;  // set when status == left_domain
};

struct OdeOptions {
    double max_step = 1e30;
    double initial_step = 0;                          // 0 -> auto
    double step_floor_rel = 1e-14;                    // relative to span
    std::function<bool(const Vec&)> accept;           // domain guard on the state
};

// Dormand-Prince RK5(4) with PI step-size control. Accepted steps form the
// output grid. If the domain guard rejects a trial state, the step is cut
// until the exit is localized; the partial result is returned with
// status=left_domain and exit_param at the last accepted node.
inline OdeResult integrate_rk45(const std::function<Vec(double, const Vec&)>& rhs, Vec y0,
                                double t0, double t1, double tol, OdeOptions opts = {}) {
    static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    const double dir = (t1 >= t0) ? 1.0 : -1.0;
    const double span = std::fabs(t1 - t0);
    const double rtol = tol;
    const double atol = tol * 1e-2;
    const double hfloor = std::fmax(span * opts.step_floor_rel, 1e-300);

    OdeResult out;
    out.t.push_back(t0);
    out.y.push_back(y0);
    if (span == 0) return out;

    const std::size_t n = y0.size();
    double t = t0;
    Vec y = std::move(y0);
    Vec k1 = rhs(t, y);

    double h = opts.initial_step > 0 ? opts.initial_step : span / 100.0;
    h = std::fmin(h, opts.max_step);
    double err_prev = 1.0;

    auto scaled_err = [&](const Vec& e, const Vec& ya, const Vec& yb) {
        double s = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = atol + rtol * std::fmax(std::fabs(ya[i]), std::fabs(yb[i]));
            const double q = e[i] / sc;
            s += q * q;
        }
        return std::sqrt(s / n);
    };

    while (dir * (t1 - t) > 0) {
        h = std::fmin(h, std::fabs(t1 - t));
        if (h < hfloor) {
            out.status = OdeStatus::step_underflow;
            out.exit_param = t;
            return out;
        }
        const double hs = dir * h;

        Vec y2 = y; axpy(hs * a21, k1, y2);
        Vec k2 = rhs(t + c2 * hs, y2);
        Vec y3 = y; axpy(hs * a31, k1, y3); axpy(hs * a32, k2, y3);
        Vec k3 = rhs(t + c3 * hs, y3);
        Vec y4 = y; axpy(hs * a41, k1, y4); axpy(hs * a42, k2, y4); axpy(hs * a43, k3, y4);
        Vec k4 = rhs(t + c4 * hs, y4);
        Vec y5 = y; axpy(hs * a51, k1, y5); axpy(hs * a52, k2, y5); axpy(hs * a53, k3, y5);
        axpy(hs * a54, k4, y5);
        Vec k5 = rhs(t + c5 * hs, y5);
        Vec y6 = y; axpy(hs * a61, k1, y6); axpy(hs * a62, k2, y6); axpy(hs * a63, k3, y6);
        axpy(hs * a64, k4, y6); axpy(hs * a65, k5, y6);
        Vec k6 = rhs(t + hs, y6);
        Vec ynew = y; axpy(hs * b1, k1, ynew); axpy(hs * b3, k3, ynew); axpy(hs * b4, k4, ynew);
        axpy(hs * b5, k5, ynew); axpy(hs * b6, k6, ynew);
        Vec k7 = rhs(t + hs, ynew);
        Vec e(n, 0.0);
        axpy(hs * e1, k1, e); axpy(hs * e3, k3, e); axpy(hs * e4, k4, e);
        axpy(hs * e5, k5, e); axpy(hs * e6, k6, e); axpy(hs * e7, k7, e);

        const double err = scaled_err(e, y, ynew);
        if (err <= 1.0) {
            if (opts.accept && !opts.accept(ynew)) {
                // localize the boundary by shrinking; once the step is at the
                // floor we stop at the last interior node.
                if (h <= 4 * hfloor) {
                    out.status = OdeStatus::left_domain;
                    out.exit_param = t;
                    return out;
                }
                h *= 0.25;
                continue;
            }
            t += hs;
            y = std::move(ynew);
            k1 = std::move(k7);  // FSAL
            out.t.push_back(t);
            out.y.push_back(y);
            // PI controller (order 5/4)
            const double fac =
                0.9 * std::pow(err > 0 ? err : 1e-10, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
            h = std::fmin(h * std::fmin(5.0, std::fmax(0.2, fac)), opts.max_step);
            err_prev = err > 0 ? err : 1e-10;
        } else {
            h *= std::fmax(0.2, 0.9 * std::pow(err, -0.25));
        }
    }
    return out;
}

}  // namespace mjt

#endif
