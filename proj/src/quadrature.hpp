#ifndef PTBEC_QUADRATURE_HPP
#define PTBEC_QUADRATURE_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "types.hpp"

namespace ptbec::quad {

// Gauss(7)-Kronrod(15) rule, QUADPACK dqk15 constants.
inline constexpr double kronrod_nodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kronrod_weights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double gauss_weights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct GkResult {
    cplx value{0.0, 0.0};
    double error = 0.0;
};

// One G7-K15 panel on [a,b]; f may be vector-valued via repeated calls, here scalar complex.
template <typename F>
GkResult gk15_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    cplx kron = kronrod_weights[7] * f(c);
    cplx gauss = gauss_weights[3] * f(c);
    for (int i = 0; i < 7; ++i) {
        const cplx fl = f(c - h * kronrod_nodes[i]);
        const cplx fr = f(c + h * kronrod_nodes[i]);
        kron += kronrod_weights[i] * (fl + fr);
        if (i % 2 == 1) gauss += gauss_weights[i / 2] * (fl + fr);
    }
    GkResult r;
    r.value = h * kron;
    r.error = std::abs(h * (kron - gauss));
    return r;
}

struct AdaptiveOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-300;   // pure relative control by default
    int max_panels = 2000;
};

// Globally adaptive bisection driven by the largest panel error.
// Throws quadrature_error (carrying the achieved tolerance) on non-convergence.
template <typename F>
cplx integrate_adaptive(F&& f, double a, double b, const AdaptiveOptions& opt = {}) {
    struct Panel {
        double a, b, error;
        cplx value;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    std::priority_queue<Panel> heap;
    GkResult r0 = gk15_panel(f, a, b);
    heap.push({a, b, r0.error, r0.value});
    cplx total = r0.value;
    double total_err = r0.error;
    int panels = 1;
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
        if (panels >= opt.max_panels) {
            const double achieved = total_err / std::max(std::abs(total), 1e-300);
            throw quadrature_error("adaptive quadrature did not reach tolerance", achieved);
        }
        Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        GkResult rl = gk15_panel(f, p.a, m);
        GkResult rr = gk15_panel(f, m, p.b);
        total += rl.value + rr.value - p.value;
        total_err += rl.error + rr.error - p.error;
        heap.push({p.a, m, rl.error, rl.value});
        heap.push({m, p.b, rr.error, rr.value});
        ++panels;
    }
    return total;
}

// Adaptive rule for a small fixed-size bundle of integrands sharing the same
// evaluation points (the error is controlled on the max-norm over components).
template <int N, typename F>
std::array<cplx, N> integrate_adaptive_vec(F&& f, double a, double b,
                                           const AdaptiveOptions& opt = {}) {
    using Vec = std::array<cplx, N>;
    struct Panel {
        double a, b, error;
        Vec value;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    auto panel_rule = [&f](double lo, double hi, Vec& out) -> double {
        const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
        Vec kron{}, gauss{};
        Vec fc = f(c);
        for (int k = 0; k < N; ++k) {
            kron[k] = kronrod_weights[7] * fc[k];
            gauss[k] = gauss_weights[3] * fc[k];
        }
        for (int i = 0; i < 7; ++i) {
            Vec fl = f(c - h * kronrod_nodes[i]);
            Vec fr = f(c + h * kronrod_nodes[i]);
            for (int k = 0; k < N; ++k) {
                kron[k] += kronrod_weights[i] * (fl[k] + fr[k]);
                if (i % 2 == 1) gauss[k] += gauss_weights[i / 2] * (fl[k] + fr[k]);
            }
        }
        double err = 0.0;
        for (int k = 0; k < N; ++k) {
            out[k] = h * kron[k];
            err = std::max(err, std::abs(h * (kron[k] - gauss[k])));
        }
        return err;
    };

    std::priority_queue<Panel> heap;
    Vec total{};
    Panel first{a, b, 0.0, {}};
    first.error = panel_rule(a, b, first.value);
    total = first.value;
    double total_err = first.error;
    heap.push(first);
    int panels = 1;
    auto scale = [&total]() {
        double s = 0.0;
        for (const auto& v : total) s = std::max(s, std::abs(v));
        return s;
    };
    while (total_err > std::max(opt.abs_tol, opt.rel_tol * scale())) {
        if (panels >= opt.max_panels) {
            const double achieved = total_err / std::max(scale(), 1e-300);
            throw quadrature_error("adaptive quadrature did not reach tolerance", achieved);
        }
        Panel p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        Panel pl{p.a, m, 0.0, {}}, pr{m, p.b, 0.0, {}};
        pl.error = panel_rule(p.a, m, pl.value);
        pr.error = panel_rule(m, p.b, pr.value);
        for (int k = 0; k < N; ++k) total[k] += pl.value[k] + pr.value[k] - p.value[k];
        total_err += pl.error + pr.error - p.error;
        heap.push(pl);
        heap.push(pr);
        ++panels;
    }
    return total;
}

// Gauss-Legendre nodes/weights on [-1,1] by Newton iteration on P_n.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.resize(n);
    w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double t = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = t;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (t * p1 - p0) / (t * t - 1.0);
            const double dt = p1 / dp;
            t -= dt;
            if (std::abs(dt) < 1e-15) break;
        }
        x[i] = -t;
        x[n - 1 - i] = t;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
}

}  // namespace ptbec::quad

#endif
