#include "driven/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace driven {

namespace {

// 15-point Kronrod nodes/weights with the embedded 7-point Gauss rule, on [-1, 1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a, b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double kronrod = kWgk[7] * f(center);
    double gauss = kWg[3] * f(center);
    for (int i = 0; i < 7; ++i) {
        const double dx = half * kXgk[i];
        const double fsum = f(center - dx) + f(center + dx);
        kronrod += kWgk[i] * fsum;
        if (i % 2 == 1) gauss += kWg[i / 2] * fsum;
    }
    kronrod *= half;
    gauss *= half;
    return Panel{a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, double abs_tol, int max_panels) {
    QuadResult result;
    if (a == b) {
        result.converged = true;
        return result;
    }
    std::priority_queue<Panel> panels;
    panels.push(evaluate_panel(f, a, b));
    double total_value = panels.top().value;
    double total_error = panels.top().error;
    int count = 1;
    while (count < max_panels) {
        const double target = std::max(abs_tol, rel_tol * std::abs(total_value));
        if (total_error <= target) break;
        Panel worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {  // interval exhausted at double precision
            panels.push(Panel{worst.a, worst.b, worst.value, 0.0});
            continue;
        }
        const Panel left = evaluate_panel(f, worst.a, mid);
        const Panel right = evaluate_panel(f, mid, worst.b);
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;
    }
    result.value = total_value;
    result.error = total_error;
    result.panels = count;
    result.converged = total_error <= std::max(abs_tol, rel_tol * std::abs(total_value));
    return result;
}

QuadResult principal_value(const std::function<double(double)>& g, double pole, double a, double b,
                           const QuadratureConfig& cfg) {
    if (!(a < pole && pole < b)) throw std::invalid_argument("principal_value: pole must lie inside (a, b)");
    const double delta = std::min({cfg.pv_epsilon, pole - a, b - pole});
    auto folded = [&](double u) { return (g(pole + u) - g(pole - u)) / u; };
    auto outer = [&](double w) { return g(w) / (w - pole); };

    QuadResult total;
    total.converged = true;
    const int budget = cfg.quad_max_panels;
    auto accumulate = [&](const QuadResult& piece) {
        total.value += piece.value;
        total.error += piece.error;
        total.panels += piece.panels;
        total.converged = total.converged && piece.converged;
    };
    accumulate(integrate_adaptive(folded, 0.0, delta, cfg.quad_rel_tol, 0.0, budget));
    if (pole - delta > a)
        accumulate(integrate_adaptive(outer, a, pole - delta, cfg.quad_rel_tol, 0.0, budget));
    if (pole + delta < b)
        accumulate(integrate_adaptive(outer, pole + delta, b, cfg.quad_rel_tol, 0.0, budget));
    return total;
}

std::vector<double> cumulative_simpson(const std::vector<double>& f, double dt) {
    std::vector<double> out(f.size(), 0.0);
    if (f.size() < 2) return out;
    out[1] = 0.5 * dt * (f[0] + f[1]);  // no quadratic available yet
    if (f.size() > 2) out[1] = dt / 12.0 * (5.0 * f[0] + 8.0 * f[1] - f[2]);
    for (std::size_t k = 2; k < f.size(); ++k) {
        if (k % 2 == 0) {
            out[k] = out[k - 2] + dt / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
        } else {
            out[k] = out[k - 1] + dt / 12.0 * (-f[k - 2] + 8.0 * f[k - 1] + 5.0 * f[k]);
        }
    }
    return out;
}

}  // namespace driven
