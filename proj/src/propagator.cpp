#include "driven/propagator.hpp"

#include <algorithm>
#include <cmath>

namespace driven {

namespace {

using Complex = std::complex<double>;

struct Pair {
    Complex alpha, beta;
};

// i alpha' = omega0 alpha - h(t) conj(beta), i beta' = omega0 beta + h(t) conj(alpha)
inline Pair derivative(double t, const Pair& y, const DriveParams& p) {
    const Complex i(0.0, 1.0);
    const double h = drive_field(t, p);
    return {-i * (p.omega0 * y.alpha - h * std::conj(y.beta)),
            -i * (p.omega0 * y.beta + h * std::conj(y.alpha))};
}

inline Pair rk4_step(double t, const Pair& y, double h, const DriveParams& p) {
    const Pair k1 = derivative(t, y, p);
    const Pair y2{y.alpha + 0.5 * h * k1.alpha, y.beta + 0.5 * h * k1.beta};
    const Pair k2 = derivative(t + 0.5 * h, y2, p);
    const Pair y3{y.alpha + 0.5 * h * k2.alpha, y.beta + 0.5 * h * k2.beta};
    const Pair k3 = derivative(t + 0.5 * h, y3, p);
    const Pair y4{y.alpha + h * k3.alpha, y.beta + h * k3.beta};
    const Pair k4 = derivative(t + h, y4, p);
    return {y.alpha + h / 6.0 * (k1.alpha + 2.0 * k2.alpha + 2.0 * k3.alpha + k4.alpha),
            y.beta + h / 6.0 * (k1.beta + 2.0 * k2.beta + 2.0 * k3.beta + k4.beta)};
}

constexpr double kAbortDefect = 1e-6;

}  // namespace

void ClosedPropagator::step(double h) {
    const Pair y{state_.alpha, state_.beta};
    const Pair next = rk4_step(state_.t, y, h, p_);
    state_.alpha = next.alpha;
    state_.beta = next.beta;
    state_.t += h;
}

PropagatorTrajectory propagate_closed(const DriveParams& p, double t_end, double dt,
                                      int store_stride) {
    p.validate();
    if (!(t_end > 0.0)) throw std::invalid_argument("propagate_closed: t_end must be > 0");
    if (!(dt > 0.0) || dt > 1e-2 * p.ts() * (1.0 + 1e-12))
        throw std::invalid_argument("propagate_closed: dt must lie in (0, 1e-2 ts]");
    if (store_stride < 1) throw std::invalid_argument("propagate_closed: store_stride must be >= 1");

    const auto n_steps = static_cast<long>(std::llround(t_end / dt));
    PropagatorTrajectory traj;
    traj.dt = dt;
    traj.stride = store_stride;
    traj.samples.reserve(static_cast<std::size_t>(n_steps / store_stride) + 2);

    Pair y{1.0, 0.0};
    auto store = [&](long k) {
        PropagatorEntries e{y.alpha, y.beta, static_cast<double>(k) * dt};
        if (e.unitarity_defect() > kAbortDefect) throw UnitarityError(e.t, e.unitarity_defect());
        traj.samples.push_back(e);
    };
    store(0);
    for (long k = 0; k < n_steps; ++k) {
        y = rk4_step(static_cast<double>(k) * dt, y, dt, p);
        if ((k + 1) % store_stride == 0 || k + 1 == n_steps) store(k + 1);
    }
    return traj;
}

PropagatorEntries adiabatic_propagator(double t, const DriveParams& p, const QuadratureConfig& quad) {
    p.validate();
    const QuadResult phase = integrate_adaptive(
        [&](double s) { return spectral_snapshot(s, p).E; }, 0.0, t, quad);
    const double phi = spectral_snapshot(t, p).phi;
    const Complex rot = std::polar(1.0, -phase.value);
    PropagatorEntries e;
    e.t = t;
    e.alpha = rot * std::cos(0.5 * phi);
    e.beta = -std::conj(rot) * std::sin(0.5 * phi);
    return e;
}

PropagatorTrajectory adiabatic_trajectory(const DriveParams& p, double t_end, double dt,
                                          int store_stride) {
    p.validate();
    if (!(t_end > 0.0) || !(dt > 0.0))
        throw std::invalid_argument("adiabatic_trajectory: t_end and dt must be > 0");
    const auto n_steps = static_cast<long>(std::llround(t_end / dt));
    std::vector<double> energies(static_cast<std::size_t>(n_steps) + 1);
    for (long k = 0; k <= n_steps; ++k)
        energies[static_cast<std::size_t>(k)] = spectral_snapshot(static_cast<double>(k) * dt, p).E;
    const std::vector<double> phase = cumulative_simpson(energies, dt);

    PropagatorTrajectory traj;
    traj.dt = dt;
    traj.stride = store_stride;
    for (long k = 0; k <= n_steps; ++k) {
        if (k % store_stride != 0 && k != n_steps) continue;
        const double t = static_cast<double>(k) * dt;
        const double phi = spectral_snapshot(t, p).phi;
        const Complex rot = std::polar(1.0, -phase[static_cast<std::size_t>(k)]);
        traj.samples.push_back({rot * std::cos(0.5 * phi), -std::conj(rot) * std::sin(0.5 * phi), t});
    }
    return traj;
}

PropagatorEntries strong_driving_expansion(double t, const DriveParams& p, StrongForm form) {
    p.validate();
    const double x = p.omega0 * t;
    const double lw = p.lambda_omega();
    const double ratio = p.lambda_Omega() / lw;
    const double envelope = ratio * (1.0 - std::cos(lw * x));
    const Complex i(0.0, 1.0);
    PropagatorEntries e;
    e.t = t;
    if (form == StrongForm::rwa) {
        e.alpha = std::polar(1.0, -x) * std::cos(envelope);
        e.beta = -i * std::polar(1.0, x) * std::sin(envelope);
    } else {
        e.alpha = std::polar(1.0, -x);
        e.beta = -i * std::polar(1.0, x) * envelope;
    }
    return e;
}

PropagatorEntries weak_driving_expansion(double t, const DriveParams& p, WeakVariant variant) {
    p.validate();
    const double x = p.omega0 * t;
    const double lw = p.lambda_omega();
    const double lo = p.lambda_Omega();
    const Complex i(0.0, 1.0);
    PropagatorEntries e;
    e.t = t;
    e.alpha = std::polar(1.0, -x);
    switch (variant) {
        case WeakVariant::general: {
            if (std::abs(lw - 2.0) < 1e-6)
                throw std::invalid_argument(
                    "weak_driving_expansion: general variant is singular at lambda_omega = 2");
            const Complex term1 = (std::polar(1.0, -(lw - 2.0) * x) - 1.0) / (lw - 2.0);
            const Complex term2 = (std::polar(1.0, (lw + 2.0) * x) - 1.0) / (lw + 2.0);
            e.beta = 0.5 * i * lo * std::polar(1.0, -x) * (term1 + term2);
            break;
        }
        case WeakVariant::low_frequency:
            e.beta = -0.5 * lo * std::sin(lw * x) * std::polar(1.0, x) +
                     0.25 * i * lo * lw * (std::polar(1.0, -x) - std::polar(1.0, x) * std::cos(lw * x));
            break;
        case WeakVariant::adiabatic:
            e.beta = -0.5 * lo * std::sin(lw * x) * std::polar(1.0, x);
            break;
    }
    return e;
}

std::vector<AdiabaticConvergencePoint> adiabatic_convergence_experiment(
    const DriveParams& rescaled, double tau_star, std::span<const double> couplings,
    double dt_over_ts) {
    rescaled.validate();
    std::vector<AdiabaticConvergencePoint> out;
    out.reserve(couplings.size());
    for (double g : couplings) {
        if (!(g > 0.0 && g <= 1.0))
            throw std::invalid_argument("adiabatic_convergence_experiment: couplings must be in (0, 1]");
        DriveParams pg = rescaled;
        pg.omega = rescaled.omega * g * g;  // tau = g^2 t with the rescaled frequency held fixed
        const double t_end = tau_star / (g * g) * rescaled.ts();
        const double dt = dt_over_ts * pg.ts();
        const auto n_steps = static_cast<long>(std::llround(t_end / dt));
        const int stride = static_cast<int>(std::max(1L, n_steps / 2000));
        const PropagatorTrajectory exact = propagate_closed(pg, t_end, dt, stride);
        const PropagatorTrajectory adiab = adiabatic_trajectory(pg, t_end, dt, stride);
        double worst = 0.0;
        for (std::size_t k = 0; k < exact.samples.size(); ++k)
            worst = std::max(worst, ops::max_abs(exact.samples[k].matrix() - adiab.samples[k].matrix()));
        out.push_back({g, worst});
    }
    return out;
}

}  // namespace driven
