#include "driven/master_equation.hpp"

#include <algorithm>
#include <cmath>

namespace driven {

namespace {

using Complex = std::complex<double>;
using ops::Matrix2;

// (|alpha|^2 - |beta|^2) sigma_z - 2 alpha beta sigma_+ - 2 conj(alpha) conj(beta) sigma_-,
// i.e. U_S sigma_z U_S^dag.
Matrix2 conjugated_sigma_z(const PropagatorEntries& u) {
    Matrix2 m;
    const double diag = std::norm(u.alpha) - std::norm(u.beta);
    m << diag, -2.0 * u.alpha * u.beta, -2.0 * std::conj(u.alpha * u.beta), -diag;
    return m;
}

void check_timestamp(double t, const PropagatorEntries& u) {
    if (std::abs(u.t - t) > 1e-9 * std::max(1.0, std::abs(t)))
        throw std::invalid_argument("jump_set_tdme: propagator entries carry a different timestamp");
}

}  // namespace

JumpSet jump_set_tdme(double t, const PropagatorEntries& u, const DriveParams& p,
                      const BathSpec& b, double S_t) {
    check_timestamp(t, u);
    const SpectralSnapshot s = spectral_snapshot(t, p);
    const double sin_phi = std::sin(s.phi);
    const double cos_phi = std::cos(s.phi);

    JumpSet js;
    js.t = t;
    js.flavor = Flavor::tdme;
    js.rates = rates_at_gap(s.E, b);
    js.rates.t = t;

    const Matrix2 k = conjugated_sigma_z(u);
    js.L0 = sin_phi * k;
    Matrix2 lp;
    lp << u.alpha * std::conj(u.beta), u.alpha * u.alpha, -std::conj(u.beta) * std::conj(u.beta),
        -u.alpha * std::conj(u.beta);
    js.Lplus = cos_phi * lp;
    js.Lminus = js.Lplus.adjoint();
    js.H_LS = 0.5 * S_t * cos_phi * cos_phi * k;
    return js;
}

JumpSet jump_set_adme(double t, const DriveParams& p, const BathSpec& b, double S_t) {
    const SpectralSnapshot s = spectral_snapshot(t, p);
    const double sin_phi = std::sin(s.phi);
    const double cos_phi = std::cos(s.phi);
    const double sin_half = std::sin(0.5 * s.phi);
    const double cos_half = std::cos(0.5 * s.phi);

    JumpSet js;
    js.t = t;
    js.flavor = Flavor::adme;
    js.rates = rates_at_gap(s.E, b);
    js.rates.t = t;

    const Matrix2 direction = cos_phi * ops::sigma_z() + sin_phi * ops::sigma_x();  // H_S / E
    js.L0 = sin_phi * direction;
    js.Lplus = cos_phi * (-0.5 * sin_phi * ops::sigma_z() + cos_half * cos_half * ops::sigma_plus() -
                          sin_half * sin_half * ops::sigma_minus());
    js.Lminus = js.Lplus.adjoint();
    js.H_LS = 0.5 * S_t * cos_phi * cos_phi * direction;
    return js;
}

JumpSet jump_set_strong(double t, const DriveParams& p, const BathSpec& b, double S_t) {
    const SpectralSnapshot s = spectral_snapshot(t, p);
    const double sin_phi = std::sin(s.phi);
    const double cos_phi = std::cos(s.phi);
    const double x = p.omega0 * t;
    const double envelope =
        2.0 * (p.lambda_Omega() / p.lambda_omega()) * (1.0 - std::cos(p.lambda_omega() * x));
    const Complex i(0.0, 1.0);

    JumpSet js;
    js.t = t;
    js.flavor = Flavor::strong_approx;
    js.rates = rates_at_gap(s.E, b);
    js.rates.t = t;

    const Matrix2 corrected = ops::sigma_z() - envelope * ops::sigma_y();
    js.L0 = sin_phi * corrected;
    js.Lplus = cos_phi * (0.5 * i * envelope * ops::sigma_z() + ops::sigma_plus());
    js.Lminus = js.Lplus.adjoint();
    js.H_LS = 0.5 * S_t * cos_phi * cos_phi * corrected;
    return js;
}

JumpSet jump_set_weak(double t, const DriveParams& p, const BathSpec& b, WeakVariant variant,
                      double S_t) {
    const SpectralSnapshot s = spectral_snapshot(t, p);
    const double cos_phi = std::cos(s.phi);
    const double x = p.omega0 * t;
    const double lw = p.lambda_omega();
    const double lo = p.lambda_Omega();
    const Complex i(0.0, 1.0);

    JumpSet js;
    js.t = t;
    js.flavor = Flavor::weak_approx;
    js.rates = rates_at_gap(s.E, b);
    js.rates.t = t;

    js.L0 = lo * std::sin(lw * x) * ops::sigma_z();
    Complex zcoef;
    Complex prefactor(1.0, 0.0);
    switch (variant) {
        case WeakVariant::general: {
            if (std::abs(lw - 2.0) < 1e-6)
                throw std::invalid_argument("jump_set_weak: general variant is singular at lambda_omega = 2");
            const Complex t1 = (std::polar(1.0, (2.0 - lw) * x) - 1.0) / (lw - 2.0);
            const Complex t2 = (std::polar(1.0, (lw + 2.0) * x) - 1.0) / (lw + 2.0);
            zcoef = -0.5 * i * lo * (t1 + t2);
            prefactor = std::polar(1.0, -2.0 * x);
            break;
        }
        case WeakVariant::low_frequency:
            zcoef = -0.5 * lo *
                    (std::sin(lw * x) +
                     0.5 * i * lw * (1.0 - std::polar(1.0, -2.0 * x) * std::cos(lw * x)));
            break;
        case WeakVariant::adiabatic:
            zcoef = -0.5 * lo * std::sin(lw * x);
            break;
    }
    js.Lplus = prefactor * (zcoef * ops::sigma_z() + ops::sigma_plus());
    js.Lminus = js.Lplus.adjoint();
    js.H_LS = 0.5 * S_t * cos_phi * cos_phi * ops::sigma_z();
    return js;
}

JumpSet jump_set_interaction(double t, const DriveParams& p, const BathSpec& b, double S_t) {
    const SpectralSnapshot s = spectral_snapshot(t, p);
    const double sin_phi = std::sin(s.phi);
    const double cos_phi = std::cos(s.phi);

    JumpSet js;
    js.t = t;
    js.flavor = Flavor::interaction;
    js.rates = rates_at_gap(s.E, b);
    js.rates.t = t;
    js.L0 = sin_phi * ops::sigma_z();
    js.Lplus = cos_phi * ops::sigma_plus();
    js.Lminus = cos_phi * ops::sigma_minus();
    js.H_LS = 0.5 * S_t * cos_phi * cos_phi * ops::sigma_z();
    return js;
}

ops::Matrix2 generator_apply(const ops::Matrix2& rho, const JumpSet& js, double t,
                             const DriveParams& p, const EvolutionConfig& cfg) {
    const Complex i(0.0, 1.0);
    if (cfg.solver == Solver::unitary) return -i * ops::commutator(hamiltonian(t, p), rho);

    Matrix2 h = Matrix2::Zero();
    if (cfg.picture == Picture::schroedinger) h = hamiltonian(t, p);
    if (cfg.lamb_shift) h += js.H_LS;

    Matrix2 rhs = -i * ops::commutator(h, rho);
    rhs += js.rates.gamma0 * ops::dissipator(js.L0, rho);
    rhs += js.rates.gamma_plus * ops::dissipator(js.Lplus, rho);
    rhs += js.rates.gamma_minus * ops::dissipator(js.Lminus, rho);
    return rhs;
}

namespace {

constexpr double kPositivityTol = 1e-8;

struct StageJumpSets {
    JumpSet at_start, at_half, at_end;
};

}  // namespace

Trajectory evolve(const DensityMatrix& rho0, const DriveParams& p, const BathSpec& b,
                  const EvolutionConfig& cfg, const QuadratureConfig& quad) {
    p.validate();
    cfg.validate();
    if (cfg.solver != Solver::unitary) b.validate();
    if (cfg.picture == Picture::interaction && cfg.solver != Solver::tdme)
        throw std::invalid_argument("evolve: the interaction picture is defined for the tdme solver");

    const bool needs_bath = cfg.solver != Solver::unitary;
    const bool needs_propagator = cfg.solver == Solver::tdme && cfg.picture == Picture::schroedinger;

    std::optional<LambShiftTable> table;
    if (needs_bath && cfg.lamb_shift) table.emplace(LambShiftTable::for_drive(p, b, quad));
    auto S_at = [&](double t) { return table ? (*table)(spectral_snapshot(t, p).E) : 0.0; };

    ClosedPropagator prop(p);
    auto stage_sets = [&](double t, double h) -> StageJumpSets {
        StageJumpSets sets;
        switch (cfg.solver) {
            case Solver::tdme:
                if (cfg.picture == Picture::schroedinger) {
                    const PropagatorEntries u0 = prop.state();
                    prop.step(0.5 * h);
                    const PropagatorEntries u_half = prop.state();
                    prop.step(0.5 * h);
                    const PropagatorEntries u_end = prop.state();
                    sets.at_start = jump_set_tdme(t, u0, p, b, S_at(t));
                    sets.at_half = jump_set_tdme(t + 0.5 * h, u_half, p, b, S_at(t + 0.5 * h));
                    sets.at_end = jump_set_tdme(t + h, u_end, p, b, S_at(t + h));
                } else {
                    sets.at_start = jump_set_interaction(t, p, b, S_at(t));
                    sets.at_half = jump_set_interaction(t + 0.5 * h, p, b, S_at(t + 0.5 * h));
                    sets.at_end = jump_set_interaction(t + h, p, b, S_at(t + h));
                }
                break;
            case Solver::adme:
                sets.at_start = jump_set_adme(t, p, b, S_at(t));
                sets.at_half = jump_set_adme(t + 0.5 * h, p, b, S_at(t + 0.5 * h));
                sets.at_end = jump_set_adme(t + h, p, b, S_at(t + h));
                break;
            case Solver::unitary:
                break;
        }
        return sets;
    };

    const double h = cfg.dt;
    const auto n_steps = static_cast<long>(std::llround(cfg.t_end / h));

    Trajectory traj;
    Matrix2 rho = rho0.matrix();
    auto store = [&](long k) {
        const double t = static_cast<double>(k) * h;
        TrajectorySample sample;
        sample.t = t;
        sample.rho = rho;
        sample.obs = cfg.picture == Picture::interaction ? observables(rho, 0.0, p)
                                                         : observables(rho, t, p);
        if (needs_propagator) sample.propagator = prop.state();
        const double drift = std::abs(rho.trace() - Complex(1.0, 0.0));
        const double min_eig = ops::min_eigenvalue(rho);
        traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
        traj.min_eigenvalue = std::min(traj.min_eigenvalue, min_eig);
        if (min_eig < -kPositivityTol) throw PositivityError(t, min_eig);
        traj.samples.push_back(std::move(sample));
    };

    store(0);
    for (long k = 0; k < n_steps; ++k) {
        const double t = static_cast<double>(k) * h;
        const StageJumpSets sets = stage_sets(t, h);
        const Matrix2 k1 = generator_apply(rho, sets.at_start, t, p, cfg);
        const Matrix2 k2 = generator_apply(rho + 0.5 * h * k1, sets.at_half, t + 0.5 * h, p, cfg);
        const Matrix2 k3 = generator_apply(rho + 0.5 * h * k2, sets.at_half, t + 0.5 * h, p, cfg);
        const Matrix2 k4 = generator_apply(rho + h * k3, sets.at_end, t + h, p, cfg);
        rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if ((k + 1) % cfg.store_stride == 0 || k + 1 == n_steps) store(k + 1);
    }
    return traj;
}

std::vector<BlochInteraction> analytic_interaction_solution(double c_z0, std::complex<double> c_plus0,
                                                            const DriveParams& p, const BathSpec& b,
                                                            const EvolutionConfig& cfg,
                                                            const QuadratureConfig& quad) {
    p.validate();
    b.validate();
    cfg.validate();
    if (std::abs(c_z0) > 1.0 + 1e-12 || c_z0 * c_z0 + std::norm(c_plus0) > 1.0 + 1e-12)
        throw std::invalid_argument("analytic_interaction_solution: initial Bloch data outside the ball");

    const double h = cfg.dt;
    const auto n_steps = static_cast<long>(std::llround(cfg.t_end / h));
    const auto n = static_cast<std::size_t>(n_steps) + 1;

    std::optional<LambShiftTable> table;
    if (cfg.lamb_shift) table.emplace(LambShiftTable::for_drive(p, b, quad));

    std::vector<double> relax(n), pump(n), lamb_phase(n), dephase(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) * h;
        const SpectralSnapshot s = spectral_snapshot(t, p);
        const RateTriple r = rates_at_gap(s.E, b);
        const double cos2 = std::cos(s.phi) * std::cos(s.phi);
        relax[k] = (r.gamma_plus + r.gamma_minus) * cos2;
        pump[k] = (r.gamma_plus - r.gamma_minus) * cos2;
        lamb_phase[k] = table ? (*table)(s.E) * cos2 : 0.0;
        dephase[k] = std::sin(s.phi) * std::sin(s.phi);
    }
    const std::vector<double> zeta = cumulative_simpson(relax, h);
    const std::vector<double> theta = cumulative_simpson(lamb_phase, h);
    const std::vector<double> sigma = cumulative_simpson(dephase, h);
    std::vector<double> driven_kernel(n);
    for (std::size_t k = 0; k < n; ++k) driven_kernel[k] = pump[k] * std::exp(zeta[k]);
    const std::vector<double> driven = cumulative_simpson(driven_kernel, h);

    const double gamma0 = rates_at_gap(p.omega0, b).gamma0;  // constant in time
    std::vector<BlochInteraction> out;
    out.reserve(n / static_cast<std::size_t>(cfg.store_stride) + 2);
    for (std::size_t k = 0; k < n; ++k) {
        if (k % static_cast<std::size_t>(cfg.store_stride) != 0 && k + 1 != n) continue;
        BlochInteraction s;
        s.t = static_cast<double>(k) * h;
        s.c_z = c_z0 * std::exp(-zeta[k]) + std::exp(-zeta[k]) * driven[k];
        s.c_plus = c_plus0 * std::polar(1.0, -theta[k]) *
                   std::exp(-0.5 * zeta[k] - 2.0 * gamma0 * sigma[k]);
        out.push_back(s);
    }
    return out;
}

LambShiftComparison lamb_shift_ab_test(const DensityMatrix& rho0, const DriveParams& p,
                                       const BathSpec& b, const EvolutionConfig& cfg,
                                       const QuadratureConfig& quad) {
    if (cfg.solver != Solver::tdme)
        throw std::invalid_argument("lamb_shift_ab_test: requires the tdme solver");
    if (cfg.picture != Picture::schroedinger)
        throw std::invalid_argument("lamb_shift_ab_test: requires the Schroedinger picture");

    EvolutionConfig on = cfg;
    on.lamb_shift = true;
    EvolutionConfig off = cfg;
    off.lamb_shift = false;

    LambShiftComparison cmp;
    cmp.with_lamb = evolve(rho0, p, b, on, quad);
    cmp.without_lamb = evolve(rho0, p, b, off, quad);

    const LambShiftTable table = LambShiftTable::for_drive(p, b, quad);
    cmp.sigma_x_shift.reserve(cmp.with_lamb.samples.size());
    cmp.shifted_gap.reserve(cmp.with_lamb.samples.size());
    for (std::size_t k = 0; k < cmp.with_lamb.samples.size(); ++k) {
        const auto& sample = cmp.with_lamb.samples[k];
        const double shift = sample.obs.sx - cmp.without_lamb.samples[k].obs.sx;
        cmp.sigma_x_shift.push_back(shift);
        cmp.max_shift = std::max(cmp.max_shift, std::abs(shift));
        const double S_t = table(spectral_snapshot(sample.t, p).E);
        const JumpSet js = jump_set_tdme(sample.t, *sample.propagator, p, b, S_t);
        const auto [lo, hi] = ops::hermitian_eigenvalues(hamiltonian(sample.t, p) + js.H_LS);
        cmp.shifted_gap.push_back(hi - lo);
    }
    return cmp;
}

}  // namespace driven
