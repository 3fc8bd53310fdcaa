// qubit.hpp — Driven two-level system: Hamiltonian, spectral data, states, observables

#pragma once

#include <cmath>
#include <stdexcept>

#include "driven/ops.hpp"

namespace driven {

// H_S(t) = omega0 sigma_z + Omega sin(omega t) sigma_x, all frequencies in units with hbar = 1.
struct DriveParams {
    double omega0{1.0};  // level splitting
    double Omega{0.0};   // Rabi frequency (drive amplitude)
    double omega{1.0};   // drive frequency

    double lambda_Omega() const { return Omega / omega0; }
    double lambda_omega() const { return omega / omega0; }
    double lambda() const { return lambda_Omega() * lambda_omega(); }
    double ts() const { return 1.0 / omega0; }

    void validate() const {
        if (!(omega0 > 0.0)) throw std::invalid_argument("DriveParams: omega0 must be > 0");
        if (!(Omega >= 0.0)) throw std::invalid_argument("DriveParams: Omega must be >= 0");
        if (!(omega > 0.0)) throw std::invalid_argument("DriveParams: omega must be > 0");
    }
};

// Instantaneous eigendata of H_S(t): E(t), gap = 2E, mixing angle phi with tan(phi) = h(t)/omega0.
struct SpectralSnapshot {
    double t{0.0};
    double E{0.0};
    double gap{0.0};
    double phi{0.0};
};

inline double drive_field(double t, const DriveParams& p) { return p.Omega * std::sin(p.omega * t); }

inline ops::Matrix2 hamiltonian(double t, const DriveParams& p) {
    return p.omega0 * ops::sigma_z() + drive_field(t, p) * ops::sigma_x();
}

inline SpectralSnapshot spectral_snapshot(double t, const DriveParams& p) {
    const double h = drive_field(t, p);
    SpectralSnapshot s;
    s.t = t;
    s.E = std::hypot(p.omega0, h);
    s.gap = 2.0 * s.E;
    // two-argument arctangent keeps the branch stable near sin(omega t) = 0
    s.phi = std::atan2(h, p.omega0);
    return s;
}

// |e_t> = (cos(phi/2), sin(phi/2)), |g_t> = (-sin(phi/2), cos(phi/2))
inline ops::Vector2 excited_state(double phi) {
    return ops::Vector2(std::cos(0.5 * phi), std::sin(0.5 * phi));
}

inline ops::Vector2 ground_state(double phi) {
    return ops::Vector2(-std::sin(0.5 * phi), std::cos(0.5 * phi));
}

// Validated 2x2 density matrix.
class DensityMatrix {
public:
    static constexpr double hermiticity_tol = 1e-12;
    static constexpr double trace_tol = 1e-10;
    static constexpr double positivity_tol = 1e-8;

    explicit DensityMatrix(const ops::Matrix2& m) : rho_(m) { revalidate(); }

    const ops::Matrix2& matrix() const { return rho_; }

    void revalidate() const {
        if (ops::max_abs(rho_ - rho_.adjoint()) >= hermiticity_tol)
            throw std::invalid_argument("DensityMatrix: not Hermitian");
        if (std::abs(rho_.trace() - ops::Complex(1.0, 0.0)) >= trace_tol)
            throw std::invalid_argument("DensityMatrix: trace != 1");
        if (ops::min_eigenvalue(rho_) < -positivity_tol)
            throw std::invalid_argument("DensityMatrix: negative eigenvalue");
    }

    // Gibbs state of H_S(0) = omega0 sigma_z at temperature T_S (basis |e_0>, |g_0>).
    static DensityMatrix thermal(double T_S, const DriveParams& p) {
        if (!(T_S > 0.0)) throw std::invalid_argument("DensityMatrix::thermal: T_S must be > 0");
        const double x = p.omega0 / T_S;
        const double z = std::exp(-x) + std::exp(x);
        ops::Matrix2 m;
        m << std::exp(-x) / z, 0.0, 0.0, std::exp(x) / z;
        return DensityMatrix(m);
    }

    // (|g_0> + |e_0>)/sqrt(2)
    static DensityMatrix coherent_superposition() {
        ops::Matrix2 m;
        m << 0.5, 0.5, 0.5, 0.5;
        return DensityMatrix(m);
    }

    static DensityMatrix maximally_mixed() { return DensityMatrix(0.5 * ops::identity()); }

    static DensityMatrix from_bloch(double nx, double ny, double nz) {
        const ops::Matrix2 m = 0.5 * (ops::identity() + nx * ops::sigma_x() +
                                      ny * ops::sigma_y() + nz * ops::sigma_z());
        return DensityMatrix(m);
    }

private:
    ops::Matrix2 rho_;
};

struct Observables {
    double p_excited{0.0};   // population of the instantaneous excited state
    double coherence{0.0};   // |<e_t| rho |g_t>|
    double sx{0.0}, sy{0.0}, sz{0.0};
    double purity{0.0};
};

inline Observables observables(const ops::Matrix2& rho, double t, const DriveParams& p) {
    const SpectralSnapshot s = spectral_snapshot(t, p);
    const ops::Vector2 e = excited_state(s.phi);
    const ops::Vector2 g = ground_state(s.phi);
    Observables o;
    o.p_excited = (e.adjoint() * rho * e)(0, 0).real();
    o.coherence = std::abs((e.adjoint() * rho * g)(0, 0));
    o.sx = (ops::sigma_x() * rho).trace().real();
    o.sy = (ops::sigma_y() * rho).trace().real();
    o.sz = (ops::sigma_z() * rho).trace().real();
    o.purity = (rho * rho).trace().real();
    return o;
}

}  // namespace driven
