// propagator.hpp — Closed-system evolution operator: RK4 integration, adiabatic form,
// strong- and weak-driving closed-form expansions

#pragma once

#include <complex>
#include <span>
#include <stdexcept>
#include <vector>

#include "driven/quadrature.hpp"
#include "driven/qubit.hpp"

namespace driven {

// U_S(t) = [[alpha, beta], [-conj(beta), conj(alpha)]], det U_S = 1.
struct PropagatorEntries {
    std::complex<double> alpha{1.0, 0.0};
    std::complex<double> beta{0.0, 0.0};
    double t{0.0};

    double unitarity_defect() const { return std::abs(std::norm(alpha) + std::norm(beta) - 1.0); }

    ops::Matrix2 matrix() const {
        ops::Matrix2 u;
        u << alpha, beta, -std::conj(beta), std::conj(alpha);
        return u;
    }
};

class UnitarityError : public std::runtime_error {
public:
    UnitarityError(double t, double defect)
        : std::runtime_error("propagator unitarity drift " + std::to_string(defect) + " at t = " +
                             std::to_string(t)),
          t_(t), defect_(defect) {}
    double t() const { return t_; }
    double defect() const { return defect_; }

private:
    double t_, defect_;
};

struct PropagatorTrajectory {
    std::vector<PropagatorEntries> samples;
    double dt{0.0};
    int stride{1};
};

// Stepping form of i d/dt (alpha, beta) with RK4; used standalone and in lockstep with
// the master-equation integrator.
class ClosedPropagator {
public:
    explicit ClosedPropagator(const DriveParams& p) : p_(p) { p.validate(); }

    const PropagatorEntries& state() const { return state_; }
    void step(double h);  // one RK4 step of size h

private:
    DriveParams p_;
    PropagatorEntries state_{};
};

// RK4 trajectory of the alpha/beta system; aborts when the unitarity drift exceeds 1e-6.
PropagatorTrajectory propagate_closed(const DriveParams& p, double t_end, double dt,
                                      int store_stride = 10);

// alpha = e^{-i Phi(t)} cos(phi/2), beta = -e^{+i Phi(t)} sin(phi/2), Phi = int_0^t E;
// unit norm by construction. Single-time version integrates E adaptively.
PropagatorEntries adiabatic_propagator(double t, const DriveParams& p, const QuadratureConfig& quad);

// Grid version with the dynamical phase accumulated by cumulative Simpson on the dt grid.
PropagatorTrajectory adiabatic_trajectory(const DriveParams& p, double t_end, double dt,
                                          int store_stride = 10);

enum class StrongForm { rwa, first_order };

// High-frequency (lambda_omega >> 1) closed forms; the rwa form is exactly unit norm.
PropagatorEntries strong_driving_expansion(double t, const DriveParams& p, StrongForm form);

enum class WeakVariant { general, low_frequency, adiabatic };

// Weak-driving (lambda_Omega << 1) closed forms; the general variant rejects
// |lambda_omega - 2| < 1e-6 where its denominators vanish.
PropagatorEntries weak_driving_expansion(double t, const DriveParams& p, WeakVariant variant);

struct AdiabaticConvergencePoint {
    double g{0.0};
    double max_deviation{0.0};  // entrywise max norm over tau in [0, tau_star]
};

// With the rescaled parameters held fixed, integrates to tau_star/g^2 per coupling and
// reports the worst deviation between the exact and adiabatic evolution operators.
std::vector<AdiabaticConvergencePoint> adiabatic_convergence_experiment(
    const DriveParams& rescaled, double tau_star, std::span<const double> couplings,
    double dt_over_ts = 1e-3);

}  // namespace driven
