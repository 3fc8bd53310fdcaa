// validity.hpp — Regime checks attached to the time-dependent master equation

#pragma once

#include "driven/bath.hpp"
#include "driven/quadrature.hpp"
#include "driven/qubit.hpp"

namespace driven {

// ">>" is read as a factor-100 margin throughout; raw ratios are reported so stricter
// readings can be applied downstream.
struct ValidityReport {
    double a{0.0};
    bool weak_coupling_ok{false};  // a <= 1e-2

    double markov_C{0.0};  // int_0^inf |R|, in units of omega0
    bool markov_converged{false};

    double secular_margin{0.0};  // 2 omega0 / (a^2 C)
    bool secular_ok{false};

    double driving_ratio{0.0};  // Omega omega / (4 omega0^2)
    double driving_bound{0.0};  // a^-2
    bool driving_ok{false};
    bool adiabatic_ok{false};  // driving_ratio < 1e-2

    bool all_ok() const { return weak_coupling_ok && markov_converged && secular_ok && driving_ok; }
};

inline double check_secular(const DriveParams& p, const BathSpec& b, double C) {
    return 2.0 * p.omega0 / (b.a * b.a * C);
}

struct DrivingCheck {
    double ratio{0.0};
    double bound{0.0};
    bool driving_ok{false};
    bool adiabatic_ok{false};
};

inline DrivingCheck check_driving(const DriveParams& p, double a) {
    DrivingCheck c;
    c.ratio = 0.25 * p.lambda_Omega() * p.lambda_omega();
    c.bound = 1.0 / (a * a);
    c.driving_ok = c.ratio < c.bound / 100.0;
    c.adiabatic_ok = c.ratio < 1e-2;
    return c;
}

// Composes the Markov constant (integrated to t_max = 100 beta), the secular margin,
// the driving bounds and the weak-coupling threshold.
ValidityReport full_report(const DriveParams& p, const BathSpec& b, const QuadratureConfig& quad);

}  // namespace driven
