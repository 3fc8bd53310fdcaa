// master_equation.hpp — Time-dependent Lindblad generators for the driven qubit:
// exact propagator-built jump operators, their adiabatic limit, the strong/weak
// closed-form approximants, RK4 evolution and the interaction-picture solution.

#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "driven/bath.hpp"
#include "driven/propagator.hpp"
#include "driven/quadrature.hpp"
#include "driven/qubit.hpp"

namespace driven {

enum class Flavor { tdme, adme, strong_approx, weak_approx, interaction };
enum class Solver { tdme, adme, unitary };
enum class Picture { schroedinger, interaction };

// The dissipative generator at one instant: three jump operators, their rates and the
// Lamb shift Hamiltonian.
struct JumpSet {
    ops::Matrix2 L0, Lplus, Lminus;
    RateTriple rates;
    ops::Matrix2 H_LS;
    double t{0.0};
    Flavor flavor{Flavor::tdme};
};

// Jump operators built from the closed-system propagator entries; S_t scales H_LS
// (pass 0 to drop the Lamb shift).
JumpSet jump_set_tdme(double t, const PropagatorEntries& u, const DriveParams& p,
                      const BathSpec& b, double S_t);

// Instantaneous-eigenprojector jump operators; H_LS commutes with H_S(t) exactly.
JumpSet jump_set_adme(double t, const DriveParams& p, const BathSpec& b, double S_t);

// High-frequency approximants, global phase of L_plus stripped.
JumpSet jump_set_strong(double t, const DriveParams& p, const BathSpec& b, double S_t);

// Weak-driving approximants in the three displayed variants.
JumpSet jump_set_weak(double t, const DriveParams& p, const BathSpec& b, WeakVariant variant,
                      double S_t);

// Interaction-picture operators A_0 = sin(phi) sigma_z, A_± = cos(phi) sigma_±, with
// H_LS = (S/2) cos^2(phi) sigma_z. The sign follows the one-sided Fourier split of the
// correlation function (it matches second-order perturbation theory for the level shift
// and the closed-form coherence phase).
JumpSet jump_set_interaction(double t, const DriveParams& p, const BathSpec& b, double S_t);

struct EvolutionConfig {
    Solver solver{Solver::tdme};
    bool lamb_shift{true};
    Picture picture{Picture::schroedinger};
    double dt{1e-3};
    double t_end{10.0};
    int store_stride{10};

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("EvolutionConfig: dt must be > 0");
        if (!(t_end > 0.0)) throw std::invalid_argument("EvolutionConfig: t_end must be > 0");
        if (store_stride < 1) throw std::invalid_argument("EvolutionConfig: store_stride must be >= 1");
    }
};

// Right-hand side of d rho/dt for one stage; traceless and Hermiticity-preserving.
ops::Matrix2 generator_apply(const ops::Matrix2& rho, const JumpSet& js, double t,
                             const DriveParams& p, const EvolutionConfig& cfg);

class PositivityError : public std::runtime_error {
public:
    PositivityError(double t, double min_eig)
        : std::runtime_error("state positivity violated at t = " + std::to_string(t) +
                             " (min eigenvalue " + std::to_string(min_eig) + ")"),
          t_(t), min_eig_(min_eig) {}
    double t() const { return t_; }
    double min_eigenvalue() const { return min_eig_; }

private:
    double t_, min_eig_;
};

struct TrajectorySample {
    double t{0.0};
    ops::Matrix2 rho;
    Observables obs;
    std::optional<PropagatorEntries> propagator;  // populated for Schroedinger-picture TDME runs
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double max_trace_drift{0.0};
    double min_eigenvalue{1.0};
};

// RK4 trajectory of the chosen generator. The TDME advances the closed propagator in
// lockstep (two half steps per master step) so the jump operators at each RK4 stage use
// stage-consistent alpha, beta.
Trajectory evolve(const DensityMatrix& rho0, const DriveParams& p, const BathSpec& b,
                  const EvolutionConfig& cfg, const QuadratureConfig& quad);

// Interaction-picture Bloch components c_z = Tr(sigma_z rho), c_plus = 2 rho_12.
struct BlochInteraction {
    double c_z{0.0};
    std::complex<double> c_plus{0.0, 0.0};
    double t{0.0};
};

// Closed-form interaction-picture solution on the evolution grid, all time integrals by
// cumulative Simpson. lamb_shift off drops the phase factor on c_plus.
std::vector<BlochInteraction> analytic_interaction_solution(double c_z0, std::complex<double> c_plus0,
                                                            const DriveParams& p, const BathSpec& b,
                                                            const EvolutionConfig& cfg,
                                                            const QuadratureConfig& quad);

struct LambShiftComparison {
    Trajectory with_lamb;
    Trajectory without_lamb;
    std::vector<double> sigma_x_shift;  // per stored sample
    std::vector<double> shifted_gap;    // gap of H_S + H_LS along the with-lamb run
    double max_shift{0.0};
};

// Paired TDME runs differing only in the Lamb-shift flag.
LambShiftComparison lamb_shift_ab_test(const DensityMatrix& rho0, const DriveParams& p,
                                       const BathSpec& b, const EvolutionConfig& cfg,
                                       const QuadratureConfig& quad);

}  // namespace driven
