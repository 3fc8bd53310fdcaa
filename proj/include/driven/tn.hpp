// tn.hpp — Numerically exact benchmark: discretized bath, purified MPS and
// second-order TEBD with swap-gate routing of the star coupling

#pragma once

#include <span>
#include <stdexcept>
#include <vector>

#include "driven/bath.hpp"
#include "driven/qubit.hpp"

namespace driven {

struct DiscretizedBath {
    int N{0};
    double w_max{0.0};
    double dw{0.0};
    std::vector<BathMode> modes;  // w_j = j dw, g_j^2 = J(w_j) dw, local dimension d_j
    double eps1{0.0};             // truncation error bound a w_c^2 (w_max/w_c + 1) e^{-w_max/w_c}
    double eps2{0.0};             // discretization error bound a w_max^2 / (2N)
    bool w_max_below_cutoff{false};  // warning-grade: eps1 bound degrades
};

// Linear grid w_j = j dw with dw = w_max/N; d_j = max(2, ceil(c_occ nbar(w_j)) + 2).
DiscretizedBath discretize_bath(const BathSpec& b, int N, double w_max, double occupancy_cutoff);

// First revival of |R(t)| after its initial decay: the finite bath mimics the continuum
// only below this time.
double estimate_recurrence_time(std::span<const BathMode> modes, double T_B);

class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& what, double discarded)
        : std::runtime_error(what), discarded_(discarded) {}
    double discarded() const { return discarded_; }

private:
    double discarded_{0.0};
};

// Rank-3 site tensor, index = l + dl (p + dp r); the fused physical leg is
// phys + d_phys * aux of the local purification.
struct SiteTensor {
    int dl{1}, dp{1}, dr{1};
    Eigen::VectorXcd v;

    static SiteTensor zero(int dl, int dp, int dr) {
        SiteTensor t;
        t.dl = dl;
        t.dp = dp;
        t.dr = dr;
        t.v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dl) * dp * dr);
        return t;
    }
    std::complex<double>& at(int l, int p, int r) {
        return v[l + static_cast<Eigen::Index>(dl) * (p + static_cast<Eigen::Index>(dp) * r)];
    }
};

// Purification of the spin + oscillators state; site 0 is the spin, the orthogonality
// center sits at the spin position between steps.
struct PurifiedMPS {
    std::vector<SiteTensor> sites;
    std::vector<int> phys_dims;  // physical (unfused) dimension at each chain position
    int spin_position{0};
    double cumulative_discarded{0.0};

    int max_bond() const {
        int m = 1;
        for (const auto& s : sites) m = std::max(m, std::max(s.dl, s.dr));
        return m;
    }
    double norm() const;
    ops::Matrix2 spin_density_matrix() const;  // trace over auxiliaries and bath
};

// Product state: spin site vec(sqrt(rho_S0)), oscillator j the truncated-renormalized
// thermal purification; rejects any mode whose discarded Gibbs weight exceeds weight_tol.
PurifiedMPS initial_purified_state(const DensityMatrix& rho_S0, const DiscretizedBath& bath,
                                   double T_B, double gibbs_weight_tol = 1e-6);

struct TnConfig {
    double dt{5e-3};
    double t_end{10.0};
    int store_stride{20};
    double svd_cutoff{1e-9};    // relative to the largest singular value
    int chi_max{64};
    double occupancy_cutoff{4.0};
    double gibbs_weight_tol{1e-6};
    double renorm_abort{1e-3};  // cumulative discarded weight triggering an abort

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("TnConfig: dt must be > 0");
        if (!(t_end > 0.0)) throw std::invalid_argument("TnConfig: t_end must be > 0");
        if (store_stride < 1) throw std::invalid_argument("TnConfig: store_stride must be >= 1");
        if (chi_max < 1) throw std::invalid_argument("TnConfig: chi_max must be >= 1");
    }
};

// One second-order step over [t, t + dt]: system half step, bath phase half step, the
// swap-routed interaction sweep right and back, bath phases, closing system half step.
class TebdEngine {
public:
    TebdEngine(const DriveParams& p, const DiscretizedBath& bath, double dt, const TnConfig& cfg);

    void step(PurifiedMPS& psi, double t) const;
    double dt() const { return dt_; }

private:
    DriveParams p_;
    double dt_{0.0};
    TnConfig cfg_;
    std::vector<Eigen::MatrixXcd> gate_spin_left_;   // U_I on fused (spin, osc) pair
    std::vector<Eigen::MatrixXcd> gate_spin_right_;  // same gate, (osc, spin) enumeration
    std::vector<Eigen::VectorXcd> bath_phase_;       // e^{-i w_j n dt/2}
    std::vector<int> dims_;

    void apply_spin_half(PurifiedMPS& psi, double t_from, double t_to) const;
    void apply_bath_half(PurifiedMPS& psi) const;
    void sweep(PurifiedMPS& psi) const;
};

struct TnSample {
    double t{0.0};
    ops::Matrix2 rho;
    Observables obs;
    int max_bond{1};
    double discarded_weight{0.0};
    bool beyond_recurrence{false};
};

struct TnTrajectory {
    std::vector<TnSample> samples;
    double t_recurrence{0.0};
    double cumulative_discarded{0.0};
};

TnTrajectory tn_run(const DensityMatrix& rho_S0, const DriveParams& p,
                    const DiscretizedBath& bath, double T_B, const TnConfig& cfg);

inline TnTrajectory tn_run(const DensityMatrix& rho_S0, const DriveParams& p, const BathSpec& b,
                           int N, double w_max, const TnConfig& cfg) {
    return tn_run(rho_S0, p, discretize_bath(b, N, w_max, cfg.occupancy_cutoff), b.T_B, cfg);
}

}  // namespace driven
