#include <doctest.h>

#include <cmath>

#include "driven/propagator.hpp"
#include "driven/tn.hpp"
#include "test_support.hpp"

using namespace driven;

namespace {

DiscretizedBath decoupled_bath(int n_modes, int dim) {
    DiscretizedBath bath;
    bath.N = n_modes;
    bath.w_max = static_cast<double>(n_modes);
    bath.dw = 1.0;
    for (int j = 1; j <= n_modes; ++j) bath.modes.push_back({static_cast<double>(j), 0.0, dim});
    return bath;
}

}  // namespace

TEST_CASE("bath discretization bookkeeping") {
    const BathSpec b{1e-3, 3.0, 1.0};
    const DiscretizedBath bath = discretize_bath(b, 100, 10.0, 4.0);

    const double eps1_expected = 1e-3 * 9.0 * (10.0 / 3.0 + 1.0) * std::exp(-10.0 / 3.0);
    CHECK(std::abs(bath.eps1 - eps1_expected) < 1e-12);
    CHECK(bath.eps1 == doctest::Approx(1.39e-3).epsilon(2e-3));

    const double eps2_expected = 1e-3 * 100.0 / (2.0 * 100.0);
    CHECK(std::abs(bath.eps2 - eps2_expected) < 1e-12);
    const DiscretizedBath doubled = discretize_bath(b, 200, 10.0, 4.0);
    CHECK(doubled.eps2 == doctest::Approx(0.5 * bath.eps2).epsilon(1e-14));

    // g_1 = sqrt(J(dw) dw) at dw = 0.1
    CHECK(bath.modes.front().g == doctest::Approx(3.110e-3).epsilon(1e-3));
    for (const BathMode& m : bath.modes)
        CHECK(m.g * m.g == doctest::Approx(spectral_density(m.w, b) * bath.dw).epsilon(1e-14));

    for (std::size_t j = 1; j < bath.modes.size(); ++j) {
        CHECK(bath.modes[j].dim <= bath.modes[j - 1].dim);
        CHECK(bath.modes[j].dim >= 2);
    }

    CHECK_FALSE(bath.w_max_below_cutoff);
    CHECK(discretize_bath(b, 10, 2.0, 4.0).w_max_below_cutoff);
}

TEST_CASE("recurrence estimate tracks the mode spacing") {
    const BathSpec b{5e-3, 2.0, 2.0};
    const DiscretizedBath bath = discretize_bath(b, 20, 10.0, 4.0);
    const double expected = 2.0 * M_PI / bath.dw;
    const double t_rec = estimate_recurrence_time(bath.modes, b.T_B);
    CHECK(t_rec > 0.5 * expected);
    CHECK(t_rec <= 1.05 * expected);

    // bookkeeping identity: the discrete correlation of the built modes is the plain sum
    for (double t : {0.0, 0.7, 3.1}) {
        std::complex<double> manual = 0.0;
        for (const BathMode& m : bath.modes) {
            const double nbar = bose_occupation(m.w, b.T_B);
            manual += m.g * m.g *
                      ((1.0 + nbar) * std::polar(1.0, -m.w * t) + nbar * std::polar(1.0, m.w * t));
        }
        CHECK(std::abs(correlation_discrete(t, bath.modes, b.T_B) - manual) < 1e-12);
    }
}

TEST_CASE("initial purified state") {
    const BathSpec b{5e-3, 2.0, 2.0};
    // the 1e-6 weight guard needs d >= 13.8 T_B / w_j, i.e. a generous occupancy cutoff
    const DiscretizedBath bath = discretize_bath(b, 4, 4.0, 32.0);

    SUBCASE("spin ground state vectorizes to a single basis entry") {
        ops::Matrix2 ground;
        ground << 0.0, 0.0, 0.0, 1.0;
        const PurifiedMPS psi = initial_purified_state(DensityMatrix(ground), bath, b.T_B, 1e-6);
        CHECK(std::abs(psi.sites[0].v[3] - 1.0) < 1e-14);
        for (int p : {0, 1, 2}) CHECK(std::abs(psi.sites[0].v[p]) < 1e-14);
        CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(ops::max_abs(psi.spin_density_matrix() - ground) < 1e-12);
    }

    SUBCASE("zero-temperature limit leaves every mode in its ground level") {
        const PurifiedMPS psi =
            initial_purified_state(DensityMatrix::maximally_mixed(), bath, 1e-4, 1e-6);
        for (std::size_t j = 1; j < psi.sites.size(); ++j) {
            const SiteTensor& t = psi.sites[j];
            CHECK(std::abs(t.v[0] - 1.0) < 1e-12);
            for (Eigen::Index i = 1; i < t.v.size(); ++i) CHECK(std::abs(t.v[i]) < 1e-12);
        }
    }

    SUBCASE("norm is one and the weight guard rejects under-resolved modes") {
        const PurifiedMPS psi =
            initial_purified_state(DensityMatrix::coherent_superposition(), bath, b.T_B, 1e-6);
        CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));

        DiscretizedBath skimpy = bath;
        skimpy.modes[0].dim = 2;  // q = e^{-0.5}: two levels keep far less than 1 - 1e-6
        CHECK_THROWS_AS(
            initial_purified_state(DensityMatrix::maximally_mixed(), skimpy, b.T_B, 1e-6),
            TruncationError);
    }
}

TEST_CASE("decoupled chain reproduces the closed propagator") {
    const DriveParams p{1.0, 0.1, 0.5};
    const DiscretizedBath bath = decoupled_bath(3, 3);
    const DensityMatrix rho0 = DensityMatrix::thermal(0.7, p);

    TnConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 1.0;
    cfg.svd_cutoff = 1e-12;
    cfg.chi_max = 16;
    PurifiedMPS psi = initial_purified_state(rho0, bath, 2.0, 0.3);
    const TebdEngine engine(p, bath, cfg.dt, cfg);
    const long steps = 1000;
    for (long k = 0; k < steps; ++k) engine.step(psi, static_cast<double>(k) * cfg.dt);

    CHECK(psi.spin_position == 0);
    const PropagatorTrajectory closed = propagate_closed(p, 1.0, 1e-3, 1000);
    const ops::Matrix2 u = closed.samples.back().matrix();
    const ops::Matrix2 expected = u * rho0.matrix() * u.adjoint();
    CHECK(ops::max_abs(psi.spin_density_matrix() - expected) < 1e-8);
    CHECK(psi.cumulative_discarded < 1e-12);
}

TEST_CASE("second-order step: halving dt reduces the observable error fourfold") {
    const DriveParams p{1.0, 1.0, 2.0};
    const BathSpec b{0.05, 2.0, 1.0};
    DiscretizedBath bath = discretize_bath(b, 2, 4.0, 4.0);
    for (auto& m : bath.modes) m.dim = 6;

    auto p_excited_at_end = [&](double dt) {
        TnConfig cfg;
        cfg.dt = dt;
        cfg.t_end = 0.8;
        cfg.store_stride = 1000000;
        cfg.svd_cutoff = 1e-13;
        cfg.chi_max = 128;
        cfg.gibbs_weight_tol = 1e-2;
        const TnTrajectory traj = tn_run(DensityMatrix::thermal(1.0, p), p, bath, b.T_B, cfg);
        return traj.samples.back().obs.p_excited;
    };
    const double reference = p_excited_at_end(1e-3);
    const double coarse = p_excited_at_end(8e-3);
    const double halved = p_excited_at_end(4e-3);
    const double ratio = std::abs(coarse - reference) / std::abs(halved - reference);
    CHECK(ratio > 3.0);
    CHECK(ratio < 6.0);
}

TEST_CASE("two-mode purification matches the dense solution") {
    const DriveParams p{1.0, 1.0, 2.0};
    const BathSpec b{5e-3, 2.0, 2.0};
    DiscretizedBath bath = discretize_bath(b, 2, 4.0, 4.0);
    for (auto& m : bath.modes) m.dim = 4;

    TnConfig cfg;
    cfg.dt = 2e-3;
    cfg.t_end = 2.0;
    cfg.store_stride = 250;
    cfg.svd_cutoff = 1e-12;
    cfg.chi_max = 64;
    cfg.gibbs_weight_tol = 0.15;  // d = 4 at T_B = 2 keeps ~93% of the lowest mode
    const DensityMatrix rho0 = DensityMatrix::thermal(2.0, p);
    const TnTrajectory traj = tn_run(rho0, p, bath, b.T_B, cfg);

    const testing_support::DenseSpinBoson dense(p, bath);
    Eigen::MatrixXcd full = dense.initial_state(rho0.matrix(), bath, b.T_B);
    double prev_t = 0.0;
    for (const TnSample& s : traj.samples) {
        if (s.t > prev_t) {
            full = dense.evolve(full, prev_t, s.t, 1e-3);
            prev_t = s.t;
        }
        const Observables exact = observables(dense.spin_density(full), s.t, p);
        CHECK(std::abs(s.obs.p_excited - exact.p_excited) < 1e-4);
        CHECK(ops::min_eigenvalue(s.rho) > -1e-10);  // purification keeps positivity
        CHECK(std::abs(s.rho.trace().real() - 1.0) < 1e-6);
    }
}

TEST_CASE("undriven joint equilibrium stays put") {
    const DriveParams p{1.0, 0.0, 1.0};
    const BathSpec b{5e-3, 2.0, 2.0};
    const DiscretizedBath bath = discretize_bath(b, 8, 8.0, 4.0);

    TnConfig cfg;
    cfg.dt = 5e-3;
    cfg.t_end = 5.0;
    cfg.store_stride = 100;
    cfg.gibbs_weight_tol = 0.05;
    cfg.svd_cutoff = 1e-6;  // discarded weight stays ~1e-12 per cut; keeps chi lean
    cfg.chi_max = 64;
    const DensityMatrix gibbs = DensityMatrix::thermal(b.T_B, p);
    const TnTrajectory traj = tn_run(gibbs, p, bath, b.T_B, cfg);
    const double p0 = gibbs.matrix()(0, 0).real();
    for (const TnSample& s : traj.samples) {
        CHECK(std::abs(s.obs.p_excited - p0) < 5e-3);
        CHECK_FALSE(s.beyond_recurrence);
    }
}

TEST_CASE("saturated bond dimension aborts with a report") {
    const DriveParams p{1.0, 1.0, 2.0};
    const BathSpec b{0.5, 2.0, 2.0};  // strong coupling entangles immediately
    DiscretizedBath bath = discretize_bath(b, 3, 3.0, 4.0);
    for (auto& m : bath.modes) m.dim = 4;

    TnConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 3.0;
    cfg.svd_cutoff = 1e-12;
    cfg.chi_max = 2;
    cfg.gibbs_weight_tol = 0.2;
    CHECK_THROWS_AS(tn_run(DensityMatrix::thermal(2.0, p), p, bath, b.T_B, cfg), TruncationError);
}

TEST_CASE("engine rejects steps outside the supported range") {
    const DriveParams p{1.0, 1.0, 2.0};
    const DiscretizedBath bath = decoupled_bath(2, 3);
    TnConfig cfg;
    CHECK_THROWS_AS(TebdEngine(p, bath, 5e-2, cfg), std::invalid_argument);
    CHECK_THROWS_AS(TebdEngine(p, bath, 1e-4, cfg), std::invalid_argument);
}
