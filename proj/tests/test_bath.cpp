#include <doctest.h>

#include <cmath>
#include <random>

#include "driven/bath.hpp"
#include "test_support.hpp"

using namespace driven;
using testing_support::correlation_by_quadrature;

namespace {
const BathSpec fig_bath{5e-3, 2.0, 4.0};
const QuadratureConfig quad{};
}  // namespace

TEST_CASE("spectral density closed-form values") {
    CHECK(spectral_density(0.0, fig_bath) == doctest::Approx(0.0));
    CHECK(spectral_density(fig_bath.w_c, fig_bath) ==
          doctest::Approx(5e-3 * 2.0 * std::exp(-1.0)).epsilon(1e-14));
    CHECK_THROWS_AS(spectral_density(-0.1, fig_bath), std::invalid_argument);
}

TEST_CASE("spectral density integrates to a w_c^2") {
    const auto integral = integrate_adaptive([&](double w) { return spectral_density(w, fig_bath); },
                                             0.0, 60.0 * fig_bath.w_c, 1e-12, 0.0, 20000);
    const double exact = fig_bath.a * fig_bath.w_c * fig_bath.w_c;
    CHECK(std::abs(integral.value - exact) / exact < 1e-10);
}

TEST_CASE("dissipation rates against independent arithmetic") {
    const DriveParams p{1.0, 1.0, 10.0};
    const RateTriple r = rates(0.0, p, fig_bath);

    CHECK(r.gamma0 == doctest::Approx(4.0 * M_PI * 5e-3 * 4.0).epsilon(1e-14));  // 0.08 pi

    // gamma_minus(0) = 2 pi J(2)(1 + 1/(e^{1/2} - 1)) evaluated from scratch
    const double j2 = 5e-3 * 2.0 * std::exp(-2.0 / 2.0);
    const double nbar = 1.0 / (std::exp(2.0 / 4.0) - 1.0);
    CHECK(r.gamma_minus == doctest::Approx(2.0 * M_PI * j2 * (1.0 + nbar)).epsilon(1e-13));
    CHECK(r.gamma_minus == doctest::Approx(0.058747).epsilon(1e-4));
    CHECK(r.gamma_plus == doctest::Approx(2.0 * M_PI * j2 * nbar).epsilon(1e-13));
}

TEST_CASE("detailed balance holds at random parameters") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> time(0.0, 30.0);
    std::uniform_real_distribution<double> amp(0.0, 3.0);
    std::uniform_real_distribution<double> temp(0.1, 10.0);
    for (int i = 0; i < 300; ++i) {
        const DriveParams p{1.0, amp(rng), 0.2 + amp(rng)};
        const BathSpec b{5e-3, 0.5 + amp(rng), temp(rng)};
        const double t = time(rng);
        const RateTriple r = rates(t, p, b);
        CHECK(r.gamma_plus >= 0.0);
        CHECK(r.gamma_minus > r.gamma_plus);
        const double gap = spectral_snapshot(t, p).gap;
        CHECK(std::abs(r.gamma_plus / r.gamma_minus - std::exp(-gap / b.T_B)) < 1e-12);
    }
}

TEST_CASE("trigamma recurrence identity") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> re(0.05, 12.0);
    std::uniform_real_distribution<double> im(-30.0, 30.0);
    for (int i = 0; i < 200; ++i) {
        const std::complex<double> z(re(rng), im(rng));
        const std::complex<double> lhs = trigamma(z + 1.0);
        const std::complex<double> rhs = trigamma(z) - 1.0 / (z * z);
        CHECK(std::abs(lhs - rhs) < 1e-12 * (1.0 + std::abs(rhs)));
    }
}

TEST_CASE("continuum correlation function matches direct quadrature") {
    const double beta = fig_bath.beta();
    CHECK(std::abs(correlation_continuum(0.0, fig_bath).imag()) < 1e-12);
    for (int k = 0; k <= 40; ++k) {
        const double t = 20.0 * beta * k / 40.0;
        const std::complex<double> closed = correlation_continuum(t, fig_bath);
        const std::complex<double> direct = correlation_by_quadrature(t, fig_bath);
        CHECK(std::abs(closed - direct) / std::abs(closed) < 1e-6);
    }
}

TEST_CASE("correlation decays like t^-2") {
    const double beta = fig_bath.beta();
    const double asymptote = 2.0 * fig_bath.a * fig_bath.T_B / fig_bath.w_c;
    double worst = 0.0;
    for (int k = 0; k <= 300; ++k) {
        const double t = beta * (10.0 + 90.0 * k / 300.0);
        worst = std::max(worst, t * t * std::abs(correlation_continuum(t, fig_bath)));
    }
    CHECK(worst < 3.0 * (asymptote + fig_bath.a));
    CHECK(worst > 0.0);
}

TEST_CASE("discrete correlation limits and continuum agreement") {
    // single mode, almost zero temperature: R(t) -> g^2 e^{-iwt}
    const std::vector<BathMode> single{{2.0, 0.1, 4}};
    const std::complex<double> r = correlation_discrete(1.3, single, 1e-3);
    CHECK(std::abs(r - 0.01 * std::polar(1.0, -2.0 * 1.3)) < 1e-10);

    // R(0) is real and equals sum g^2 coth(w / 2T)
    const std::vector<BathMode> few{{0.5, 0.05, 4}, {1.5, 0.08, 4}, {3.0, 0.02, 4}};
    const std::complex<double> r0 = correlation_discrete(0.0, few, 2.0);
    CHECK(std::abs(r0.imag()) < 1e-15);
    double expected = 0.0;
    for (const auto& m : few) expected += m.g * m.g / std::tanh(0.5 * m.w / 2.0);
    CHECK(r0.real() == doctest::Approx(expected).epsilon(1e-13));

    // N = 100 linear discretization (dw = 0.1) tracks the continuum over t in [0, 10];
    // the right-endpoint coupling rule biases by O(dw a T_B), so a cool bath is used
    const BathSpec cool{5e-3, 1.2, 0.2};
    const DiscretizedBath dense = discretize_bath(cool, 100, 10.0, 4.0);
    const double scale = std::abs(correlation_continuum(0.0, cool));
    double worst = 0.0;
    for (int k = 0; k <= 100; ++k) {
        const double t = 10.0 * k / 100.0;
        worst = std::max(worst, std::abs(correlation_discrete(t, dense.modes, cool.T_B) -
                                         correlation_continuum(t, cool)));
    }
    CHECK(worst / scale < 0.02);
}

TEST_CASE("lamb shift coefficients") {
    const DriveParams p{1.0, 1.0, 10.0};

    SUBCASE("S0 equals -a w_c") {
        const LambCoeffs c = lamb_shift(0.0, p, fig_bath, quad);
        CHECK(c.S0 == doctest::Approx(-0.01).epsilon(1e-14));
        const auto direct = integrate_adaptive(
            [&](double w) { return fig_bath.a * std::exp(-w / fig_bath.w_c); }, 0.0,
            60.0 * fig_bath.w_c, 1e-12, 0.0, 20000);
        CHECK(-direct.value == doctest::Approx(c.S0).epsilon(1e-10));
    }

    SUBCASE("principal value is independent of the excision half-width") {
        QuadratureConfig wide = quad;
        wide.pv_epsilon = 1e-3;
        QuadratureConfig narrow = quad;
        narrow.pv_epsilon = 1e-4;
        const double t = 0.03;
        const double s_wide = lamb_shift(t, p, fig_bath, wide).S_t;
        const double s_narrow = lamb_shift(t, p, fig_bath, narrow).S_t;
        CHECK(std::abs(s_wide - s_narrow) / std::abs(s_wide) < 1e-6);
    }

    SUBCASE("equal gaps give equal shifts") {
        const double t1 = 0.021;
        const double t2 = M_PI / p.omega - t1;  // sin(omega t) identical
        REQUIRE(spectral_snapshot(t1, p).E == doctest::Approx(spectral_snapshot(t2, p).E));
        CHECK(lamb_shift(t1, p, fig_bath, quad).S_t ==
              doctest::Approx(lamb_shift(t2, p, fig_bath, quad).S_t).epsilon(1e-12));
    }

    SUBCASE("channel coefficients compose to the combined shift") {
        // as printed, the +/- channel coefficients satisfy S_plus - S_minus = -S(t)
        for (double E : {1.0, 1.2, 1.4}) {
            const double splus = lamb_S_plus(E, fig_bath, quad);
            const double sminus = lamb_S_minus(E, fig_bath, quad);
            const double s = lamb_shift_S(E, fig_bath, quad);
            CHECK(std::abs(splus - sminus + s) < 1e-8);
            CHECK(std::abs(splus - sminus) > 1e-5);
        }
    }
}

TEST_CASE("lamb shift table interpolates to target accuracy") {
    const DriveParams p{1.0, 1.0, 10.0};
    const LambShiftTable table = LambShiftTable::for_drive(p, fig_bath, quad);
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> energy(1.0, std::sqrt(2.0));
    for (int i = 0; i < 25; ++i) {
        const double E = energy(rng);
        CHECK(std::abs(table(E) - lamb_shift_S(E, fig_bath, quad)) < 1e-8);
    }
}

TEST_CASE("markov constant converges and scales with the coupling") {
    const double beta = fig_bath.beta();
    const MarkovConstant c50 = markov_constant(fig_bath, 50.0 * beta);
    const MarkovConstant c100 = markov_constant(fig_bath, 100.0 * beta);
    CHECK(c100.converged);
    CHECK(c100.C > 0.0);
    CHECK(std::abs(c100.C - c50.C) / c100.C < 0.01);

    BathSpec doubled = fig_bath;
    doubled.a *= 2.0;
    const MarkovConstant c2 = markov_constant(doubled, 100.0 * beta);
    CHECK(c2.C == doctest::Approx(2.0 * c100.C).epsilon(1e-10));
}

TEST_CASE("bath spec validation") {
    const BathSpec no_coupling{0.0, 2.0, 4.0};
    CHECK_THROWS_AS(no_coupling.validate(), std::invalid_argument);
    const BathSpec zero_temperature{5e-3, 2.0, 0.0};
    CHECK_THROWS_AS(zero_temperature.validate(), std::invalid_argument);
    CHECK_NOTHROW(fig_bath.validate());
}
