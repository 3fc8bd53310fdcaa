#include "driven/bath.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace driven {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::complex<double> trigamma(std::complex<double> z) {
    if (!(z.real() > 0.0)) throw std::invalid_argument("trigamma: requires Re z > 0");
    std::complex<double> shifted = 0.0;
    while (z.real() < 8.0) {
        shifted += 1.0 / (z * z);
        z += 1.0;
    }
    // B_2 .. B_12
    constexpr double bern[6] = {1.0 / 6.0,  -1.0 / 30.0, 1.0 / 42.0,
                                -1.0 / 30.0, 5.0 / 66.0,  -691.0 / 2730.0};
    const std::complex<double> iz = 1.0 / z;
    const std::complex<double> iz2 = iz * iz;
    std::complex<double> sum = iz + 0.5 * iz2;
    std::complex<double> power = iz * iz2;
    for (double coeff : bern) {
        sum += coeff * power;
        power *= iz2;
    }
    return sum + shifted;
}

double bose_occupation(double w, double T) {
    const double x = w / T;
    if (x > 700.0) return 0.0;
    return 1.0 / std::expm1(x);
}

double spectral_density(double w, const BathSpec& b) {
    if (w < 0.0) throw std::invalid_argument("spectral_density: w must be >= 0");
    return b.a * w * std::exp(-w / b.w_c);
}

double spectral_density_coth(double w, const BathSpec& b) {
    if (w < 1e-6 * b.T_B) {
        // w coth(w/2T) = 2T + w^2/(6T) + O(w^4)
        return b.a * std::exp(-w / b.w_c) * (2.0 * b.T_B + w * w / (6.0 * b.T_B));
    }
    return spectral_density(w, b) / std::tanh(0.5 * w / b.T_B);
}

RateTriple rates_at_gap(double E, const BathSpec& b) {
    const double gap = 2.0 * E;
    const double nbar = bose_occupation(gap, b.T_B);
    const double j = spectral_density(gap, b);
    RateTriple r;
    r.gamma0 = 4.0 * kPi * b.a * b.T_B;
    r.gamma_plus = 2.0 * kPi * j * nbar;
    r.gamma_minus = 2.0 * kPi * j * (1.0 + nbar);
    return r;
}

RateTriple rates(double t, const DriveParams& p, const BathSpec& b) {
    p.validate();
    b.validate();
    RateTriple r = rates_at_gap(spectral_snapshot(t, p).E, b);
    r.t = t;
    return r;
}

std::complex<double> correlation_continuum(double t, const BathSpec& b) {
    const double beta = b.beta();
    const std::complex<double> i(0.0, 1.0);
    const double x0 = 1.0 / (beta * b.w_c);
    const std::complex<double> z1 = x0 + i * (t / beta);
    const std::complex<double> z2 = x0 - i * (t / beta) + 1.0;
    return b.a / (beta * beta) * (trigamma(z1) + trigamma(z2));
}

std::complex<double> correlation_discrete(double t, std::span<const BathMode> modes, double T_B) {
    std::complex<double> sum = 0.0;
    for (const BathMode& m : modes) {
        if (!(m.w > 0.0)) throw std::invalid_argument("correlation_discrete: mode frequencies must be > 0");
        const double nbar = bose_occupation(m.w, T_B);
        const double g2 = m.g * m.g;
        const double phase = m.w * t;
        sum += g2 * ((1.0 + nbar) * std::complex<double>(std::cos(phase), -std::sin(phase)) +
                     nbar * std::complex<double>(std::cos(phase), std::sin(phase)));
    }
    return sum;
}

namespace {

// Regular part int_0^W J(w)(1+2nbar)/(w + 2E) dw plus exponential tail estimate.
QuadResult lamb_regular_branch(double E, const BathSpec& b, const QuadratureConfig& quad) {
    const double upper = 2.0 * E + quad.tail_cutoff_factor * b.w_c;
    auto f = [&](double w) { return spectral_density_coth(w, b) / (w + 2.0 * E); };
    QuadResult r = integrate_adaptive(f, 0.0, upper, quad);
    r.error += b.a * b.w_c * std::exp(-upper / b.w_c);  // |integrand| <= a e^{-w/w_c} out there
    return r;
}

QuadResult lamb_pv_branch(const std::function<double(double)>& g, double E, const BathSpec& b,
                          const QuadratureConfig& quad) {
    const double pole = 2.0 * E;
    const double upper = pole + quad.tail_cutoff_factor * b.w_c;
    QuadResult r = principal_value(g, pole, 0.0, upper, quad);
    r.error += 2.0 * b.a * b.w_c * std::exp(-upper / b.w_c);
    return r;
}

void require_converged(const QuadResult& r, const char* what) {
    if (!r.converged) throw QuadratureError(std::string("quadrature failed to converge in ") + what, r.error);
}

}  // namespace

double lamb_shift_S(double E, const BathSpec& b, const QuadratureConfig& quad) {
    if (!(E > 0.0)) throw std::invalid_argument("lamb_shift_S: E must be > 0");
    b.validate();
    quad.validate();
    const QuadResult plus = lamb_regular_branch(E, b, quad);
    require_converged(plus, "lamb_shift_S (regular branch)");
    auto g = [&](double w) { return spectral_density_coth(w, b); };
    const QuadResult minus = lamb_pv_branch(g, E, b, quad);
    require_converged(minus, "lamb_shift_S (principal-value branch)");
    return plus.value - minus.value;
}

LambCoeffs lamb_shift(double t, const DriveParams& p, const BathSpec& b, const QuadratureConfig& quad) {
    LambCoeffs c;
    c.t = t;
    c.S_t = lamb_shift_S(spectral_snapshot(t, p).E, b, quad);
    c.S0 = -b.a * b.w_c;
    return c;
}

namespace {

// J(w)(1 + nbar) and J(w) nbar with the removable w -> 0 limits taken in series.
double j_emission(double w, const BathSpec& b) {
    if (w < 1e-6 * b.T_B) return b.a * std::exp(-w / b.w_c) * (b.T_B + 0.5 * w);
    return spectral_density(w, b) * (1.0 + bose_occupation(w, b.T_B));
}

double j_absorption(double w, const BathSpec& b) {
    if (w < 1e-6 * b.T_B) return b.a * std::exp(-w / b.w_c) * (b.T_B - 0.5 * w);
    return spectral_density(w, b) * bose_occupation(w, b.T_B);
}

}  // namespace

double lamb_S_plus(double E, const BathSpec& b, const QuadratureConfig& quad) {
    // S of the -2E Bohr channel: -int J(1+nbar)/(w+2E) + PV int J nbar/(w-2E)
    const double upper = 2.0 * E + quad.tail_cutoff_factor * b.w_c;
    QuadResult r1 = integrate_adaptive([&](double w) { return j_emission(w, b) / (w + 2.0 * E); },
                                       0.0, upper, quad);
    require_converged(r1, "lamb_S_plus");
    QuadResult r2 = principal_value([&](double w) { return j_absorption(w, b); }, 2.0 * E, 0.0, upper, quad);
    require_converged(r2, "lamb_S_plus (PV)");
    return -r1.value + r2.value;
}

double lamb_S_minus(double E, const BathSpec& b, const QuadratureConfig& quad) {
    // S of the +2E Bohr channel: -PV int J(1+nbar)/(w-2E) + int J nbar/(w+2E)
    const double upper = 2.0 * E + quad.tail_cutoff_factor * b.w_c;
    QuadResult r1 = principal_value([&](double w) { return j_emission(w, b); }, 2.0 * E, 0.0, upper, quad);
    require_converged(r1, "lamb_S_minus (PV)");
    QuadResult r2 = integrate_adaptive([&](double w) { return j_absorption(w, b) / (w + 2.0 * E); },
                                       0.0, upper, quad);
    require_converged(r2, "lamb_S_minus");
    return -r1.value + r2.value;
}

MarkovConstant markov_constant(const BathSpec& b, double t_max) {
    b.validate();
    if (!(t_max > 0.0)) throw std::invalid_argument("markov_constant: t_max must be > 0");
    auto abs_R = [&](double t) { return std::abs(correlation_continuum(t, b)); };

    MarkovConstant out;
    const double beta = b.beta();
    double seg_start = 0.0;
    double seg_len = std::min(beta, t_max);
    double previous = -1.0;
    double last = -1.0;
    while (seg_start < t_max) {
        const double seg_end = std::min(seg_start + seg_len, t_max);
        const QuadResult r = integrate_adaptive(abs_R, seg_start, seg_end, 1e-9, 0.0, 2000);
        out.C += r.value;
        if (seg_end - seg_start >= 0.99 * seg_len) {  // partial closing segment not comparable
            previous = last;
            last = r.value;
        }
        seg_start = seg_end;
        seg_len *= 2.0;
    }
    // |R| = O(t^-2): bound the tail by t_max^2 |R(t_max)| / t
    out.tail_bound = t_max * abs_R(t_max);
    out.C += out.tail_bound;
    // Cauchy test on the final dyadic segments: stalled contributions mean the running
    // integral has not entered its decaying tail
    out.converged = last >= 0.0 &&
                    (last <= 1e-3 * out.C || (previous > 0.0 && last < 0.9 * previous)) &&
                    out.tail_bound <= 0.05 * out.C;
    return out;
}

LambShiftTable::LambShiftTable(double E_min, double E_max, const BathSpec& b,
                               const QuadratureConfig& quad, double target_abs_err) {
    if (!(E_min > 0.0) || E_max < E_min)
        throw std::invalid_argument("LambShiftTable: need 0 < E_min <= E_max");
    E_min_ = E_min;
    E_max_ = E_max;
    if (E_max - E_min < 1e-12 * E_min) {  // constant gap (undriven)
        values_ = {lamb_shift_S(E_min, b, quad)};
        step_ = 1.0;
        return;
    }
    std::size_t n = 17;
    const std::size_t n_cap = 2049;
    while (true) {
        step_ = (E_max_ - E_min_) / static_cast<double>(n - 1);
        values_.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            values_[i] = lamb_shift_S(E_min_ + static_cast<double>(i) * step_, b, quad);
        build_spline();
        if (n >= n_cap) break;
        double worst = 0.0;
        for (std::size_t i = 0; i + 1 < n; i += 2) {
            const double mid = E_min_ + (static_cast<double>(i) + 0.5) * step_;
            worst = std::max(worst, std::abs((*this)(mid)-lamb_shift_S(mid, b, quad)));
        }
        if (worst < target_abs_err) break;
        n = 2 * n - 1;
    }
}

LambShiftTable LambShiftTable::for_drive(const DriveParams& p, const BathSpec& b,
                                         const QuadratureConfig& quad) {
    const double E_min = p.omega0;
    const double E_max = std::hypot(p.omega0, p.Omega);
    return LambShiftTable(E_min, E_max, b, quad, 1e-8 * p.omega0);
}

void LambShiftTable::build_spline() {
    const int n = static_cast<int>(values_.size());
    second_derivs_.assign(values_.size(), 0.0);
    if (n < 3) return;
    // natural cubic spline on a uniform grid, tridiagonal sweep
    std::vector<double> u(values_.size(), 0.0);
    for (int i = 1; i + 1 < n; ++i) {
        const double p = 0.5 * second_derivs_[i - 1] + 2.0;
        second_derivs_[i] = -0.5 / p;
        const double rhs = 3.0 * (values_[i + 1] - 2.0 * values_[i] + values_[i - 1]) / (step_ * step_);
        u[i] = (rhs - 0.5 * u[i - 1]) / p;
    }
    second_derivs_[n - 1] = 0.0;
    for (int i = n - 2; i >= 0; --i)
        second_derivs_[i] = second_derivs_[i] * second_derivs_[i + 1] + u[i];
}

double LambShiftTable::operator()(double E) const {
    if (values_.size() == 1) return values_[0];
    const double clamped = std::clamp(E, E_min_, E_max_);
    const auto n = values_.size();
    std::size_t i = std::min(static_cast<std::size_t>((clamped - E_min_) / step_), n - 2);
    const double xl = E_min_ + static_cast<double>(i) * step_;
    const double a = (xl + step_ - clamped) / step_;
    const double bfrac = 1.0 - a;
    return a * values_[i] + bfrac * values_[i + 1] +
           ((a * a * a - a) * second_derivs_[i] + (bfrac * bfrac * bfrac - bfrac) * second_derivs_[i + 1]) *
               step_ * step_ / 6.0;
}

}  // namespace driven
