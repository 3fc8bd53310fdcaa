// bath.hpp — Ohmic bath: spectral density, correlation functions, rates, Lamb shifts

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "driven/quadrature.hpp"
#include "driven/qubit.hpp"

namespace driven {

// J(w) = a w exp(-w/w_c) at inverse temperature beta = 1/T_B (hbar = k_B = 1).
struct BathSpec {
    double a{5e-3};   // dimensionless coupling, plays the role of g
    double w_c{2.0};  // cutoff frequency
    double T_B{4.0};  // bath temperature

    double beta() const { return 1.0 / T_B; }

    void validate() const {
        if (!(a > 0.0)) throw std::invalid_argument("BathSpec: a must be > 0");
        if (!(w_c > 0.0)) throw std::invalid_argument("BathSpec: w_c must be > 0");
        if (!(T_B > 0.0)) throw std::invalid_argument("BathSpec: T_B must be > 0");
    }
};

struct RateTriple {
    double gamma0{0.0};
    double gamma_plus{0.0};
    double gamma_minus{0.0};
    double t{0.0};
};

struct LambCoeffs {
    double S_t{0.0};  // coefficient of the Lamb shift Hamiltonian
    double S0{0.0};   // zero-frequency coefficient, -a w_c for the Ohmic form
    double t{0.0};
};

// Complex trigamma psi^(1)(z) for Re z > 0: argument-shift recurrence into Re z > 8,
// then the asymptotic series 1/z + 1/(2z^2) + sum_k B_{2k} z^{-2k-1} through k = 6.
std::complex<double> trigamma(std::complex<double> z);

// Bose-Einstein occupation 1/(e^{w/T} - 1), w > 0.
double bose_occupation(double w, double T);

// J(w) (1 + 2 nbar(w)) = J(w) coth(w / 2 T_B); the w -> 0 limit 2 a T_B is taken in series.
double spectral_density_coth(double w, const BathSpec& b);

double spectral_density(double w, const BathSpec& b);

// gamma_0 = 4 pi a T_B, gamma_± = 2 pi J(2E) {nbar, 1 + nbar}(2E)
RateTriple rates(double t, const DriveParams& p, const BathSpec& b);
RateTriple rates_at_gap(double E, const BathSpec& b);

// R(t) of the continuum bath via the trigamma representation.
std::complex<double> correlation_continuum(double t, const BathSpec& b);

struct BathMode {
    double w{0.0};
    double g{0.0};
    int dim{2};  // local Hilbert-space truncation used by the tensor-network bench
};

// R(t) = sum_j g_j^2 [(1 + nbar_j) e^{-i w_j t} + nbar_j e^{i w_j t}] of a finite mode set.
std::complex<double> correlation_discrete(double t, std::span<const BathMode> modes, double T_B);

// S(t) = int_0^inf J(w)(1+2nbar)[PV 1/(w+2E) - PV 1/(w-2E)] dw, a function of the gap only.
double lamb_shift_S(double E, const BathSpec& b, const QuadratureConfig& quad);
LambCoeffs lamb_shift(double t, const DriveParams& p, const BathSpec& b, const QuadratureConfig& quad);

// One-sided Fourier coefficients of the ±2E channels; S_plus - S_minus = -S(t) numerically.
double lamb_S_plus(double E, const BathSpec& b, const QuadratureConfig& quad);
double lamb_S_minus(double E, const BathSpec& b, const QuadratureConfig& quad);

struct MarkovConstant {
    double C{0.0};         // int_0^{t_max} |R| dt plus the O(t^-2) tail bound
    double tail_bound{0.0};
    bool converged{false};  // Cauchy test on dyadic segments
};

MarkovConstant markov_constant(const BathSpec& b, double t_max);

// S(E) memoized on a refined grid with cubic-spline interpolation; build once, then
// concurrent reads are safe.
class LambShiftTable {
public:
    LambShiftTable(double E_min, double E_max, const BathSpec& b, const QuadratureConfig& quad,
                   double target_abs_err);

    static LambShiftTable for_drive(const DriveParams& p, const BathSpec& b,
                                    const QuadratureConfig& quad);

    double operator()(double E) const;

private:
    double E_min_{0.0}, E_max_{0.0}, step_{0.0};
    std::vector<double> values_;
    std::vector<double> second_derivs_;
    void build_spline();
};

}  // namespace driven
