// quadrature.hpp — Adaptive Gauss-Kronrod panels, Cauchy principal values, cumulative Simpson

#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace driven {

struct QuadratureConfig {
    double pv_epsilon{1e-3};         // half-width of the symmetric window around a PV pole
    double quad_rel_tol{1e-10};      // relative tolerance of adaptive panels
    int quad_max_panels{4000};       // panel budget before giving up
    double tail_cutoff_factor{40.0}; // frequency integrals cut at pole + factor * w_c

    void validate() const {
        if (!(pv_epsilon > 0.0)) throw std::invalid_argument("QuadratureConfig: pv_epsilon must be > 0");
        if (!(quad_rel_tol > 0.0)) throw std::invalid_argument("QuadratureConfig: quad_rel_tol must be > 0");
        if (quad_max_panels < 1) throw std::invalid_argument("QuadratureConfig: quad_max_panels must be >= 1");
        if (!(tail_cutoff_factor > 0.0))
            throw std::invalid_argument("QuadratureConfig: tail_cutoff_factor must be > 0");
    }
};

// Thrown when an adaptive integral cannot reach its tolerance within the panel budget.
class QuadratureError : public std::runtime_error {
public:
    QuadratureError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual estimate " + std::to_string(residual) + ")"),
          residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_{0.0};
};

struct QuadResult {
    double value{0.0};
    double error{0.0};
    int panels{0};
    bool converged{false};
};

// Adaptive bisection with 15-point Kronrod / 7-point Gauss panels.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              double rel_tol, double abs_tol, int max_panels);

inline QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                     const QuadratureConfig& cfg) {
    return integrate_adaptive(f, a, b, cfg.quad_rel_tol, 0.0, cfg.quad_max_panels);
}

// PV int_a^b g(w)/(w - pole) dw with a < pole < b. The symmetric window
// [pole - delta, pole + delta] is folded into int_0^delta (g(pole+u) - g(pole-u))/u du,
// which removes the singularity; the remainder is handled by adaptive panels.
QuadResult principal_value(const std::function<double(double)>& g, double pole, double a, double b,
                           const QuadratureConfig& cfg);

// Cumulative integral of samples f_k on a uniform grid of step dt, result[k] = int_0^{k dt}.
// Composite Simpson at even k; odd k closed with the quadratic through the last three samples.
std::vector<double> cumulative_simpson(const std::vector<double>& f, double dt);

}  // namespace driven
