// config.hpp — Flat key = value run configuration; all quantities are dimensionless in
// units of omega0 and ts = 1/omega0

#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "driven/bath.hpp"
#include "driven/master_equation.hpp"
#include "driven/quadrature.hpp"
#include "driven/qubit.hpp"
#include "driven/tn.hpp"

namespace driven {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    // drive
    double lambda_Omega{1.0};
    double lambda_omega{10.0};
    // bath
    double a{5e-3};
    double wc_over_omega0{2.0};
    double TB_over_omega0{4.0};
    // initial state
    std::string initial_state{"thermal"};  // thermal | superposition | maximally_mixed | bloch
    double TS_over_omega0{0.5};
    double bloch_x{0.0}, bloch_y{0.0}, bloch_z{0.0};
    // evolution
    std::string engine{"tdme"};  // tdme | adme | unitary | tn | analytic
    bool lamb_shift{true};
    std::string picture{"schroedinger"};  // schroedinger | interaction
    double t_end_over_ts{10.0};
    double dt_over_ts{1e-3};
    int store_stride{10};
    // quadrature
    double pv_epsilon{1e-3};
    double quad_rel_tol{1e-10};
    int quad_max_panels{4000};
    double tail_cutoff_factor{40.0};
    // tensor-network benchmark
    int tn_modes{30};
    double tn_wmax_over_omega0{15.0};
    double tn_dt_over_ts{5e-3};
    double tn_svd_cutoff{1e-9};
    int tn_chi_max{64};
    double tn_occupancy_cutoff{4.0};
    double tn_gibbs_weight_tol{1e-6};
    // sweep
    int workers{0};  // 0 = hardware concurrency

    std::set<std::string> explicitly_set;

    static RunConfig from_file(const std::string& path);
    static RunConfig from_text(const std::string& text);
    void set(const std::string& key, const std::string& value);  // unknown keys throw

    // every key with its resolved value, one "key = value" line each
    std::vector<std::string> resolved_lines() const;

    bool bath_keys_touched() const;
    static bool is_numeric_key(const std::string& key);

    DriveParams drive_params() const;
    BathSpec bath_spec() const;
    QuadratureConfig quadrature() const;
    EvolutionConfig evolution_config() const;
    TnConfig tn_config() const;
    DensityMatrix initial_density() const;
    void validate() const;  // cross-key constraints
};

}  // namespace driven
