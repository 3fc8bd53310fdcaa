#include "driven/run.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace driven {

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12e", x);
    return buf;
}

void write_header(const RunConfig& cfg, const ValidityReport* report, std::ostream& out) {
    out << "# driven-lindblad " << kVersion << "\n";
    for (const std::string& line : cfg.resolved_lines()) out << "# " << line << "\n";
    if (report != nullptr) out << "# validity: " << format_validity(*report) << "\n";
}

void write_row(std::ostream& out, double t, const Observables& o) {
    out << fmt(t) << ',' << fmt(o.p_excited) << ',' << fmt(o.coherence) << ',' << fmt(o.sx) << ','
        << fmt(o.sy) << ',' << fmt(o.sz) << ',' << fmt(o.purity);
}

struct RunOutcome {
    bool ok{false};
    std::string error;
    double max_p_excited{0.0};
    double mean_coherence{0.0};
    double final_purity{0.0};
};

RunOutcome simulate_to_stream(const RunConfig& cfg, std::ostream& out, std::ostream& diag) {
    RunOutcome outcome;
    cfg.validate();
    const DriveParams p = cfg.drive_params();
    const QuadratureConfig quad = cfg.quadrature();

    if (cfg.engine == "unitary" && cfg.bath_keys_touched())
        diag << "warning: engine=unitary ignores the bath keys\n";

    const BathSpec b = cfg.bath_spec();
    ValidityReport report;
    bool have_report = false;
    if (cfg.engine != "unitary") {
        report = full_report(p, b, quad);
        have_report = true;
    }
    write_header(cfg, have_report ? &report : nullptr, out);

    auto track = [&outcome](double t_final, const Observables& o) {
        outcome.max_p_excited = std::max(outcome.max_p_excited, o.p_excited);
        outcome.mean_coherence += o.coherence;
        outcome.final_purity = o.purity;
        (void)t_final;
    };

    if (cfg.engine == "tn") {
        out << "t,P_e,coherence,sx,sy,sz,purity,max_bond,discarded_weight\n";
        const TnTrajectory traj = tn_run(cfg.initial_density(), p, b, cfg.tn_modes,
                                         cfg.tn_wmax_over_omega0, cfg.tn_config());
        bool annotated = false;
        for (const TnSample& s : traj.samples) {
            if (s.beyond_recurrence && !annotated) {
                out << "# samples below are past the recurrence guard t_max = "
                    << fmt(traj.t_recurrence) << "\n";
                annotated = true;
            }
            write_row(out, s.t, s.obs);
            out << ',' << s.max_bond << ',' << fmt(s.discarded_weight) << "\n";
            track(s.t, s.obs);
        }
        outcome.mean_coherence /= static_cast<double>(traj.samples.size());
        if (annotated)
            diag << "warning: run extends past the recurrence guard t_max = " << traj.t_recurrence
                 << "\n";
    } else if (cfg.engine == "analytic") {
        out << "t,P_e,coherence,sx,sy,sz,purity\n";
        const DensityMatrix rho0 = cfg.initial_density();
        const double c_z0 = (ops::sigma_z() * rho0.matrix()).trace().real();
        const std::complex<double> c_plus0 = 2.0 * rho0.matrix()(0, 1);
        const auto solution =
            analytic_interaction_solution(c_z0, c_plus0, p, b, cfg.evolution_config(), quad);
        for (const BlochInteraction& s : solution) {
            ops::Matrix2 rho;
            rho << 0.5 * (1.0 + s.c_z), 0.5 * s.c_plus, 0.5 * std::conj(s.c_plus), 0.5 * (1.0 - s.c_z);
            const Observables o = observables(rho, 0.0, p);
            write_row(out, s.t, o);
            out << "\n";
            track(s.t, o);
        }
        outcome.mean_coherence /= static_cast<double>(solution.size());
    } else {
        out << "t,P_e,coherence,sx,sy,sz,purity\n";
        const Trajectory traj = evolve(cfg.initial_density(), p, b, cfg.evolution_config(), quad);
        for (const TrajectorySample& s : traj.samples) {
            write_row(out, s.t, s.obs);
            out << "\n";
            track(s.t, s.obs);
        }
        outcome.mean_coherence /= static_cast<double>(traj.samples.size());
    }
    outcome.ok = true;
    return outcome;
}

}  // namespace

std::string format_validity(const ValidityReport& r) {
    std::ostringstream os;
    os << "weak_coupling=" << (r.weak_coupling_ok ? "pass" : "fail") << " a=" << fmt(r.a)
       << " markov_C=" << fmt(r.markov_C) << " markov=" << (r.markov_converged ? "pass" : "fail")
       << " secular_margin=" << fmt(r.secular_margin) << " secular=" << (r.secular_ok ? "pass" : "fail")
       << " driving_ratio=" << fmt(r.driving_ratio) << " driving_bound=" << fmt(r.driving_bound)
       << " driving=" << (r.driving_ok ? "pass" : "fail")
       << " adiabatic=" << (r.adiabatic_ok ? "pass" : "fail");
    return os.str();
}

int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& diag) {
    try {
        simulate_to_stream(cfg, out, diag);
        return exit_ok;
    } catch (const ConfigError& e) {
        diag << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::invalid_argument& e) {
        diag << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        diag << "solver abort: " << e.what() << "\n";
        return exit_solver;
    }
}

int run_check_validity(const RunConfig& cfg, std::ostream& out, std::ostream& diag) {
    try {
        cfg.validate();
        const ValidityReport r = full_report(cfg.drive_params(), cfg.bath_spec(), cfg.quadrature());
        out << "weak_coupling: " << (r.weak_coupling_ok ? "pass" : "fail") << " (a = " << fmt(r.a)
            << ", threshold 1e-2)\n";
        out << "markov_constant: " << (r.markov_converged ? "pass" : "fail")
            << " (C = " << fmt(r.markov_C) << " in units of omega0)\n";
        out << "secular: " << (r.secular_ok ? "pass" : "fail")
            << " (margin 2 omega0 / a^2 C = " << fmt(r.secular_margin) << ", required > 100)\n";
        out << "driving: " << (r.driving_ok ? "pass" : "fail")
            << " (ratio Omega omega / 4 omega0^2 = " << fmt(r.driving_ratio)
            << ", bound a^-2 = " << fmt(r.driving_bound) << ")\n";
        out << "adiabatic: " << (r.adiabatic_ok ? "pass" : "fail")
            << " (ratio < 1e-2; informational)\n";
        out << "overall: " << (r.all_ok() ? "pass" : "fail") << "\n";
        return r.all_ok() ? exit_ok : exit_validity;
    } catch (const ConfigError& e) {
        diag << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::invalid_argument& e) {
        diag << "config error: " << e.what() << "\n";
        return exit_config;
    } catch (const std::exception& e) {
        diag << "solver abort: " << e.what() << "\n";
        return exit_solver;
    }
}

int run_sweep(const RunConfig& base, const std::string& key, const std::vector<std::string>& values,
              const std::string& prefix, std::ostream& diag) {
    if (values.empty()) {
        diag << "config error: sweep requires a non-empty list of values\n";
        return exit_config;
    }
    if (!RunConfig::is_numeric_key(key)) {
        diag << "config error: sweep key '" << key << "' is not a numeric config key\n";
        return exit_config;
    }

    struct Slot {
        RunOutcome outcome;
        std::string value;
    };
    std::vector<Slot> slots(values.size());
    std::atomic<std::size_t> next{0};
    std::mutex diag_mutex;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= values.size()) return;
            RunConfig cfg = base;
            Slot& slot = slots[i];
            slot.value = values[i];
            std::ostringstream sink;
            try {
                cfg.set(key, values[i]);
                std::ofstream out(prefix + "_" + key + "=" + values[i] + ".csv");
                if (!out) throw ConfigError("cannot open output file under prefix '" + prefix + "'");
                slot.outcome = simulate_to_stream(cfg, out, sink);
            } catch (const std::exception& e) {
                slot.outcome.ok = false;
                slot.outcome.error = e.what();
            }
            if (!sink.str().empty()) {
                const std::lock_guard<std::mutex> lock(diag_mutex);
                diag << sink.str();
            }
        }
    };

    unsigned n_workers = base.workers > 0 ? static_cast<unsigned>(base.workers)
                                          : std::max(1u, std::thread::hardware_concurrency());
    n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(values.size()));
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    std::ofstream summary(prefix + "_summary.csv");
    if (!summary) {
        diag << "config error: cannot open summary file under prefix '" << prefix << "'\n";
        return exit_config;
    }
    summary << "# driven-lindblad " << kVersion << " sweep of " << key << "\n";
    summary << key << ",max_P_e,time_avg_coherence,final_purity,status\n";
    bool any_failed = false;
    for (const Slot& slot : slots) {
        if (slot.outcome.ok) {
            summary << slot.value << ',' << fmt(slot.outcome.max_p_excited) << ','
                    << fmt(slot.outcome.mean_coherence) << ',' << fmt(slot.outcome.final_purity)
                    << ",ok\n";
        } else {
            std::string reason = slot.outcome.error;
            std::replace(reason.begin(), reason.end(), ',', ';');
            summary << slot.value << ",nan,nan,nan," << reason << "\n";
            any_failed = true;
        }
    }
    if (any_failed) diag << "warning: some sweep runs failed; see the summary status column\n";
    return exit_ok;
}

}  // namespace driven
