#include "driven/tn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace driven {

namespace {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

constexpr Complex kI(0.0, 1.0);

// dl x dr slice of a site tensor at fixed physical index p
inline Eigen::Map<const MatrixXcd, 0, Eigen::OuterStride<>> slice(const SiteTensor& t, int p) {
    return {t.v.data() + static_cast<Eigen::Index>(t.dl) * p, t.dl, t.dr,
            Eigen::OuterStride<>(static_cast<Eigen::Index>(t.dl) * t.dp)};
}

struct TruncatedSvd {
    MatrixXcd U;     // rows x k
    VectorXd sigma;  // k values, rescaled to unit total weight
    MatrixXcd Vdag;  // k x cols
    double discarded{0.0};
    bool chi_saturated{false};
};

// Truncated SVD. Small matrices get an exact dense SVD; beyond that the Gram matrix of
// the smaller side is diagonalized (the two-site updates here always have one side
// bounded by 4 chi, so this stays cheap for large local dimensions). The Gram route
// cannot resolve singular values below ~sqrt(eps), so its cutoff is floored at 1e-7
// relative; the weight lost that way is at the 1e-14 level per truncation.
TruncatedSvd truncated_svd(const MatrixXcd& m, double rel_cutoff, int chi_max) {
    const Eigen::Index small_side = std::min(m.rows(), m.cols());
    const bool use_dense = small_side <= 96 && m.size() <= 1 << 15;

    VectorXd values;     // singular values, descending
    MatrixXcd u_full, vdag_full;
    if (use_dense) {
        Eigen::BDCSVD<MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        values = svd.singularValues();
        u_full = svd.matrixU();
        vdag_full = svd.matrixV().adjoint();
    } else {
        rel_cutoff = std::max(rel_cutoff, 1e-7);
        const bool rows_small = m.rows() <= m.cols();
        MatrixXcd gram;
        if (rows_small)
            gram.noalias() = m * m.adjoint();
        else
            gram.noalias() = m.adjoint() * m;
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(gram);
        const auto n = gram.rows();
        values.resize(n);
        MatrixXcd basis(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {  // eigenvalues arrive ascending
            values(i) = std::sqrt(std::max(es.eigenvalues()(n - 1 - i), 0.0));
            basis.col(i) = es.eigenvectors().col(n - 1 - i);
        }
        if (rows_small) {
            u_full = std::move(basis);
            vdag_full.noalias() = u_full.adjoint() * m;
            for (Eigen::Index i = 0; i < n; ++i)
                vdag_full.row(i) *= values(i) > 0.0 ? 1.0 / values(i) : 0.0;
        } else {
            vdag_full = basis.adjoint();
            u_full.noalias() = m * basis;
            for (Eigen::Index i = 0; i < n; ++i)
                u_full.col(i) *= values(i) > 0.0 ? 1.0 / values(i) : 0.0;
        }
    }

    const auto n = values.size();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += values(i) * values(i);
    const double sigma_max = values(0);

    int keep = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (keep >= chi_max) break;
        if (i > 0 && values(i) < rel_cutoff * sigma_max) break;
        ++keep;
    }
    keep = std::max(keep, 1);

    TruncatedSvd out;
    out.chi_saturated = keep == chi_max && keep < n && values(keep) >= rel_cutoff * sigma_max;
    double kept_weight = 0.0;
    for (int i = 0; i < keep; ++i) kept_weight += values(i) * values(i);
    out.discarded = total > 0.0 ? std::max(0.0, (total - kept_weight) / total) : 0.0;

    out.U = u_full.leftCols(keep);
    out.Vdag = vdag_full.topRows(keep);
    // keep the state at unit norm; the shaved weight is reported, not silently lost
    out.sigma = values.head(keep) / std::sqrt(std::max(kept_weight, 1e-300));
    return out;
}

// Applies a two-site unitary acting on the physical subindices of the fused legs of
// (a, b), swaps the two legs, and splits with truncation. The gate is indexed by
// (phys_left + d_left * phys_right). center_right leaves the orthogonality center on the
// post-swap right tensor, otherwise on the left one.
void gate_swap_split(SiteTensor& a, SiteTensor& b, const MatrixXcd& gate, int dsl, int dal,
                     int dsr, int dar, bool center_right, const TnConfig& cfg,
                     double& discarded) {
    const int dl = a.dl, bond = a.dr, dr = b.dr;
    const int pa = a.dp, pb = b.dp;

    Eigen::Map<const MatrixXcd> amat(a.v.data(), static_cast<Eigen::Index>(dl) * pa, bond);
    Eigen::Map<const MatrixXcd> bmat(b.v.data(), bond, static_cast<Eigen::Index>(pb) * dr);
    MatrixXcd theta(static_cast<Eigen::Index>(dl) * pa, static_cast<Eigen::Index>(pb) * dr);
    theta.noalias() = amat * bmat;

    const int p2 = dsl * dsr;
    const Eigen::Index cols2 = static_cast<Eigen::Index>(dl) * dal * dar * dr;
    MatrixXcd m2(p2, cols2);
    for (int r = 0; r < dr; ++r)
        for (int ar = 0; ar < dar; ++ar)
            for (int sr = 0; sr < dsr; ++sr)
                for (int al = 0; al < dal; ++al)
                    for (int sl = 0; sl < dsl; ++sl) {
                        const Eigen::Index theta_col = (sr + static_cast<Eigen::Index>(dsr) * ar) +
                                                       static_cast<Eigen::Index>(pb) * r;
                        const Eigen::Index col2 =
                            static_cast<Eigen::Index>(al) +
                            static_cast<Eigen::Index>(dal) * (ar + static_cast<Eigen::Index>(dar) * r);
                        for (int l = 0; l < dl; ++l)
                            m2(sl + static_cast<Eigen::Index>(dsl) * sr,
                               l + static_cast<Eigen::Index>(dl) * col2) =
                                theta(l + static_cast<Eigen::Index>(dl) * (sl + static_cast<Eigen::Index>(dsl) * al),
                                      theta_col);
                    }

    MatrixXcd m3(p2, cols2);
    m3.noalias() = gate * m2;

    MatrixXcd m4(static_cast<Eigen::Index>(dl) * pb, static_cast<Eigen::Index>(pa) * dr);
    for (int r = 0; r < dr; ++r)
        for (int ar = 0; ar < dar; ++ar)
            for (int sr = 0; sr < dsr; ++sr)
                for (int al = 0; al < dal; ++al)
                    for (int sl = 0; sl < dsl; ++sl) {
                        const Eigen::Index col2 =
                            static_cast<Eigen::Index>(al) +
                            static_cast<Eigen::Index>(dal) * (ar + static_cast<Eigen::Index>(dar) * r);
                        const Eigen::Index row4 =
                            static_cast<Eigen::Index>(dl) * (sr + static_cast<Eigen::Index>(dsr) * ar);
                        const Eigen::Index col4 = (sl + static_cast<Eigen::Index>(dsl) * al) +
                                                  static_cast<Eigen::Index>(pa) * r;
                        for (int l = 0; l < dl; ++l)
                            m4(l + row4, col4) = m3(sl + static_cast<Eigen::Index>(dsl) * sr,
                                                    l + static_cast<Eigen::Index>(dl) * col2);
                    }

    TruncatedSvd svd = truncated_svd(m4, cfg.svd_cutoff, cfg.chi_max);
    if (svd.chi_saturated)
        throw TruncationError("TEBD bond dimension hit chi_max with the cutoff unsatisfied "
                              "(cumulative discarded weight " +
                                  std::to_string(discarded + svd.discarded) + ")",
                              discarded + svd.discarded);
    discarded += svd.discarded;

    const auto k = static_cast<int>(svd.sigma.size());
    a.dl = dl;
    a.dp = pb;
    a.dr = k;
    b.dl = k;
    b.dp = pa;
    b.dr = dr;
    if (center_right) {
        a.v = Eigen::Map<const VectorXcd>(svd.U.data(), svd.U.size());
        MatrixXcd right = svd.sigma.asDiagonal() * svd.Vdag;
        b.v = Eigen::Map<const VectorXcd>(right.data(), right.size());
    } else {
        MatrixXcd left = svd.U * svd.sigma.asDiagonal();
        a.v = Eigen::Map<const VectorXcd>(left.data(), left.size());
        b.v = Eigen::Map<const VectorXcd>(svd.Vdag.data(), svd.Vdag.size());
    }
}

MatrixXcd position_operator(int d) {
    MatrixXcd x = MatrixXcd::Zero(d, d);
    for (int n = 0; n + 1 < d; ++n) {
        const double amp = std::sqrt(static_cast<double>(n + 1));
        x(n, n + 1) = amp;
        x(n + 1, n) = amp;
    }
    return x;
}

}  // namespace

DiscretizedBath discretize_bath(const BathSpec& b, int N, double w_max, double occupancy_cutoff) {
    b.validate();
    if (N < 1) throw std::invalid_argument("discretize_bath: N must be >= 1");
    if (!(w_max > 0.0)) throw std::invalid_argument("discretize_bath: w_max must be > 0");
    if (!(occupancy_cutoff > 0.0))
        throw std::invalid_argument("discretize_bath: occupancy_cutoff must be > 0");

    DiscretizedBath bath;
    bath.N = N;
    bath.w_max = w_max;
    bath.dw = w_max / static_cast<double>(N);
    bath.w_max_below_cutoff = w_max < b.w_c;
    bath.modes.reserve(static_cast<std::size_t>(N));
    for (int j = 1; j <= N; ++j) {
        BathMode mode;
        mode.w = static_cast<double>(j) * bath.dw;
        mode.g = std::sqrt(spectral_density(mode.w, b) * bath.dw);
        mode.dim = std::max(2, static_cast<int>(std::ceil(occupancy_cutoff *
                                                          bose_occupation(mode.w, b.T_B))) + 2);
        bath.modes.push_back(mode);
    }
    bath.eps1 = b.a * b.w_c * b.w_c * (w_max / b.w_c + 1.0) * std::exp(-w_max / b.w_c);
    bath.eps2 = b.a * w_max * w_max / (2.0 * static_cast<double>(N));
    return bath;
}

double estimate_recurrence_time(std::span<const BathMode> modes, double T_B) {
    if (modes.empty()) throw std::invalid_argument("estimate_recurrence_time: no modes");
    const double r0 = std::abs(correlation_discrete(0.0, modes, T_B));
    double w_top = 0.0, w_bottom = modes.front().w;
    for (const BathMode& m : modes) {
        w_top = std::max(w_top, m.w);
        w_bottom = std::min(w_bottom, m.w);
    }
    const double horizon = 2.5 * (2.0 * std::numbers::pi / w_bottom);
    const double step = (2.0 * std::numbers::pi / w_top) / 16.0;
    bool decayed = false;
    for (double t = step; t < horizon; t += step) {
        const double r = std::abs(correlation_discrete(t, modes, T_B));
        if (!decayed && r < 0.1 * r0) decayed = true;
        else if (decayed && r > 0.5 * r0) return t;
    }
    return horizon;
}

double PurifiedMPS::norm() const {
    MatrixXcd env = MatrixXcd::Ones(1, 1);
    for (auto it = sites.rbegin(); it != sites.rend(); ++it) {
        const SiteTensor& t = *it;
        MatrixXcd next = MatrixXcd::Zero(t.dl, t.dl);
        for (int p = 0; p < t.dp; ++p) {
            const auto s = slice(t, p);
            next.noalias() += s * env * s.adjoint();
        }
        env = std::move(next);
    }
    return std::sqrt(std::abs(env(0, 0).real()));
}

ops::Matrix2 PurifiedMPS::spin_density_matrix() const {
    const int pos = spin_position;
    MatrixXcd left = MatrixXcd::Ones(1, 1);
    for (int i = 0; i < pos; ++i) {
        const SiteTensor& t = sites[static_cast<std::size_t>(i)];
        MatrixXcd next = MatrixXcd::Zero(t.dr, t.dr);
        for (int p = 0; p < t.dp; ++p) {
            const auto s = slice(t, p);
            next.noalias() += s.transpose() * left * s.conjugate();
        }
        left = std::move(next);
    }
    MatrixXcd right = MatrixXcd::Ones(1, 1);
    for (int i = static_cast<int>(sites.size()) - 1; i > pos; --i) {
        const SiteTensor& t = sites[static_cast<std::size_t>(i)];
        MatrixXcd next = MatrixXcd::Zero(t.dl, t.dl);
        for (int p = 0; p < t.dp; ++p) {
            const auto s = slice(t, p);
            next.noalias() += s * right * s.adjoint();
        }
        right = std::move(next);
    }

    const SiteTensor& spin = sites[static_cast<std::size_t>(pos)];
    ops::Matrix2 rho = ops::Matrix2::Zero();
    for (int s_ket = 0; s_ket < 2; ++s_ket)
        for (int s_bra = 0; s_bra < 2; ++s_bra)
            for (int aux = 0; aux < 2; ++aux) {
                const auto ket = slice(spin, s_ket + 2 * aux);
                const auto bra = slice(spin, s_bra + 2 * aux);
                const MatrixXcd mid = left.transpose() * ket * right;
                rho(s_ket, s_bra) += (bra.adjoint() * mid).trace();
            }
    return rho;
}

PurifiedMPS initial_purified_state(const DensityMatrix& rho_S0, const DiscretizedBath& bath,
                                   double T_B, double gibbs_weight_tol) {
    if (!(T_B > 0.0)) throw std::invalid_argument("initial_purified_state: T_B must be > 0");
    PurifiedMPS psi;
    psi.sites.reserve(bath.modes.size() + 1);
    psi.phys_dims.reserve(bath.modes.size() + 1);

    Eigen::SelfAdjointEigenSolver<ops::Matrix2> es(rho_S0.matrix());
    ops::Matrix2 sqrt_rho = ops::Matrix2::Zero();
    for (int i = 0; i < 2; ++i)
        sqrt_rho += std::sqrt(std::max(es.eigenvalues()(i), 0.0)) * es.eigenvectors().col(i) *
                    es.eigenvectors().col(i).adjoint();
    SiteTensor spin = SiteTensor::zero(1, 4, 1);
    for (int s = 0; s < 2; ++s)
        for (int a = 0; a < 2; ++a) spin.at(0, s + 2 * a, 0) = sqrt_rho(s, a);
    psi.sites.push_back(std::move(spin));
    psi.phys_dims.push_back(2);

    for (const BathMode& mode : bath.modes) {
        const int d = mode.dim;
        const double q = std::exp(-mode.w / T_B);
        const double lost = std::pow(q, d);
        if (lost > gibbs_weight_tol)
            throw TruncationError("initial_purified_state: mode at w = " + std::to_string(mode.w) +
                                      " discards Gibbs weight " + std::to_string(lost) +
                                      "; increase d_j",
                                  lost);
        const double norm = 1.0 - lost;  // sum of the kept geometric weights / (1 - q)
        SiteTensor osc = SiteTensor::zero(1, d * d, 1);
        for (int n = 0; n < d; ++n) {
            const double p_n = (1.0 - q) * std::pow(q, n) / norm;
            osc.at(0, n + d * n, 0) = std::sqrt(p_n);
        }
        psi.sites.push_back(std::move(osc));
        psi.phys_dims.push_back(d);
    }
    psi.spin_position = 0;
    return psi;
}

TebdEngine::TebdEngine(const DriveParams& p, const DiscretizedBath& bath, double dt,
                       const TnConfig& cfg)
    : p_(p), dt_(dt), cfg_(cfg) {
    p.validate();
    cfg.validate();
    if (!(dt >= 0.999e-3 * p.ts()) || !(dt <= 1.001e-2 * p.ts()))
        throw std::invalid_argument("TebdEngine: dt must lie in [1e-3, 1e-2] / omega0");
    dims_.push_back(2);
    for (const BathMode& mode : bath.modes) {
        const int d = mode.dim;
        dims_.push_back(d);
        const MatrixXcd x = position_operator(d);
        MatrixXcd h = MatrixXcd::Zero(2 * d, 2 * d);
        for (int o = 0; o < d; ++o)
            for (int op = 0; op < d; ++op) {
                if (x(o, op) == 0.0) continue;
                // sigma_x flips the spin index; spin index is fast in the fused pair
                h(1 + 2 * o, 0 + 2 * op) = mode.g * x(o, op);
                h(0 + 2 * o, 1 + 2 * op) = mode.g * x(o, op);
            }
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
        VectorXcd phases(2 * d);
        for (int i = 0; i < 2 * d; ++i) phases(i) = std::polar(1.0, -es.eigenvalues()(i) * 0.5 * dt);
        const MatrixXcd gate = es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
        gate_spin_left_.push_back(gate);

        MatrixXcd flipped(d * 2, d * 2);  // (osc + d * spin) enumeration for the left sweep
        for (int s = 0; s < 2; ++s)
            for (int o = 0; o < d; ++o)
                for (int sp = 0; sp < 2; ++sp)
                    for (int op = 0; op < d; ++op)
                        flipped(o + d * s, op + d * sp) = gate(s + 2 * o, sp + 2 * op);
        gate_spin_right_.push_back(std::move(flipped));

        VectorXcd bath_phase(d);
        for (int n = 0; n < d; ++n) bath_phase(n) = std::polar(1.0, -mode.w * n * 0.5 * dt);
        bath_phase_.push_back(std::move(bath_phase));
    }
}

void TebdEngine::apply_spin_half(PurifiedMPS& psi, double t_from, double t_to) const {
    const double span = t_to - t_from;
    const double c_z = p_.omega0 * span;
    const double c_x = drive_field(0.5 * (t_from + t_to), p_) * span;  // midpoint-sampled drive
    const double r = std::hypot(c_z, c_x);
    ops::Matrix2 u;
    if (r < 1e-300) {
        u = ops::identity();
    } else {
        u = std::cos(r) * ops::identity() -
            kI * (std::sin(r) / r) * (c_z * ops::sigma_z() + c_x * ops::sigma_x());
    }
    SiteTensor& spin = psi.sites[static_cast<std::size_t>(psi.spin_position)];
    for (int l = 0; l < spin.dl; ++l)
        for (int a = 0; a < 2; ++a)
            for (int r_idx = 0; r_idx < spin.dr; ++r_idx) {
                const Complex v0 = spin.at(l, 0 + 2 * a, r_idx);
                const Complex v1 = spin.at(l, 1 + 2 * a, r_idx);
                spin.at(l, 0 + 2 * a, r_idx) = u(0, 0) * v0 + u(0, 1) * v1;
                spin.at(l, 1 + 2 * a, r_idx) = u(1, 0) * v0 + u(1, 1) * v1;
            }
}

void TebdEngine::apply_bath_half(PurifiedMPS& psi) const {
    for (std::size_t pos = 0; pos < psi.sites.size(); ++pos) {
        if (static_cast<int>(pos) == psi.spin_position) continue;
        const int mode = static_cast<int>(pos) - (static_cast<int>(pos) > psi.spin_position ? 1 : 0);
        const VectorXcd& phase = bath_phase_[static_cast<std::size_t>(mode)];
        SiteTensor& t = psi.sites[pos];
        const int d = static_cast<int>(phase.size());
        for (int l = 0; l < t.dl; ++l)
            for (int a = 0; a < d; ++a)
                for (int n = 0; n < d; ++n)
                    for (int r = 0; r < t.dr; ++r) t.at(l, n + d * a, r) *= phase(n);
    }
}

void TebdEngine::sweep(PurifiedMPS& psi) const {
    const int n_modes = static_cast<int>(psi.sites.size()) - 1;
    for (int i = 0; i < n_modes; ++i) {  // spin rides right
        const int mode = i + 1;
        const int d = dims_[static_cast<std::size_t>(mode)];
        gate_swap_split(psi.sites[static_cast<std::size_t>(i)], psi.sites[static_cast<std::size_t>(i + 1)],
                        gate_spin_left_[static_cast<std::size_t>(mode - 1)], 2, 2, d, d,
                        /*center_right=*/true, cfg_, psi.cumulative_discarded);
        std::swap(psi.phys_dims[static_cast<std::size_t>(i)], psi.phys_dims[static_cast<std::size_t>(i + 1)]);
        psi.spin_position = i + 1;
    }
    for (int i = n_modes; i > 0; --i) {  // and back left
        const int mode = i;
        const int d = dims_[static_cast<std::size_t>(mode)];
        gate_swap_split(psi.sites[static_cast<std::size_t>(i - 1)], psi.sites[static_cast<std::size_t>(i)],
                        gate_spin_right_[static_cast<std::size_t>(mode - 1)], d, d, 2, 2,
                        /*center_right=*/false, cfg_, psi.cumulative_discarded);
        std::swap(psi.phys_dims[static_cast<std::size_t>(i - 1)], psi.phys_dims[static_cast<std::size_t>(i)]);
        psi.spin_position = i - 1;
    }
    if (psi.cumulative_discarded > cfg_.renorm_abort)
        throw TruncationError("TEBD cumulative truncation weight exceeded " +
                                  std::to_string(cfg_.renorm_abort),
                              psi.cumulative_discarded);
}

void TebdEngine::step(PurifiedMPS& psi, double t) const {
    apply_spin_half(psi, t, t + 0.5 * dt_);
    apply_bath_half(psi);
    sweep(psi);
    apply_bath_half(psi);
    apply_spin_half(psi, t + 0.5 * dt_, t + dt_);
}

TnTrajectory tn_run(const DensityMatrix& rho_S0, const DriveParams& p,
                    const DiscretizedBath& bath, double T_B, const TnConfig& cfg) {
    p.validate();
    cfg.validate();
    TnTrajectory out;
    out.t_recurrence = estimate_recurrence_time(bath.modes, T_B);

    PurifiedMPS psi = initial_purified_state(rho_S0, bath, T_B, cfg.gibbs_weight_tol);
    TebdEngine engine(p, bath, cfg.dt, cfg);
    const auto n_steps = static_cast<long>(std::llround(cfg.t_end / cfg.dt));

    auto store = [&](long k) {
        TnSample sample;
        sample.t = static_cast<double>(k) * cfg.dt;
        sample.rho = psi.spin_density_matrix();
        sample.obs = observables(sample.rho, sample.t, p);
        sample.max_bond = psi.max_bond();
        sample.discarded_weight = psi.cumulative_discarded;
        sample.beyond_recurrence = sample.t > out.t_recurrence;
        out.samples.push_back(std::move(sample));
    };
    store(0);
    for (long k = 0; k < n_steps; ++k) {
        engine.step(psi, static_cast<double>(k) * cfg.dt);
        if ((k + 1) % cfg.store_stride == 0 || k + 1 == n_steps) store(k + 1);
    }
    out.cumulative_discarded = psi.cumulative_discarded;
    return out;
}

}  // namespace driven
