// ops.hpp — Pauli operators and small helpers for 2x2 complex matrices

#pragma once

#include <complex>

#include <Eigen/Dense>

namespace driven::ops {

using Complex = std::complex<double>;
using Matrix2 = Eigen::Matrix2cd;
using Vector2 = Eigen::Vector2cd;

inline Matrix2 identity() { return Matrix2::Identity(); }

inline Matrix2 sigma_x() {
    Matrix2 m;
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline Matrix2 sigma_y() {
    Matrix2 m;
    m << Complex(0.0, 0.0), Complex(0.0, -1.0), Complex(0.0, 1.0), Complex(0.0, 0.0);
    return m;
}

inline Matrix2 sigma_z() {
    Matrix2 m;
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

// sigma_+ = |e><g| with |e> = (1,0), |g> = (0,1)
inline Matrix2 sigma_plus() {
    Matrix2 m;
    m << 0.0, 1.0, 0.0, 0.0;
    return m;
}

inline Matrix2 sigma_minus() {
    Matrix2 m;
    m << 0.0, 0.0, 1.0, 0.0;
    return m;
}

template <typename A, typename B>
inline Matrix2 commutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return a * b - b * a;
}

template <typename A, typename B>
inline Matrix2 anticommutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return a * b + b * a;
}

// D[L] rho = L rho L^dag - 1/2 {L^dag L, rho}
template <typename L, typename R>
inline Matrix2 dissipator(const Eigen::MatrixBase<L>& l, const Eigen::MatrixBase<R>& rho) {
    const Matrix2 ldl = l.adjoint() * l;
    return l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
}

template <typename M>
inline double max_abs(const Eigen::MatrixBase<M>& m) {
    return m.cwiseAbs().maxCoeff();
}

// Eigenvalues of a Hermitian 2x2 matrix, ascending.
inline std::pair<double, double> hermitian_eigenvalues(const Matrix2& m) {
    const double a = m(0, 0).real();
    const double b = m(1, 1).real();
    const double half_trace = 0.5 * (a + b);
    const double r = std::sqrt(0.25 * (a - b) * (a - b) + std::norm(m(0, 1)));
    return {half_trace - r, half_trace + r};
}

inline double min_eigenvalue(const Matrix2& m) { return hermitian_eigenvalues(m).first; }

}  // namespace driven::ops
