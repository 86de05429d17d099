#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "iwp/errors.hpp"

namespace iwp {

/// Zero-order-hold discretization A_d = e^{A dt}, G_d = int_0^dt e^{A tau} dtau,
/// computed from the exponential of the augmented matrix [[A, I],[0, 0]].
/// Valid for singular A (A^{-1}(e^{A dt}-I) is not).
template <int N>
void zoh_discretize(const Eigen::Matrix<double, N, N>& a, double dt,
                    Eigen::Matrix<double, N, N>& a_d, Eigen::Matrix<double, N, N>& g_d) {
    Eigen::Matrix<double, 2 * N, 2 * N> aug = Eigen::Matrix<double, 2 * N, 2 * N>::Zero();
    aug.template topLeftCorner<N, N>() = a * dt;
    aug.template topRightCorner<N, N>() = Eigen::Matrix<double, N, N>::Identity() * dt;
    const Eigen::Matrix<double, 2 * N, 2 * N> e = aug.exp();
    a_d = e.template topLeftCorner<N, N>();
    g_d = e.template topRightCorner<N, N>();
}

/// Observability matrix [C; CA; ...; CA^{n-1}].
template <int N>
Eigen::Matrix<double, N, N> observability_matrix(const Eigen::Matrix<double, N, N>& a,
                                                 const Eigen::Matrix<double, 1, N>& c) {
    Eigen::Matrix<double, N, N> obs;
    Eigen::Matrix<double, 1, N> row = c;
    for (int i = 0; i < N; ++i) {
        obs.row(i) = row;
        row = row * a;
    }
    return obs;
}

template <int N>
bool observable(const Eigen::Matrix<double, N, N>& a, const Eigen::Matrix<double, 1, N>& c) {
    Eigen::FullPivLU<Eigen::Matrix<double, N, N>> lu(observability_matrix<N>(a, c));
    return lu.rank() == N;
}

/// Ackermann's formula for an observer gain in extended precision:
/// K = q(A) O^{-1} e_n, where q is the desired characteristic polynomial
/// given by its roots. Places the eigenvalues of (A - K C) at the poles.
///
/// The observability matrix of the weakly coupled wheel channel is badly
/// conditioned (~1e10 at the lab parameters) and dead-beat gains reach 1e7;
/// rounding such a gain to double alone leaves a visible nilpotency defect.
/// Callers that exercise the dead-beat cancellation keep the long double
/// result; everyone else takes the double-rounded view.
template <int N>
Eigen::Matrix<long double, N, 1> place_observer_gain_precise(
    const Eigen::Matrix<double, N, N>& a, const Eigen::Matrix<double, 1, N>& c,
    const Eigen::Matrix<double, N, 1>& poles) {
    using MatX = Eigen::Matrix<long double, N, N>;
    using VecX = Eigen::Matrix<long double, N, 1>;
    if (!observable<N>(a, c)) throw DesignError("place_observer_gain: (A, C) not observable");

    const MatX a_x = a.template cast<long double>();
    MatX obs;
    Eigen::Matrix<long double, 1, N> row = c.template cast<long double>();
    for (int i = 0; i < N; ++i) {
        obs.row(i) = row;
        row = row * a_x;
    }

    MatX q = MatX::Identity();
    for (int i = 0; i < N; ++i)
        q = q * (a_x - static_cast<long double>(poles[i]) * MatX::Identity());

    VecX e_n = VecX::Zero();
    e_n[N - 1] = 1.0L;
    return q * Eigen::FullPivLU<MatX>(obs).solve(e_n);
}

template <int N>
Eigen::Matrix<double, N, 1> place_observer_gain(const Eigen::Matrix<double, N, N>& a,
                                                const Eigen::Matrix<double, 1, N>& c,
                                                const Eigen::Matrix<double, N, 1>& poles) {
    return place_observer_gain_precise<N>(a, c, poles).template cast<double>();
}

/// Gain placing every eigenvalue of (A_d - K_d C) at the origin, making the
/// closed-loop error map nilpotent: the error vanishes after N steps.
template <int N>
Eigen::Matrix<long double, N, 1> deadbeat_observer_gain_precise(
    const Eigen::Matrix<double, N, N>& a_d, const Eigen::Matrix<double, 1, N>& c) {
    return place_observer_gain_precise<N>(a_d, c, Eigen::Matrix<double, N, 1>::Zero());
}

template <int N>
Eigen::Matrix<double, N, 1> deadbeat_observer_gain(const Eigen::Matrix<double, N, N>& a_d,
                                                   const Eigen::Matrix<double, 1, N>& c) {
    return deadbeat_observer_gain_precise<N>(a_d, c).template cast<double>();
}

}  // namespace iwp
