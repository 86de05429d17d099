#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "iwp/ekf.hpp"
#include "iwp/sim.hpp"

namespace {

using namespace iwp;

const MechParams kMp = MechParams::lab();
const FrictionParams kFp = FrictionParams::lab();

Eigen::Matrix3d lab_p0() {
    return Eigen::Vector3d(0.00165, 0.01, 0.1).asDiagonal();
}
Eigen::Matrix3d lab_q() {
    return Eigen::Vector3d(0.0, 0.01, 0.1).asDiagonal();
}

TEST(KalmanCore, ZeroInnovationLeavesMeanUnchanged) {
    kalman::Belief<3> b{Eigen::Vector3d(0.4, -1.0, 2.0), lab_p0()};
    Eigen::Matrix<double, 1, 3> h;
    h << 1.0, 0.0, 0.0;
    const Eigen::Vector3d before = b.x;
    kalman::update<3>(b, h, 0.001, before[0]);
    EXPECT_EQ(b.x[0], before[0]);
    EXPECT_EQ(b.x[1], before[1]);
    EXPECT_EQ(b.x[2], before[2]);
}

TEST(KalmanCore, ZeroDriftZeroNoisePredictionKeepsCovariance) {
    kalman::Belief<3> b{Eigen::Vector3d::Zero(), lab_p0()};
    const Eigen::Matrix3d before = b.p;
    kalman::predict<3>(
        b, [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero().eval(); },
        [](const Eigen::Vector3d&) { return Eigen::Matrix3d::Zero().eval(); },
        Eigen::Matrix3d::Zero(), 0.005);
    EXPECT_LT((b.p - before).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(KalmanCore, ScalarLinearSystemMatchesTextbookRecursion) {
    // Straight-line recursion with the same one-step factor the RK4 map
    // produces for xdot = lambda x.
    const double lambda = -0.7, dt = 0.005, q = 0.03, r = 0.01;
    double f = 0.0, term = 1.0;
    for (int k = 0; k <= 4; ++k) {
        f += term;
        term *= lambda * dt / (k + 1);
    }

    kalman::Belief<1> b;
    b.x << 1.4;
    b.p << 0.5;
    double x_ref = 1.4, p_ref = 0.5;

    std::mt19937 rng(5);
    std::normal_distribution<double> meas(0.0, 0.3);
    Eigen::Matrix<double, 1, 1> h, q_mat;
    h << 1.0;
    q_mat << q;
    for (int k = 0; k < 200; ++k) {
        const double y = meas(rng);
        kalman::predict<1>(
            b,
            [&](const Eigen::Matrix<double, 1, 1>& s) {
                return Eigen::Matrix<double, 1, 1>(lambda * s(0, 0));
            },
            [&](const Eigen::Matrix<double, 1, 1>&) {
                return Eigen::Matrix<double, 1, 1>(lambda);
            },
            q_mat, dt);
        kalman::update<1>(b, h, r, y);

        x_ref = f * x_ref;
        p_ref = f * p_ref * f + q;
        const double gain = p_ref / (p_ref + r);
        x_ref += gain * (y - x_ref);
        p_ref -= gain * p_ref;

        ASSERT_NEAR(b.x(0, 0), x_ref, 1e-12);
        ASSERT_NEAR(b.p(0, 0), p_ref, 1e-12);
    }
}

TEST(KalmanCore, HugeMeasurementVarianceMakesUpdateNoOp) {
    kalman::Belief<3> b{Eigen::Vector3d(0.4, -1.0, 2.0), lab_p0()};
    Eigen::Matrix<double, 1, 3> h;
    h << 1.0, 0.0, 0.0;
    const Eigen::Vector3d before = b.x;
    const Eigen::Matrix3d p_before = b.p;
    kalman::update<3>(b, h, 1e30, before[0] + 5.0);
    EXPECT_LT((b.x - before).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((b.p - p_before).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EkfJacobian, MatchesFiniteDifferencesBothRegimes) {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> angle(-6.0, 6.0), vel(-4.0, 4.0);
    const double dt = 0.005, h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        const State x{angle(rng), vel(rng), vel(rng)};
        for (Regime g : {Regime::NonSticking, Regime::Sticking}) {
            const Eigen::Matrix3d f = ekf_jacobian(g, x, 0.0, kMp, kFp, dt);
            for (int c = 0; c < 3; ++c) {
                Eigen::Vector3d xp = x.vec(), xm = x.vec();
                xp[c] += h;
                xm[c] -= h;
                const Eigen::Vector3d fd =
                    (rk4_step_pendulum(g, State::from_vec(xp), 0.0, kMp, &kFp, dt).vec() -
                     rk4_step_pendulum(g, State::from_vec(xm), 0.0, kMp, &kFp, dt).vec()) /
                    (2 * h);
                for (int r = 0; r < 3; ++r)
                    ASSERT_NEAR(f(r, c), fd[r], 1e-5 * std::max(1.0, std::abs(fd[r])));
            }
        }
    }
}

TEST(PendulumEkf, CovarianceStaysSymmetricPsdOverDropDown) {
    SimConfig cfg;
    cfg.x0 = {0.01, 0.0, 0.0};
    cfg.t_end = 30.0;
    const RegimeTrace trace = simulate(cfg, kMp, kFp);

    PendulumEkf ekf(kMp, kFp, {-M_PI / 10, 1.0, 1.0}, lab_p0(), lab_q(), 0.001);
    for (std::size_t k = 1; k < trace.size(); ++k) {
        ekf.step(trace[k - 1].regime, trace[k - 1].u, trace[k].y, 0.005);
        const Eigen::Matrix3d& p = ekf.covariance();
        ASSERT_LT((p - p.transpose()).cwiseAbs().maxCoeff(), 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(p);
        ASSERT_GT(eig.eigenvalues().minCoeff(), -1e-10);
    }
}

TEST(PendulumEkf, TracksTruthWhenStartedOnIt) {
    // Noise-free measurements, ground-truth regime sequence, wheel estimate
    // projected on capture like the plant does.
    SimConfig cfg;
    cfg.x0 = {0.01, 0.0, 0.0};
    cfg.t_end = 30.0;
    const RegimeTrace trace = simulate(cfg, kMp, kFp);

    PendulumEkf ekf(kMp, kFp, trace[0].x, lab_p0(), lab_q(), 0.001,
                    WheelStickPolicy::Zero);
    double worst = 0.0;
    for (std::size_t k = 1; k < trace.size(); ++k) {
        const State est = ekf.step(trace[k - 1].regime, trace[k - 1].u, trace[k].y, 0.005);
        const bool capture = trace[k - 1].regime == Regime::NonSticking &&
                             trace[k].regime == Regime::Sticking;
        if (capture) continue;  // plant projects the wheel, observer follows a step later
        worst = std::max(worst, (est.vec() - trace[k].x.vec()).cwiseAbs().maxCoeff());
    }
    EXPECT_LT(worst, 1e-9);
}

TEST(PendulumEkf, RejectsBadMeasurementVariance) {
    EXPECT_THROW(PendulumEkf(kMp, kFp, State{}, lab_p0(), lab_q(), 0.0), InputError);
}

TEST(PendulumEkf, DivergesLoudly) {
    PendulumEkf ekf(kMp, kFp, State{}, lab_p0(), lab_q(), 0.001);
    EXPECT_THROW(ekf.step(Regime::NonSticking, 0.0, std::nan(""), 0.005), NumericalError);
}

}  // namespace
