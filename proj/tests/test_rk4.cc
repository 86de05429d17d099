#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "iwp/ph.hpp"
#include "iwp/rk4.hpp"
#include "iwp/sim.hpp"

namespace {

using namespace iwp;

const MechParams kMp = MechParams::lab();
const FrictionParams kFp = FrictionParams::lab();

struct Scalar1 {
    double v = 0.0;
    Eigen::Matrix<double, 1, 1> vec() const { return Eigen::Matrix<double, 1, 1>(v); }
    static Scalar1 from_vec(const Eigen::Matrix<double, 1, 1>& x) { return {x(0, 0)}; }
};

TEST(Rk4, ZeroDriftLeavesStateUnchanged) {
    const State x{1.2, -0.4, 3.3};
    const State next = rk4_step([](const State&) { return State{0.0, 0.0, 0.0}; }, x, 0.01);
    EXPECT_EQ(next.phi1, x.phi1);
    EXPECT_EQ(next.omega1, x.omega1);
    EXPECT_EQ(next.omega2, x.omega2);
}

TEST(Rk4, LinearSystemGrowthFactorIsTruncatedExponential) {
    const double lambda = -1.0, dt = 0.005;
    const Scalar1 next =
        rk4_step([&](const Scalar1& s) { return Scalar1{lambda * s.v}; }, Scalar1{1.0}, dt);
    double expected = 0.0, term = 1.0;
    for (int k = 0; k <= 4; ++k) {
        expected += term;
        term *= lambda * dt / (k + 1);
    }
    EXPECT_NEAR(next.v, expected, 1e-12);
}

TEST(Rk4, UndampedFrictionlessPendulumConservesEnergy) {
    const MechParams lossless(kMp.a, kMp.theta1, kMp.theta2, 0.0, 0.0);
    State x{1.0, 0.0, 0.0};
    const double h0 = energy(x, lossless);
    const double dt = 0.005;
    double worst = 0.0;
    for (int k = 0; k < 6000; ++k) {
        x = rk4_step_pendulum(Regime::NonSticking, x, 0.0, lossless, nullptr, dt, k);
        worst = std::max(worst, std::abs(energy(x, lossless) - h0));
    }
    EXPECT_LT(worst / std::abs(h0), 1e-6);
}

TEST(Rk4, NonFiniteResultNamesTheStep) {
    // exploding scalar dynamics reach inf in one big step through the stages
    const State x{1e308, 1e308, 1e308};
    try {
        rk4_step_pendulum(Regime::NonSticking, x, 0.0, kMp, &kFp, 1.0, 42);
        FAIL() << "expected NumericalError";
    } catch (const NumericalError& e) {
        EXPECT_NE(std::string(e.what()).find("42"), std::string::npos);
    }
}

TEST(Rk4Jacobian, IdentityForZeroDrift) {
    Eigen::Vector3d x(0.3, -0.2, 0.9);
    Eigen::Matrix3d f;
    rk4_step_with_jacobian<3>(
        [](const Eigen::Vector3d&) { return Eigen::Vector3d::Zero().eval(); },
        [](const Eigen::Vector3d&) { return Eigen::Matrix3d::Zero().eval(); }, x, f, 0.01);
    EXPECT_LT((f - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Rk4Jacobian, LinearDriftGivesTruncatedMatrixExponential) {
    Eigen::Matrix3d a;
    a << 0, 1, 0, -2, -0.5, 0.1, 0.3, 0, -1;
    const double dt = 0.01;
    Eigen::Vector3d x(1.0, 2.0, -1.0);
    Eigen::Matrix3d f;
    rk4_step_with_jacobian<3>([&](const Eigen::Vector3d& s) { return (a * s).eval(); },
                              [&](const Eigen::Vector3d&) { return a; }, x, f, dt);
    Eigen::Matrix3d expected = Eigen::Matrix3d::Identity();
    Eigen::Matrix3d term = Eigen::Matrix3d::Identity();
    for (int k = 1; k <= 4; ++k) {
        term = (term * a * dt / k).eval();
        expected += term;
    }
    EXPECT_LT((f - expected).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Rk4Jacobian, PendulumStepMatchesFiniteDifferences) {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> angle(-6.0, 6.0), vel(-4.0, 4.0);
    const double dt = 0.005, h = 1e-6;
    for (int i = 0; i < 100; ++i) {
        const State x{angle(rng), vel(rng), vel(rng)};
        for (Regime g : {Regime::NonSticking, Regime::Sticking}) {
            const Eigen::Matrix3d f = pendulum_step_jacobian(g, x, 0.0, kMp, &kFp, dt);
            for (int c = 0; c < 3; ++c) {
                Eigen::Vector3d xp = x.vec(), xm = x.vec();
                xp[c] += h;
                xm[c] -= h;
                const Eigen::Vector3d fd =
                    (rk4_step_pendulum(g, State::from_vec(xp), 0.0, kMp, &kFp, dt).vec() -
                     rk4_step_pendulum(g, State::from_vec(xm), 0.0, kMp, &kFp, dt).vec()) /
                    (2 * h);
                for (int r = 0; r < 3; ++r)
                    EXPECT_NEAR(f(r, c), fd[r], 1e-5 * std::max(1.0, std::abs(fd[r])));
            }
        }
    }
}

}  // namespace
