#include <gtest/gtest.h>

#include "qdcav/dynamics.hpp"
#include "qdcav/floquet.hpp"
#include "support/oracles.hpp"

using namespace qdcav;

namespace {

SystemParams driven(double j1_ghz, double j2_ghz, double delta_ghz) {
    SystemParams p = SystemParams::reference_defaults();
    p.J1 = ghz(j1_ghz);
    p.J2 = ghz(j2_ghz);
    p.delta = ghz(delta_ghz);
    return p;
}

double rel_diff(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST(SteadyStateStatic, GroundVacuumWithoutFeeding) {
    SystemParams p = SystemParams::reference_defaults();
    p.gamma_r = 0.0;
    const auto s = make_space(2);
    const DensityMatrix rho = steady_state_static(build_liouvillians(p, s).L0);
    EXPECT_LT(trace_distance(rho, basis_state(s, 0, 0)), 1e-10);
}

TEST(SteadyStateStatic, SaturationBound) {
    const auto s = make_space(2);
    double last = 0.0;
    for (double j1 : {5.0, 50.0, 500.0}) {
        const DensityMatrix rho = steady_state_static(build_liouvillians(driven(j1, 0, 0), s).L0);
        const double pop = expectation(qd_population(s), rho).real();
        EXPECT_GT(pop, 0.0);
        EXPECT_LE(pop, 0.5 + 1e-9);
        EXPECT_GT(pop, last);
        last = pop;
        EXPECT_TRUE(rho.is_physical(1e-9));
    }
    EXPECT_GT(last, 0.49);
}

TEST(SteadyStateStatic, UndrivenCavityStaysEmpty) {
    const auto s = make_space(2);
    const SystemParams p = SystemParams::reference_defaults();  // J1 = J2 = 0, gamma_r > 0, n_bar = 1
    const DensityMatrix rho = steady_state_static(build_liouvillians(p, s).L0);
    EXPECT_LT(std::abs(expectation(cavity_number(s), rho)), 1e-12);
    // independent check: long evolution from a state with a photon and an exciton
    const double t = 30.0 / p.gamma;
    const Trajectory tr = integrate(p, s, basis_state(s, 1, 1), t, max_stable_dt(p),
                                    IntegrateOptions{0.0, std::numeric_limits<int>::max(), 1e-6});
    EXPECT_LT(expectation(cavity_number(s), tr.states.back()).real(), 1e-10);
}

TEST(SteadyStateStatic, DegenerateNullSpaceReported) {
    const SystemParams p;  // everything zero: every diagonal state is stationary
    EXPECT_THROW(steady_state_static(build_liouvillians(p, make_space(1)).L0), NumericalError);
}

TEST(Harmonics, NoProbeIsStatic) {
    const SystemParams p = driven(5, 0, 7);
    const auto L = build_liouvillians(p, make_space(2));
    const FloquetHarmonics h = continued_fraction_harmonics(L, p.delta, FloquetOptions{});
    for (int n = 1; n <= h.n_max_harmonics(); ++n) {
        EXPECT_EQ(h[n].norm(), 0.0);
        EXPECT_EQ(h[-n].norm(), 0.0);
    }
    EXPECT_LT(trace_distance(h.rho0(), steady_state_static(L.L0)), 1e-12);
}

TEST(Harmonics, MatchesDirectBlockSolve) {
    for (const auto& p : {driven(2, 0.2, 10), driven(8, 1, -25), driven(15, 3, 4)}) {
        const auto L = build_liouvillians(p, make_space(2));
        FloquetOptions o;
        o.n_max_harmonics = 16;
        const FloquetHarmonics h = continued_fraction_harmonics(L, p.delta, o);
        const auto ref = oracle::harmonics_direct(L, p.delta, 16);
        for (int n = -4; n <= 4; ++n)
            EXPECT_LT((h[n] - ref[static_cast<std::size_t>(n + 16)]).norm(), 1e-9 * ref[16].norm()) << "n = " << n;
    }
}

TEST(Harmonics, ReconstructionMatchesTimeIntegration) {
    const SystemParams p = driven(2, 0.2, 10);
    const auto s = make_space(2);
    const auto L = build_liouvillians(p, s);
    FloquetOptions o;
    o.n_max_harmonics = 8;
    const FloquetHarmonics h = continued_fraction_harmonics(L, p.delta, o);

    const double period = two_pi / p.delta;
    const double slow = std::min({p.kappa, p.gamma + p.gamma_d});
    const double settle = std::ceil(50.0 / slow / period) * period;  // whole periods: phase of t = 0
    IntegrateOptions warm;
    warm.sample_every = std::numeric_limits<int>::max();
    const double dt = max_stable_dt(p);
    const Trajectory tr0 = integrate(p, s, basis_state(s, 0, 0), settle, dt, warm);
    DensityMatrix rho = tr0.states.back();
    double t = settle;
    for (int k = 0; k < 16; ++k) {
        const double tk = period * k / 16.0;
        EXPECT_LT(trace_distance(reconstruct_state(h, tk), rho), 1e-6) << "k = " << k;
        IntegrateOptions seg;
        seg.t0 = t;
        seg.sample_every = std::numeric_limits<int>::max();
        rho = integrate(p, s, rho, period / 16.0, dt, seg).states.back();
        t += period / 16.0;
    }
}

TEST(Harmonics, FirstHarmonicLinearInProbe) {
    const auto s = make_space(2);
    std::vector<double> ratio;
    for (double j2 : {0.025, 0.05, 0.1}) {
        const SystemParams p = driven(2, j2, 10);
        const FloquetHarmonics h = continued_fraction_harmonics(build_liouvillians(p, s), p.delta, FloquetOptions{});
        ratio.push_back(h[1].norm() / h[0].norm() / j2);
    }
    EXPECT_NEAR(ratio[1] / ratio[0], 1.0, 1e-3);
    EXPECT_NEAR(ratio[2] / ratio[0], 1.0, 1e-3);
    // next correction is O(J2^2), so the two deviations stand in ratio 5
    const double d1 = ratio[1] / ratio[0] - 1.0, d2 = ratio[2] / ratio[0] - 1.0;
    EXPECT_NEAR(d2 / d1, 5.0, 0.5);
}

TEST(Harmonics, Invariants) {
    for (const auto& p : {driven(2, 0.2, 10), driven(8, 1, 3), driven(12, 2, -40)}) {
        const auto L = build_liouvillians(p, make_space(2));
        const FloquetHarmonics h = adaptive_harmonics(L, p.delta, FloquetOptions{});
        EXPECT_NEAR(h.rho0().trace().real(), 1.0, 1e-9);
        for (int n = 1; n <= h.n_max_harmonics(); ++n)
            EXPECT_LT((h.matrix(-n) - h.matrix(n).adjoint()).cwiseAbs().maxCoeff(), 1e-9);
        EXPECT_LE(recursion_residual(L, h), 1e-8);
        EXPECT_LE(h.tail_ratio(), 1e-6);
    }
}

TEST(Harmonics, TruncationStable) {
    const auto s = make_space(2);
    for (const auto& p : {driven(5, 1, 10), driven(10, 2, -6), driven(15, 3, 30)}) {
        const auto L = build_liouvillians(p, s);
        FloquetOptions o;
        const FloquetHarmonics h = adaptive_harmonics(L, p.delta, o);
        o.n_max_harmonics = 2 * h.n_max_harmonics();
        const FloquetHarmonics h2 = continued_fraction_harmonics(L, p.delta, o);
        EXPECT_LT(rel_diff(h.time_averaged(cavity_number(s)), h2.time_averaged(cavity_number(s))), 1e-8);
    }
}

TEST(Harmonics, TooFewHarmonicsReported) {
    const SystemParams p = driven(5, 1, 0.01);
    const auto L = build_liouvillians(p, make_space(1));
    FloquetOptions o;
    o.n_max_harmonics = 1;
    EXPECT_THROW(continued_fraction_harmonics(L, p.delta, o), NumericalError);
    EXPECT_THROW(continued_fraction_harmonics(L, p.delta, FloquetOptions{0}), ConfigError);
}

TEST(Harmonics, ZeroDetuningMergesDrives) {
    const auto s = make_space(2);
    const SystemParams p = driven(5, 1, 0);
    const FloquetHarmonics h = adaptive_harmonics(build_liouvillians(p, s), 0.0, FloquetOptions{});
    SystemParams merged = p;
    merged.J1 = p.J1 + p.J2;
    merged.J2 = 0.0;
    EXPECT_LT(trace_distance(h.rho0(), steady_state_static(build_liouvillians(merged, s).L0)), 1e-10);
}

TEST(Reconstruct, PeriodicAndAveraged) {
    const SystemParams p = driven(8, 1.5, 6);
    const auto s = make_space(2);
    const FloquetHarmonics h = adaptive_harmonics(build_liouvillians(p, s), p.delta, FloquetOptions{});
    const double period = two_pi / p.delta;

    Mat sum = Mat::Zero(s.dim(), s.dim());
    for (int n = -h.n_max_harmonics(); n <= h.n_max_harmonics(); ++n) sum += h.matrix(n);
    EXPECT_LT((reconstruct_state(h, 0.0).matrix() - sum).cwiseAbs().maxCoeff(), 1e-14);

    const int m = 64;
    cplx avg{0.0, 0.0};
    for (int k = 0; k < m; ++k) {
        const double t = 0.37 * period + period * k / m;
        const DensityMatrix a = reconstruct_state(h, t), b = reconstruct_state(h, t + period);
        EXPECT_LT((a.matrix() - b.matrix()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((a.matrix() - a.matrix().adjoint()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_NEAR(a.trace().real(), 1.0, 1e-9);
        EXPECT_GE(a.min_eigenvalue(), -1e-6);
        avg += expectation(cavity_number(s), a);
    }
    // the uniform rule is exact for trigonometric polynomials of degree < m
    EXPECT_LT(rel_diff(avg / double(m), h.time_averaged(cavity_number(s))), 1e-10);
}

TEST(Harmonics, AgreesWithBruteForceAverages) {
    const SystemParams p = driven(5, 1, 3);
    const auto s = make_space(2);
    const FloquetHarmonics h = adaptive_harmonics(build_liouvillians(p, s), p.delta, FloquetOptions{});
    const std::vector<Operator> ops{cavity_number(s), qd_population(s), annihilation(s), qd_lowering(s)};
    const double settle = 40.0 / std::min(p.kappa, p.gamma);
    const auto ref = oracle::time_averaged_by_evolution(p, s, ops, settle, max_stable_dt(p));
    for (std::size_t k = 0; k < ops.size(); ++k)
        EXPECT_LT(std::abs(h.time_averaged(ops[k]) - ref[k]), 1e-6) << ops[k].label();
}
