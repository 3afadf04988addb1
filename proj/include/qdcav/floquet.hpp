#pragma once

// Quasi-steady state of the time-periodic master equation by Floquet
// harmonic expansion rho(t) = sum_n rho_n e^{i n delta t} and matrix
// continued fractions.
//
// The harmonics obey the three-term recursion
//   (L0 - i n delta) rho_n + Lplus rho_{n-1} + Lminus rho_{n+1} = 0,
// closed by rho_{+-(N+1)} = 0. Upward and downward ratio matrices
//   S_n = -(L0 - i n delta + Lminus S_{n+1})^{-1} Lplus,   rho_n  = S_n rho_{n-1}
//   T_n = -(L0 + i n delta + Lplus  T_{n+1})^{-1} Lminus,  rho_-n = T_n rho_-(n-1)
// reduce the n = 0 equation to (L0 + Lminus S_1 + Lplus T_1) rho_0 = 0.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string_view>
#include <vector>

#include "qdcav/lindblad.hpp"
#include "qdcav/linalg.hpp"

namespace qdcav {

// Trace-one null vector of `generator`, returned as a density matrix.
inline DensityMatrix steady_state_from_generator(const Mat& generator, int hilbert_dim) {
    auto nv = linalg::null_vector(generator);
    Mat rho = unvectorize(nv.v, hilbert_dim);
    const cplx tr = rho.trace();
    if (std::abs(tr) < 1e-300) throw NumericalError("steady state has zero trace");
    rho /= tr;
    return DensityMatrix(std::move(rho));
}

inline DensityMatrix steady_state_static(const Superoperator& L0) {
    return steady_state_from_generator(L0.matrix(), L0.hilbert_dim());
}

struct FloquetOptions {
    int n_max_harmonics = 8;
    // Largest accepted ||rho_N|| / ||rho_0|| before the truncation is
    // reported as too small.
    double tail_tolerance = 1e-6;
    // Largest accepted scale-free recursion residual, see recursion_residual.
    double residual_tolerance = 1e-8;
};

class FloquetHarmonics {
public:
    FloquetHarmonics() = default;
    FloquetHarmonics(std::vector<Vec> harmonics, int n_max, double delta, int hilbert_dim)
        : harmonics_(std::move(harmonics)), n_max_(n_max), delta_(delta), hilbert_dim_(hilbert_dim) {}

    int n_max_harmonics() const { return n_max_; }
    double delta() const { return delta_; }
    int hilbert_dim() const { return hilbert_dim_; }

    // n in [-n_max, n_max]
    const Vec& operator[](int n) const { return harmonics_.at(static_cast<std::size_t>(n + n_max_)); }
    Mat matrix(int n) const { return unvectorize((*this)[n], hilbert_dim_); }
    DensityMatrix rho0() const { return DensityMatrix(matrix(0)); }

    // Period-averaged <A>, which only sees the zeroth harmonic.
    cplx time_averaged(const Operator& a) const { return expectation(a, rho0()); }

    double tail_ratio() const {
        const double r0 = (*this)[0].norm();
        return std::max((*this)[n_max_].norm(), (*this)[-n_max_].norm()) / r0;
    }

private:
    std::vector<Vec> harmonics_;
    int n_max_ = 0;
    double delta_ = 0.0;
    int hilbert_dim_ = 0;
};

// max_n ||(L0 - i n delta) rho_n + Lplus rho_{n-1} + Lminus rho_{n+1}||
// divided by (||L0|| + N |delta|) ||rho_0||, so that it is independent of
// the rate unit.
inline double recursion_residual(const Liouvillians& L, const FloquetHarmonics& h) {
    const int N = h.n_max_harmonics();
    const Eigen::Index D = L.L0.dim();
    const Vec zero = Vec::Zero(D);
    double worst = 0.0;
    for (int n = -N; n <= N; ++n) {
        Vec r = L.L0.matrix() * h[n] - cplx{0.0, n * h.delta()} * h[n];
        r += L.Lplus.matrix() * (n - 1 >= -N ? h[n - 1] : zero);
        r += L.Lminus.matrix() * (n + 1 <= N ? h[n + 1] : zero);
        worst = std::max(worst, r.norm());
    }
    const double scale = (L.L0.matrix().norm() + N * std::abs(h.delta())) * h[0].norm();
    return worst / scale;
}

namespace detail {

// Ratio matrices R_n for n = N..1:
//   R_n = -(L0 + shift_sign i n delta + couple R_{n+1})^{-1} feed
inline std::vector<Mat> ratio_matrices(const Mat& L0, const Mat& feed, const Mat& couple, double delta,
                                       int N, double shift_sign, const char* name) {
    const Eigen::Index D = L0.rows();
    std::vector<Mat> R(static_cast<std::size_t>(N + 2), Mat::Zero(D, D));
    for (int n = N; n >= 1; --n) {
        Mat a = L0 + couple * R[static_cast<std::size_t>(n + 1)];
        a.diagonal().array() += cplx{0.0, shift_sign * n * delta};
        std::ostringstream ctx;
        ctx << "shifted Liouvillian for " << name << " harmonic n=" << n;
        R[static_cast<std::size_t>(n)] = -linalg::solve_refined(a, feed, ctx.str()).x;
    }
    return R;
}

}  // namespace detail

inline FloquetHarmonics continued_fraction_harmonics(const Liouvillians& L, double delta,
                                                     const FloquetOptions& opt = {}) {
    const int N = opt.n_max_harmonics;
    if (N < 1) throw ConfigError("n_max_harmonics must be >= 1");
    const int d = L.space.dim();
    const Eigen::Index D = L.L0.dim();
    std::vector<Vec> harm(static_cast<std::size_t>(2 * N + 1), Vec::Zero(D));

    if (delta == 0.0) {
        // Probe at the pump frequency: the two drives merge into one static drive.
        const Mat merged = L.L0.matrix() + L.Lplus.matrix() + L.Lminus.matrix();
        harm[static_cast<std::size_t>(N)] = vectorize(steady_state_from_generator(merged, d).matrix());
        return {std::move(harm), N, delta, d};
    }

    const Mat& L0 = L.L0.matrix();
    const Mat& Lp = L.Lplus.matrix();
    const Mat& Lm = L.Lminus.matrix();
    const auto S = detail::ratio_matrices(L0, Lp, Lm, delta, N, -1.0, "upward");
    const auto T = detail::ratio_matrices(L0, Lm, Lp, delta, N, +1.0, "downward");

    const Mat reduced = L0 + Lm * S[1] + Lp * T[1];
    const DensityMatrix rho0 = steady_state_from_generator(reduced, d);
    harm[static_cast<std::size_t>(N)] = vectorize(rho0.matrix());
    for (int n = 1; n <= N; ++n) {
        harm[static_cast<std::size_t>(N + n)] = S[static_cast<std::size_t>(n)] * harm[static_cast<std::size_t>(N + n - 1)];
        harm[static_cast<std::size_t>(N - n)] = T[static_cast<std::size_t>(n)] * harm[static_cast<std::size_t>(N - n + 1)];
    }
    FloquetHarmonics h(std::move(harm), N, delta, d);

    if (const double tail = h.tail_ratio(); tail > opt.tail_tolerance) {
        std::ostringstream os;
        os << "harmonic tail not decayed: ||rho_" << N << "||/||rho_0|| = " << tail
           << " exceeds " << opt.tail_tolerance << "; increase n_max_harmonics";
        throw NumericalError(os.str());
    }
    if (const double res = recursion_residual(L, h); res > opt.residual_tolerance) {
        std::ostringstream os;
        os << "Floquet recursion residual " << res << " exceeds " << opt.residual_tolerance;
        throw NumericalError(os.str());
    }
    return h;
}

// Like continued_fraction_harmonics, but doubles n_max_harmonics (up to
// n_cap) while the only failure is an undecayed tail. Small |delta| needs
// more harmonics, roughly until n |delta| exceeds the QD linewidth.
inline FloquetHarmonics adaptive_harmonics(const Liouvillians& L, double delta, FloquetOptions opt,
                                           int n_cap = 128) {
    for (;;) {
        try {
            return continued_fraction_harmonics(L, delta, opt);
        } catch (const NumericalError& e) {
            const bool tail = std::string_view(e.what()).starts_with("harmonic tail");
            if (!tail || opt.n_max_harmonics >= n_cap) throw;
            opt.n_max_harmonics = std::min(2 * opt.n_max_harmonics, n_cap);
        }
    }
}

// rho(t) = sum_n rho_n e^{i n delta t}
inline DensityMatrix reconstruct_state(const FloquetHarmonics& h, double t) {
    const int N = h.n_max_harmonics();
    Vec acc = Vec::Zero(h[0].size());
    for (int n = -N; n <= N; ++n) acc += std::polar(1.0, n * h.delta() * t) * h[n];
    return DensityMatrix(unvectorize(acc, h.hilbert_dim()));
}

}  // namespace qdcav
