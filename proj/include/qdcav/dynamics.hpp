#pragma once

// Brute-force time-domain integration of the full periodically driven
// master equation, two-time cavity correlations by quantum regression, and
// emission spectra by one-sided Fourier transform.
//
// This path shares nothing with the Floquet recursion beyond the
// Liouvillian matrices, which makes it usable as an oracle for it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <vector>

#include "qdcav/floquet.hpp"
#include "qdcav/lindblad.hpp"

namespace qdcav {

// Largest accepted fixed RK4 step: 0.05 / (fastest scale of the problem).
inline double max_stable_dt(const SystemParams& p) {
    const double fastest = std::max({p.kappa, p.gamma + p.gamma_d, std::abs(p.J1), std::abs(p.delta_dc),
                                     std::abs(p.delta_dc - p.delta_pump), std::abs(p.delta_pump),
                                     std::abs(p.delta), std::abs(p.g), p.J2, p.gamma_r * (p.n_bar + 1.0)});
    if (!(fastest > 0.0)) throw ConfigError("cannot choose a time step: all rates are zero");
    return 0.05 / fastest;
}

// Classical RK4 for a batch of column vectors y_k with generator
//   L0 + e^{i delta (t_k + t)} Lplus + e^{-i delta (t_k + t)} Lminus,
// where t_k is a per-column phase offset.
class PeriodicRk4 {
public:
    PeriodicRk4(const Liouvillians& L, double delta, std::vector<double> offsets)
        : L_(L), delta_(delta), offsets_(std::move(offsets)) {
        driven_ = L.Lplus.matrix().cwiseAbs().maxCoeff() > 0.0 || L.Lminus.matrix().cwiseAbs().maxCoeff() > 0.0;
        const Eigen::Index D = L.L0.dim();
        const auto K = static_cast<Eigen::Index>(offsets_.size());
        k1_.resize(D, K);
        k2_.resize(D, K);
        k3_.resize(D, K);
        k4_.resize(D, K);
        tmp_.resize(D, K);
        bp_.resize(D, K);
        bm_.resize(D, K);
    }

    void step(Mat& y, double t, double h) {
        derivative(y, t, k1_);
        tmp_ = y + (0.5 * h) * k1_;
        derivative(tmp_, t + 0.5 * h, k2_);
        tmp_ = y + (0.5 * h) * k2_;
        derivative(tmp_, t + 0.5 * h, k3_);
        tmp_ = y + h * k3_;
        derivative(tmp_, t + h, k4_);
        y += (h / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }

private:
    void derivative(const Mat& y, double t, Mat& out) {
        out.noalias() = L_.L0.matrix() * y;
        if (!driven_) return;
        bp_.noalias() = L_.Lplus.matrix() * y;
        bm_.noalias() = L_.Lminus.matrix() * y;
        for (Eigen::Index k = 0; k < y.cols(); ++k) {
            const cplx ep = std::polar(1.0, delta_ * (offsets_[static_cast<std::size_t>(k)] + t));
            out.col(k) += ep * bp_.col(k) + std::conj(ep) * bm_.col(k);
        }
    }

    const Liouvillians& L_;
    double delta_;
    std::vector<double> offsets_;
    bool driven_ = true;
    Mat k1_, k2_, k3_, k4_, tmp_, bp_, bm_;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    std::uint64_t params_hash = 0;
    double max_trace_drift = 0.0;  // max |tr rho - 1| before renormalization
    double dt = 0.0;               // step actually used
};

struct IntegrateOptions {
    double t0 = 0.0;        // absolute start time (sets the probe phase)
    int sample_every = 1;   // store every k-th step (the final state is always stored)
    double abort_tolerance = 1e-6;
};

// Fixed-step RK4 from rho0 at t0 to t0 + t_end. The requested dt is reduced
// so that an integer number of steps lands exactly on t_end.
inline Trajectory integrate(const SystemParams& p, const HilbertSpace& space, const DensityMatrix& rho0,
                            double t_end, double dt, const IntegrateOptions& opt = {}) {
    if (!(t_end > 0.0)) throw ConfigError("integrate: t_end must be positive");
    const double dt_max = max_stable_dt(p);
    if (!(dt > 0.0) || dt > dt_max * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "integrate: step " << dt << " s rejected, stability bound is " << dt_max << " s";
        throw ConfigError(os.str());
    }
    if (rho0.dim() != space.dim()) throw DimensionError("integrate: initial state has wrong dimension");
    const auto steps = static_cast<std::int64_t>(std::ceil(t_end / dt - 1e-9));
    const double h = t_end / static_cast<double>(steps);

    const Liouvillians L = build_liouvillians(p, space);
    PeriodicRk4 rk(L, p.delta, {opt.t0});
    Mat y = vectorize(rho0.matrix());

    Trajectory traj;
    traj.params_hash = p.hash();
    traj.dt = h;
    const int d = space.dim();
    auto record = [&](double t) {
        Mat rho = unvectorize(y.col(0), d);
        const cplx tr = rho.trace();
        const double drift = std::abs(tr - cplx{1.0, 0.0});
        traj.max_trace_drift = std::max(traj.max_trace_drift, drift);
        const double herm = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
        if (drift > opt.abort_tolerance || herm > opt.abort_tolerance || !rho.allFinite()) {
            std::ostringstream os;
            os << "integrate: invariant violation at t = " << t << " s (trace drift " << drift
               << ", hermiticity error " << herm << ")";
            throw NumericalError(os.str());
        }
        traj.times.push_back(opt.t0 + t);
        traj.states.emplace_back(rho / tr);
    };
    record(0.0);
    for (std::int64_t s = 1; s <= steps; ++s) {
        rk.step(y, static_cast<double>(s - 1) * h, h);
        if (s % opt.sample_every == 0 || s == steps) record(static_cast<double>(s) * h);
    }
    return traj;
}

// Period averages of <A_k> by direct integration: evolve |g,0><g,0| for
// t_settle, then Simpson-average over one probe period 2 pi / |delta| (or
// over 1 / kappa when delta = 0).
inline std::vector<cplx> period_averaged_expectations(const SystemParams& p, const HilbertSpace& space,
                                                      const std::vector<Operator>& ops, double t_settle,
                                                      double dt) {
    if (!(t_settle > 0.0)) throw ConfigError("period average: settle time must be > 0");
    IntegrateOptions settle;
    settle.sample_every = std::numeric_limits<int>::max();
    const Trajectory warm = integrate(p, space, basis_state(space, 0, 0), t_settle, dt, settle);

    const double period = p.delta != 0.0 ? two_pi / std::abs(p.delta) : 1.0 / p.kappa;
    auto steps = static_cast<std::int64_t>(std::ceil(period / dt - 1e-9));
    if (steps % 2 != 0) ++steps;
    IntegrateOptions avg;
    avg.t0 = t_settle;
    const Trajectory tr =
        integrate(p, space, warm.states.back(), period, period / static_cast<double>(steps), avg);
    if (tr.states.size() != static_cast<std::size_t>(steps + 1))
        throw NumericalError("period average: unexpected sample count");

    std::vector<cplx> acc(ops.size(), cplx{0.0, 0.0});
    for (std::size_t i = 0; i < tr.states.size(); ++i) {
        const double w = (i == 0 || i + 1 == tr.states.size()) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        for (std::size_t k = 0; k < ops.size(); ++k) acc[k] += w * expectation(ops[k], tr.states[i]);
    }
    for (auto& v : acc) v /= 3.0 * static_cast<double>(steps);
    return acc;
}

struct CorrelationOptions {
    double tau_max = 0.0;   // <= 0: 10 / min(kappa, gamma)
    int n_phase = 8;
    double dt = 0.0;        // <= 0: max_stable_dt
    double decay_tolerance = 1e-4;
    // Start from (a - <a>) rho so the coherent, non-decaying part of
    // <a^dag(t+tau) a(t)> (delta lines at the drive harmonics) is removed.
    // Identical to a rho whenever <a> = 0, e.g. for g = 0.
    bool subtract_coherent = true;
};

inline double default_tau_max(const SystemParams& p) {
    double slow = 0.0;
    for (double r : {p.kappa, p.gamma})
        if (r > 0.0) slow = slow > 0.0 ? std::min(slow, r) : r;
    if (!(slow > 0.0)) throw ConfigError("default tau_max needs kappa > 0 or gamma > 0");
    return 10.0 / slow;
}

// Phase-averaged <a^dag(t + tau) a(t)> on a uniform tau grid with an even
// number of intervals.
struct CorrelationFunction {
    std::vector<double> taus;
    std::vector<cplx> values;
    int averaging_count = 0;
    double dt = 0.0;

    double peak_magnitude() const {
        double m = 0.0;
        for (const auto& v : values) m = std::max(m, std::abs(v));
        return m;
    }
    bool decayed(double tol) const {
        const double peak = peak_magnitude();
        return peak == 0.0 || std::abs(values.back()) <= tol * peak;
    }
};

inline CorrelationFunction correlation(const SystemParams& p, const Liouvillians& L, const FloquetHarmonics& h,
                                       const CorrelationOptions& opt = {}) {
    if (opt.n_phase < 1) throw ConfigError("n_phase must be >= 1");
    const double tau_max = opt.tau_max > 0.0 ? opt.tau_max : default_tau_max(p);
    const double dt_max = max_stable_dt(p);
    const double dt_req = opt.dt > 0.0 ? opt.dt : dt_max;
    if (dt_req > dt_max * (1.0 + 1e-12)) {
        std::ostringstream os;
        os << "correlation: step " << dt_req << " s rejected, stability bound is " << dt_max << " s";
        throw ConfigError(os.str());
    }
    auto steps = static_cast<std::int64_t>(std::ceil(tau_max / dt_req - 1e-9));
    if (steps % 2 != 0) ++steps;
    const double step = tau_max / static_cast<double>(steps);

    const bool periodic = p.J2 != 0.0 && h.delta() != 0.0;
    const int columns = periodic ? opt.n_phase : 1;
    const double period = periodic ? two_pi / std::abs(h.delta()) : 0.0;

    const HilbertSpace& space = L.space;
    const Mat a = annihilation(space).matrix();
    std::vector<double> offsets(static_cast<std::size_t>(columns));
    Mat y(L.L0.dim(), columns);
    for (int k = 0; k < columns; ++k) {
        const double tk = period * k / columns;
        offsets[static_cast<std::size_t>(k)] = tk;
        const Mat rho = reconstruct_state(h, tk).matrix();
        Mat m = a * rho;
        if (opt.subtract_coherent) m -= m.trace() * rho;
        y.col(k) = vectorize(m);
    }
    // tr(a^dag M) = sum_ij (a^dag)_ij M_ji = vec((a^dag)^T) . vec(M)
    const Eigen::RowVectorXcd probe = vectorize(Mat(a.adjoint().transpose())).transpose();

    CorrelationFunction G;
    G.averaging_count = opt.n_phase;
    G.dt = step;
    G.taus.reserve(static_cast<std::size_t>(steps + 1));
    G.values.reserve(static_cast<std::size_t>(steps + 1));
    auto record = [&](double tau) {
        const Eigen::RowVectorXcd per_phase = probe * y;
        cplx acc{0.0, 0.0};
        for (Eigen::Index k = 0; k < per_phase.size(); ++k) acc += per_phase(k);  // fixed order
        G.taus.push_back(tau);
        G.values.push_back(acc / static_cast<double>(columns));
    };

    PeriodicRk4 rk(L, h.delta(), std::move(offsets));
    record(0.0);
    for (std::int64_t s = 1; s <= steps; ++s) {
        rk.step(y, static_cast<double>(s - 1) * step, step);
        record(static_cast<double>(s) * step);
    }
    if (!G.decayed(opt.decay_tolerance)) {
        std::ostringstream os;
        os << "correlation not decayed at tau_max = " << tau_max << " s: |G(tau_max)|/max|G| = "
           << std::abs(G.values.back()) / G.peak_magnitude() << " > " << opt.decay_tolerance;
        throw NumericalError(os.str());
    }
    return G;
}

struct FrequencyGrid {
    double lo = 0.0;
    double hi = 0.0;
    double spacing = 0.0;

    std::vector<double> points() const {
        if (!(spacing > 0.0) || hi < lo) throw ConfigError("invalid frequency grid");
        const auto n = static_cast<std::int64_t>(std::floor((hi - lo) / spacing + 1e-9));
        std::vector<double> out;
        out.reserve(static_cast<std::size_t>(n + 1));
        for (std::int64_t i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * spacing);
        return out;
    }
};

// [Delta - 10 kappa, Delta + 10 kappa] in the pump frame, spacing kappa / 20.
inline FrequencyGrid default_spectrum_grid(const SystemParams& p) {
    const double c = p.cavity_frame_frequency();
    return {c - 10.0 * p.kappa, c + 10.0 * p.kappa, p.kappa / 20.0};
}

struct Spectrum {
    std::vector<double> freqs;
    std::vector<double> values;
    double resolution = 0.0;
};

// Re int_0^tau_max G(tau) e^{-i omega tau} d tau, composite Simpson rule.
inline double spectrum_at(const CorrelationFunction& G, double omega) {
    const std::size_t n = G.values.size();
    if (n < 3 || (n - 1) % 2 != 0) throw ConfigError("spectrum: correlation grid needs an even number of intervals");
    const cplx rot = std::polar(1.0, -omega * G.dt);
    cplx phase{1.0, 0.0};
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        // Periodically resynchronize the running phase to bound round-off.
        if (i % 256 == 0) phase = std::polar(1.0, -omega * G.taus[i]);
        const double w = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * G.values[i] * phase;
        phase *= rot;
    }
    return (acc * (G.dt / 3.0)).real();
}

inline Spectrum spectrum_from_correlation(const CorrelationFunction& G, const FrequencyGrid& grid,
                                          double decay_tolerance = 1e-4) {
    if (!G.decayed(decay_tolerance)) throw NumericalError("spectrum: correlation function has not decayed");
    Spectrum s;
    s.freqs = grid.points();
    s.resolution = grid.spacing;
    s.values.reserve(s.freqs.size());
    for (double w : s.freqs) s.values.push_back(spectrum_at(G, w));
    return s;
}

enum class PeakHeightMode { fixed_frequency, local_maximum };

struct PeakHeightOptions {
    int n_max_fock = 2;
    FloquetOptions floquet;
    CorrelationOptions correlation;
    PeakHeightMode mode = PeakHeightMode::fixed_frequency;
};

// Spectrum value at the cavity frequency (or the local maximum within
// +-kappa/2 of it) for probe-pump detuning delta.
inline double cavity_peak_height(SystemParams p, double delta, const PeakHeightOptions& opt = {}) {
    p.delta = delta;
    const HilbertSpace space = make_space(opt.n_max_fock);
    const Liouvillians L = build_liouvillians(p, space);
    const FloquetHarmonics h = adaptive_harmonics(L, delta, opt.floquet);
    const CorrelationFunction G = correlation(p, L, h, opt.correlation);
    const double wc = p.cavity_frame_frequency();
    if (opt.mode == PeakHeightMode::fixed_frequency) return spectrum_at(G, wc);

    const double half = 0.5 * p.kappa;
    const double dw = p.kappa / 40.0;
    const Spectrum s = spectrum_from_correlation(G, {wc - half, wc + half, dw}, opt.correlation.decay_tolerance);
    const auto it = std::max_element(s.values.begin(), s.values.end());
    const auto i = static_cast<std::size_t>(it - s.values.begin());
    if (i == 0 || i + 1 == s.values.size()) return *it;
    const double ym = s.values[i - 1], y0 = s.values[i], yp = s.values[i + 1];
    const double denom = ym - 2.0 * y0 + yp;
    if (denom >= 0.0) return y0;
    const double x = 0.5 * (ym - yp) / denom;
    return y0 - 0.25 * (ym - yp) * x;
}

}  // namespace qdcav
