#pragma once

// Probe scans, Lorentzian peak fits, peak and dip splittings, and the
// pump-detuning (anticrossing) sweep.
//
// Scans are parameterized by delta = probe - pump. The probe offset from
// the QD resonance is delta + delta_pump.

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdcav/dynamics.hpp"
#include "qdcav/floquet.hpp"
#include "qdcav/lindblad.hpp"
#include "qdcav/parallel.hpp"

namespace qdcav {

enum class ObservableKind { spectrum_height, mean_photon_number };

inline const char* to_string(ObservableKind k) {
    return k == ObservableKind::spectrum_height ? "spectrum_height" : "mean_photon_number";
}

struct ScanResult {
    std::vector<double> probe_detunings;        // delta, rad/s
    std::vector<double> probe_offsets_from_qd;  // delta + delta_pump, rad/s
    std::vector<double> heights;
    SystemParams params;
    ObservableKind observable_kind = ObservableKind::spectrum_height;

    std::size_t size() const { return heights.size(); }
    // mean_photon_number is a cheap stand-in, not the plotted quantity.
    bool is_proxy() const { return observable_kind == ObservableKind::mean_photon_number; }

    double max_height() const {
        double m = 0.0;
        for (double h : heights) m = std::max(m, h);
        return m;
    }
    // Per-trace normalization to max = 1.
    std::vector<double> normalized() const {
        const double m = max_height();
        std::vector<double> out(heights.size(), 0.0);
        if (m > 0.0)
            for (std::size_t i = 0; i < heights.size(); ++i) out[i] = heights[i] / m;
        return out;
    }

    void validate() const {
        if (probe_detunings.size() != heights.size() || probe_offsets_from_qd.size() != heights.size())
            throw DimensionError("scan: list lengths differ");
        for (double h : heights)
            if (!std::isfinite(h) || h < 0.0) throw NumericalError("scan: heights must be finite and >= 0");
    }
};

// Half-width that a scan must cover around the probe-QD resonance.
inline double required_scan_half_width(const SystemParams& p) {
    return 4.0 * std::abs(p.J1) + 5.0 * (p.gamma + p.gamma_d);
}

// Probe offsets (k + 1/2) step, symmetric about the QD resonance and
// reaching at least `half_width` on both sides; returned as delta values.
// The half-step shift keeps delta = 0 off the grid when delta_pump is a
// multiple of the step.
inline std::vector<double> symmetric_probe_grid(const SystemParams& p, double step, double half_width = 0.0) {
    if (!(step > 0.0)) throw ConfigError("probe grid step must be > 0");
    const double hw = half_width > 0.0 ? half_width : required_scan_half_width(p);
    const auto k_max = static_cast<long>(std::ceil(hw / step - 0.5 - 1e-9));
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(2 * k_max + 2));
    for (long k = -k_max - 1; k <= k_max; ++k) out.push_back((static_cast<double>(k) + 0.5) * step - p.delta_pump);
    return out;
}

struct ScanOptions {
    PeakHeightOptions peak;
    int threads = 1;
    bool check_coverage = true;
};

inline ScanResult probe_scan(const SystemParams& params, const std::vector<double>& delta_grid,
                             ObservableKind kind = ObservableKind::spectrum_height, const ScanOptions& opt = {}) {
    params.validate();
    if (delta_grid.empty()) throw ConfigError("probe scan: empty delta grid");
    if (opt.check_coverage) {
        const auto [lo, hi] = std::minmax_element(delta_grid.begin(), delta_grid.end());
        const double need = required_scan_half_width(params);
        const double tol = 1e-9 * std::max(need, 1.0);
        if (*lo + params.delta_pump > -need + tol || *hi + params.delta_pump < need - tol) {
            std::ostringstream os;
            os << "probe scan: grid covers [" << to_ghz(*lo + params.delta_pump) << ", "
               << to_ghz(*hi + params.delta_pump) << "] GHz around the QD resonance, need +-" << to_ghz(need)
               << " GHz (4 J1 + 5 (gamma + gamma_d))";
            throw ConfigError(os.str());
        }
    }
    ScanResult r;
    r.params = params;
    r.observable_kind = kind;
    r.probe_detunings = delta_grid;
    r.heights.assign(delta_grid.size(), 0.0);
    for (double d : delta_grid) r.probe_offsets_from_qd.push_back(d + params.delta_pump);

    const HilbertSpace space = make_space(opt.peak.n_max_fock);
    const Operator n_op = cavity_number(space);
    parallel_for(delta_grid.size(), opt.threads, [&](std::size_t i) {
        double v = 0.0;
        if (kind == ObservableKind::spectrum_height) {
            v = cavity_peak_height(params, delta_grid[i], opt.peak);
        } else {
            SystemParams p = params;
            p.delta = delta_grid[i];
            const Liouvillians L = build_liouvillians(p, space);
            v = adaptive_harmonics(L, p.delta, opt.peak.floquet).time_averaged(n_op).real();
        }
        r.heights[i] = v;
    });
    // Round-off can leave a spectrum value a hair below zero.
    const double scale = r.max_height();
    for (double& h : r.heights) {
        if (h < 0.0 && h > -1e-9 * scale) h = 0.0;
    }
    r.validate();
    return r;
}

// ---------------------------------------------------------------------------
// Peak finding helpers on sampled curves.

struct Extremum {
    std::size_t index = 0;
    std::size_t left = 0;    // end of the monotone run to the left
    std::size_t right = 0;   // end of the monotone run to the right
    double prominence = 0.0;
};

// Interior local maxima (first index of a plateau), with the monotone
// descent on each side and the prominence y_i - max(y_left, y_right).
inline std::vector<Extremum> local_maxima(const std::vector<double>& y, double min_prominence = 0.0) {
    std::vector<Extremum> out;
    const std::size_t n = y.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(y[i] > y[i - 1] && y[i] >= y[i + 1])) continue;
        Extremum e;
        e.index = i;
        std::size_t l = i;
        while (l > 0 && y[l - 1] < y[l]) --l;
        std::size_t r = i;
        while (r + 1 < n && y[r + 1] <= y[r]) ++r;
        e.left = l;
        e.right = r;
        e.prominence = y[i] - std::max(y[l], y[r]);
        if (e.prominence > min_prominence) out.push_back(e);
    }
    return out;
}

inline std::vector<Extremum> local_minima(const std::vector<double>& y, double min_prominence = 0.0) {
    std::vector<double> neg(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) neg[i] = -y[i];
    return local_maxima(neg, min_prominence);
}

inline double curve_range(const std::vector<double>& y) {
    if (y.empty()) return 0.0;
    const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
    return *hi - *lo;
}

// Vertex abscissa of the parabola through three points.
inline double parabolic_vertex(double x0, double y0, double x1, double y1, double x2, double y2) {
    const double d0 = (x1 - x0) * (y1 - y2);
    const double d1 = (x1 - x2) * (y1 - y0);
    const double den = d0 - d1;
    if (den == 0.0) return x1;
    return x1 - 0.5 * ((x1 - x0) * d0 - (x1 - x2) * d1) / den;
}

// ---------------------------------------------------------------------------
// Lorentzian fits.

struct PeakFit {
    double center = 0.0;     // rad/s, probe offset from the QD
    double hwhm = 0.0;       // rad/s
    double amplitude = 0.0;
    double offset = 0.0;
    double residual_rms = 0.0;  // over this peak's fit window
    bool overlapping = false;
    double fit_lo = 0.0;     // extent of this peak's fit window
    double fit_hi = 0.0;

    double operator()(double x) const {
        const double u = (x - center) / hwhm;
        return amplitude / (1.0 + u * u);
    }
};

struct FitReport {
    std::vector<PeakFit> peaks;                    // sorted by center
    std::vector<std::vector<std::size_t>> windows; // scan indices per peak, same order
    // true: one model offset + sum of all peaks over the union of the
    // windows; false: each peak fitted on its own window with its own offset.
    bool joint = false;
    double residual_rms = 0.0;                     // over all fitted points
    bool overlapping = false;
    int starts_tried = 0;
    int starts_converged = 0;

    // Model the k-th peak's residual refers to.
    double model(std::size_t k, double x) const {
        if (!joint) return peaks[k].offset + peaks[k](x);
        double v = peaks.front().offset;
        for (const auto& p : peaks) v += p(x);
        return v;
    }
    // Model value at the k-th center.
    double height(std::size_t k) const { return model(k, peaks[k].center); }
};

struct FitOptions {
    // Each peak is fitted over the points within this fraction of its
    // prominence from the top.
    double window_fraction = 0.7;
    int min_points_per_peak = 5;
    // Expected linewidth (FWHM, rad/s) for the sampling check. <= 0: use
    // 2 (gamma + gamma_d) from the scan parameters; if that is zero too,
    // the check is skipped.
    double expected_linewidth = 0.0;
    int points_per_linewidth = 8;
    // Maxima smaller than this fraction of the trace range are ignored.
    double min_relative_prominence = 1e-3;
};

namespace detail {

// Residuals and Jacobian of offset + sum_k A_k / (1 + ((x - c_k)/w_k)^2),
// parameter layout [offset, c_1, w_1, A_1, c_2, w_2, A_2, ...].
struct LorentzianFunctor {
    const Eigen::VectorXd& x;
    const Eigen::VectorXd& y;
    int n_peaks;

    int inputs() const { return 1 + 3 * n_peaks; }
    int values() const { return static_cast<int>(x.size()); }

    int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& f) const {
        f.resize(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            double v = p(0);
            for (int k = 0; k < n_peaks; ++k) {
                const double u = (x(i) - p(1 + 3 * k)) / p(2 + 3 * k);
                v += p(3 + 3 * k) / (1.0 + u * u);
            }
            f(i) = v - y(i);
        }
        return 0;
    }

    int df(const Eigen::VectorXd& p, Eigen::MatrixXd& J) const {
        J.resize(x.size(), inputs());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            J(i, 0) = 1.0;
            for (int k = 0; k < n_peaks; ++k) {
                const double c = p(1 + 3 * k), w = p(2 + 3 * k), a = p(3 + 3 * k);
                const double u = (x(i) - c) / w;
                const double q = 1.0 / (1.0 + u * u);
                J(i, 1 + 3 * k) = a * 2.0 * u * q * q / w;
                J(i, 2 + 3 * k) = a * 2.0 * u * u * q * q / w;
                J(i, 3 + 3 * k) = q;
            }
        }
        return 0;
    }
};

inline bool lm_converged(Eigen::LevenbergMarquardtSpace::Status s) {
    using namespace Eigen::LevenbergMarquardtSpace;
    switch (s) {
        case RelativeReductionTooSmall:
        case RelativeErrorTooSmall:
        case RelativeErrorAndReductionTooSmall:
        case CosinusTooSmall:
        case FtolTooSmall:
        case XtolTooSmall:
        case GtolTooSmall:
            return true;
        default:
            return false;
    }
}

struct Seed {
    double center;
    double half_span;  // initial width scale
    double top;        // data value at the maximum
};

struct LmOutcome {
    bool ok = false;
    std::vector<PeakFit> peaks;  // offset filled in each
    double sse = std::numeric_limits<double>::infinity();
    int tried = 0;
    int converged = 0;
};

// Multi-start Levenberg-Marquardt fit of offset + n Lorentzians on the
// points `idx`, done in scaled coordinates.
inline LmOutcome lm_fit(const std::vector<double>& xs, const std::vector<double>& ys,
                        const std::vector<std::size_t>& idx, const std::vector<Seed>& seeds) {
    LmOutcome out;
    const int n_peaks = static_cast<int>(seeds.size());
    const std::size_t m = idx.size();
    const double x_lo = xs[idx.front()], x_hi = xs[idx.back()];
    const double x_mid = 0.5 * (x_lo + x_hi);
    const double x_scale = std::max(0.5 * (x_hi - x_lo), std::numeric_limits<double>::min());
    double y_min = std::numeric_limits<double>::infinity(), y_max = -y_min;
    for (auto i : idx) {
        y_min = std::min(y_min, ys[i]);
        y_max = std::max(y_max, ys[i]);
    }
    const double y_scale = y_max > y_min ? y_max - y_min : (y_max != 0.0 ? std::abs(y_max) : 1.0);
    Eigen::VectorXd X(static_cast<Eigen::Index>(m)), Y(static_cast<Eigen::Index>(m));
    for (std::size_t k = 0; k < m; ++k) {
        X(static_cast<Eigen::Index>(k)) = (xs[idx[k]] - x_mid) / x_scale;
        Y(static_cast<Eigen::Index>(k)) = (ys[idx[k]] - y_min) / y_scale;
    }
    LorentzianFunctor functor{X, Y, n_peaks};
    double best_cost = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best;
    for (double w_scale : {1.0, 0.5, 2.0}) {
        for (double off_shift : {0.0, -0.5}) {
            Eigen::VectorXd p(1 + 3 * n_peaks);
            p(0) = off_shift;
            for (int k = 0; k < n_peaks; ++k) {
                const Seed& s = seeds[static_cast<std::size_t>(k)];
                p(1 + 3 * k) = (s.center - x_mid) / x_scale;
                p(2 + 3 * k) = w_scale * s.half_span / x_scale;
                p(3 + 3 * k) = (s.top - y_min) / y_scale - off_shift;
            }
            ++out.tried;
            Eigen::LevenbergMarquardt<LorentzianFunctor> lm(functor);
            lm.parameters.maxfev = 4000;
            lm.parameters.xtol = 1e-13;
            lm.parameters.ftol = 1e-15;
            const auto status = lm.minimize(p);
            if (!lm_converged(status) || !p.allFinite()) continue;
            bool admissible = true;
            for (int k = 0; k < n_peaks; ++k) {
                const double c = p(1 + 3 * k), w = p(2 + 3 * k), a = p(3 + 3 * k);
                if (!(std::abs(w) > 1e-12) || !(a > 0.0) || c < -1.0 - 1e-9 || c > 1.0 + 1e-9) admissible = false;
            }
            if (!admissible) continue;
            ++out.converged;
            Eigen::VectorXd f;
            functor(p, f);
            const double cost = f.squaredNorm();
            if (cost < best_cost) {
                best_cost = cost;
                best = p;
            }
        }
    }
    if (out.converged == 0) return out;
    out.ok = true;
    out.sse = best_cost * y_scale * y_scale;
    for (int k = 0; k < n_peaks; ++k) {
        PeakFit f;
        f.center = x_mid + best(1 + 3 * k) * x_scale;
        f.hwhm = std::abs(best(2 + 3 * k)) * x_scale;
        f.amplitude = best(3 + 3 * k) * y_scale;
        f.offset = y_min + best(0) * y_scale;
        out.peaks.push_back(f);
    }
    return out;
}

}  // namespace detail

// Lorentzian fits to the n_peaks largest resolved maxima of a scan. Each
// peak is fitted on its top region (window_fraction of its prominence). For
// two peaks, separate fits (own offsets) and one joint fit (shared offset)
// are both tried and the one with the smaller squared residual is kept.
inline FitReport fit_lorentzians_report(const ScanResult& scan, int n_peaks, const FitOptions& opt = {}) {
    scan.validate();
    if (n_peaks != 1 && n_peaks != 2) throw ConfigError("fit_lorentzians: n_peaks must be 1 or 2");
    const std::vector<double>& xs = scan.probe_offsets_from_qd;
    const std::vector<double>& ys = scan.heights;
    const std::size_t n = ys.size();
    if (n < 3) throw ConfigError("fit_lorentzians: need at least 3 points");
    for (std::size_t i = 1; i < n; ++i)
        if (!(xs[i] > xs[i - 1])) throw ConfigError("fit_lorentzians: probe offsets must be strictly increasing");

    const double lw = opt.expected_linewidth > 0.0 ? opt.expected_linewidth
                                                   : 2.0 * (scan.params.gamma + scan.params.gamma_d);
    if (lw > 0.0) {
        double widest = 0.0;
        for (std::size_t i = 1; i < n; ++i) widest = std::max(widest, xs[i] - xs[i - 1]);
        if (widest > lw / opt.points_per_linewidth * (1.0 + 1e-9)) {
            std::ostringstream os;
            os << "fit_lorentzians: grid spacing " << to_ghz(widest) << " GHz gives fewer than "
               << opt.points_per_linewidth << " points per linewidth (" << to_ghz(lw) << " GHz)";
            throw ConfigError(os.str());
        }
    }

    auto maxima = local_maxima(ys, opt.min_relative_prominence * curve_range(ys));
    if (static_cast<int>(maxima.size()) < n_peaks) {
        std::ostringstream os;
        os << "fit_lorentzians: found " << maxima.size() << " resolved local maxima, need " << n_peaks;
        throw TopologyError(os.str());
    }
    std::stable_sort(maxima.begin(), maxima.end(),
                     [&](const Extremum& a, const Extremum& b) { return ys[a.index] > ys[b.index]; });
    maxima.resize(static_cast<std::size_t>(n_peaks));
    std::sort(maxima.begin(), maxima.end(), [](const Extremum& a, const Extremum& b) { return a.index < b.index; });

    FitReport rep;
    std::vector<detail::Seed> seeds;
    for (const auto& m : maxima) {
        const double thr = ys[m.index] - opt.window_fraction * m.prominence;
        std::size_t lo = m.index, hi = m.index;
        while (lo > m.left && ys[lo - 1] >= thr) --lo;
        while (hi < m.right && ys[hi + 1] >= thr) ++hi;
        if (static_cast<int>(hi - lo + 1) < opt.min_points_per_peak) {
            std::ostringstream os;
            os << "fit_lorentzians: peak near " << to_ghz(xs[m.index]) << " GHz spans only " << (hi - lo + 1)
               << " points";
            throw TopologyError(os.str());
        }
        std::vector<std::size_t> w;
        for (std::size_t i = lo; i <= hi; ++i) w.push_back(i);
        rep.windows.push_back(std::move(w));
        seeds.push_back({xs[m.index], 0.5 * (xs[hi] - xs[lo]), ys[m.index]});
    }

    auto sse_of = [&](const FitReport& r) {
        double ss = 0.0;
        for (std::size_t k = 0; k < r.peaks.size(); ++k)
            for (auto i : r.windows[k]) {
                const double d = r.model(k, xs[i]) - ys[i];
                ss += d * d;
            }
        return ss;
    };

    // Separate fits.
    FitReport separate = rep;
    bool separate_ok = true;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
        const auto o = detail::lm_fit(xs, ys, rep.windows[k], {seeds[k]});
        separate.starts_tried += o.tried;
        separate.starts_converged += o.converged;
        if (!o.ok) {
            separate_ok = false;
            continue;
        }
        separate.peaks.push_back(o.peaks.front());
    }
    FitReport chosen;
    bool have = false;
    if (separate_ok) {
        chosen = separate;
        have = true;
    }
    int tried = separate.starts_tried, converged = separate.starts_converged;

    if (n_peaks == 2) {
        FitReport joint = rep;
        joint.joint = true;
        std::vector<std::size_t> all;
        for (const auto& w : rep.windows) all.insert(all.end(), w.begin(), w.end());
        std::sort(all.begin(), all.end());
        all.erase(std::unique(all.begin(), all.end()), all.end());
        const auto o = detail::lm_fit(xs, ys, all, seeds);
        tried += o.tried;
        converged += o.converged;
        // each joint peak must stay on the maximum it was seeded from;
        // otherwise both can collapse onto one asymmetric peak
        bool on_seed = o.ok && o.peaks.size() == rep.windows.size();
        for (std::size_t k = 0; on_seed && k < o.peaks.size(); ++k)
            on_seed = o.peaks[k].center >= xs[rep.windows[k].front()] && o.peaks[k].center <= xs[rep.windows[k].back()];
        if (on_seed) {
            joint.peaks = o.peaks;
            if (!have || sse_of(joint) < sse_of(chosen)) {
                chosen = joint;
                have = true;
            }
        }
    }
    if (!have) {
        std::ostringstream os;
        os << "fit_lorentzians: no start converged to an admissible fit (" << tried << " starts)";
        throw NumericalError(os.str());
    }
    chosen.starts_tried = tried;
    chosen.starts_converged = converged;

    // Sort peaks (and their windows) by center.
    std::vector<std::size_t> order(chosen.peaks.size());
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return chosen.peaks[a].center < chosen.peaks[b].center; });
    FitReport sorted = chosen;
    for (std::size_t k = 0; k < order.size(); ++k) {
        sorted.peaks[k] = chosen.peaks[order[k]];
        sorted.windows[k] = chosen.windows[order[k]];
    }

    double ss_all = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < sorted.peaks.size(); ++k) {
        double ss = 0.0;
        for (auto i : sorted.windows[k]) {
            const double d = sorted.model(k, xs[i]) - ys[i];
            ss += d * d;
        }
        ss_all += ss;
        count += sorted.windows[k].size();
        auto& f = sorted.peaks[k];
        f.residual_rms = std::sqrt(ss / static_cast<double>(sorted.windows[k].size()));
        f.fit_lo = xs[sorted.windows[k].front()];
        f.fit_hi = xs[sorted.windows[k].back()];
    }
    sorted.residual_rms = std::sqrt(ss_all / static_cast<double>(count));
    if (n_peaks == 2)
        sorted.overlapping = std::abs(sorted.peaks[1].center - sorted.peaks[0].center) <
                             std::max(sorted.peaks[0].hwhm, sorted.peaks[1].hwhm);
    for (auto& f : sorted.peaks) f.overlapping = sorted.overlapping;
    return sorted;
}

inline std::vector<PeakFit> fit_lorentzians(const ScanResult& scan, int n_peaks, const FitOptions& opt = {}) {
    return fit_lorentzians_report(scan, n_peaks, opt).peaks;
}

// ---------------------------------------------------------------------------
// Dips and topology.

enum class Topology { single_peak, doublet, central_peak_with_dips, other };

inline const char* to_string(Topology t) {
    switch (t) {
        case Topology::single_peak: return "single_peak";
        case Topology::doublet: return "doublet";
        case Topology::central_peak_with_dips: return "central_peak_with_dips";
        default: return "other";
    }
}

struct DipResult {
    double left = 0.0;     // refined minimum positions, probe offset from QD (rad/s)
    double right = 0.0;
    double central_peak = 0.0;
    double splitting() const { return right - left; }
};

// Central local maximum (the resolved maximum closest to the QD resonance)
// and the nearest resolved local minimum on each side of it.
inline DipResult find_dips(const ScanResult& scan, double min_relative_prominence = 1e-3) {
    scan.validate();
    const auto& xs = scan.probe_offsets_from_qd;
    const auto& ys = scan.heights;
    const double floor = min_relative_prominence * curve_range(ys);
    const auto maxima = local_maxima(ys, floor);
    const auto minima = local_minima(ys, floor);
    if (maxima.empty()) throw TopologyError("dip_splitting: no resolved local maximum");
    const Extremum* centre = &maxima.front();
    for (const auto& e : maxima)
        if (std::abs(xs[e.index]) < std::abs(xs[centre->index])) centre = &e;
    const Extremum* lmin = nullptr;
    const Extremum* rmin = nullptr;
    for (const auto& e : minima) {
        if (e.index < centre->index && (!lmin || e.index > lmin->index)) lmin = &e;
        if (e.index > centre->index && (!rmin || e.index < rmin->index)) rmin = &e;
    }
    if (!lmin || !rmin) {
        std::ostringstream os;
        os << "dip_splitting: the maximum nearest the QD resonance (" << to_ghz(xs[centre->index])
           << " GHz) is not flanked by two dips; pump below the dip regime";
        throw TopologyError(os.str());
    }
    auto refine = [&](std::size_t i) {
        return parabolic_vertex(xs[i - 1], ys[i - 1], xs[i], ys[i], xs[i + 1], ys[i + 1]);
    };
    DipResult d;
    d.left = refine(lmin->index);
    d.right = refine(rmin->index);
    d.central_peak = xs[centre->index];
    if (!(d.left < 0.0 && d.right > 0.0)) {
        std::ostringstream os;
        os << "dip_splitting: dips at " << to_ghz(d.left) << " and " << to_ghz(d.right)
           << " GHz do not straddle the QD resonance";
        throw TopologyError(os.str());
    }
    return d;
}

inline double dip_splitting(const ScanResult& scan) { return find_dips(scan).splitting(); }

// A central maximum flanked by dips wins over counting maxima, because the
// outer peaks of that regime can be too broad to resolve within the scan.
inline Topology classify_topology(const ScanResult& scan, double min_relative_prominence = 1e-3) {
    const auto& ys = scan.heights;
    const auto maxima = local_maxima(ys, min_relative_prominence * curve_range(ys));
    if (maxima.empty()) return Topology::other;
    try {
        find_dips(scan, min_relative_prominence);
        return Topology::central_peak_with_dips;
    } catch (const TopologyError&) {
    }
    if (maxima.size() == 1) return Topology::single_peak;
    if (maxima.size() == 2) return Topology::doublet;
    return Topology::other;
}

// ---------------------------------------------------------------------------
// Sweeps.

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
};

inline LinearFit linear_least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("linear fit needs >= 2 matched points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw ConfigError("linear fit: x values are all equal");
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        sse += r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    if (x.size() > 2) {
        const double s2 = sse / (n - 2.0);
        f.slope_stderr = std::sqrt(s2 / sxx);
        f.intercept_stderr = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
    }
    return f;
}

enum class SplittingMethod { peaks, dips };

struct SweepOptions {
    ScanOptions scan;
    FitOptions fit;
    double grid_step = ghz(1.0);
    // Scan half-width = required_scan_half_width * coverage_factor.
    double coverage_factor = 1.0;
    SplittingMethod method = SplittingMethod::peaks;
    ObservableKind observable = ObservableKind::spectrum_height;
};

inline std::vector<double> sweep_grid(const SystemParams& p, const SweepOptions& opt) {
    return symmetric_probe_grid(p, opt.grid_step, opt.coverage_factor * required_scan_half_width(p));
}

// Peak separation (two Lorentzian fits) or dip separation of one scan.
inline double measure_splitting(const ScanResult& scan, const SweepOptions& opt) {
    if (opt.method == SplittingMethod::dips) return dip_splitting(scan);
    const auto fits = fit_lorentzians_report(scan, 2, opt.fit);
    if (fits.overlapping) throw TopologyError("peaks overlap");
    return fits.peaks[1].center - fits.peaks[0].center;
}

struct SplittingSeries {
    std::vector<double> pump_amplitudes;   // J1, rad/s
    std::vector<double> rabi_frequencies;  // 2 J1, rad/s
    std::vector<double> splittings;        // rad/s
    // Linear fit of splitting against the Rabi frequency 2 J1.
    double fit_slope = 0.0;
    double fit_intercept = 0.0;
    double r_squared = 0.0;
    double slope_stderr = 0.0;
    double intercept_stderr = 0.0;
    std::vector<std::pair<double, std::string>> excluded;  // (J1, reason)
    std::vector<ScanResult> scans;                          // resolved points only

    double slope_per_j1() const { return 2.0 * fit_slope; }
};

inline SplittingSeries splitting_vs_pump(const SystemParams& base, const std::vector<double>& J1_list,
                                         const SweepOptions& opt = {}) {
    SplittingSeries s;
    for (double J1 : J1_list) {
        SystemParams p = base;
        p.J1 = J1;
        ScanResult scan = probe_scan(p, sweep_grid(p, opt), opt.observable, opt.scan);
        double split = 0.0;
        try {
            split = measure_splitting(scan, opt);
        } catch (const TopologyError& e) {
            s.excluded.emplace_back(J1, e.what());
            continue;
        } catch (const NumericalError& e) {
            s.excluded.emplace_back(J1, e.what());
            continue;
        }
        s.pump_amplitudes.push_back(J1);
        s.rabi_frequencies.push_back(2.0 * J1);
        s.splittings.push_back(split);
        s.scans.push_back(std::move(scan));
    }
    if (s.splittings.size() >= 2) {
        const LinearFit f = linear_least_squares(s.rabi_frequencies, s.splittings);
        s.fit_slope = f.slope;
        s.fit_intercept = f.intercept;
        s.r_squared = f.r_squared;
        s.slope_stderr = f.slope_stderr;
        s.intercept_stderr = f.intercept_stderr;
    } else {
        throw TopologyError("splitting_vs_pump: fewer than two pump amplitudes gave resolved splittings");
    }
    return s;
}

struct AnticrossingPoint {
    double delta_pump = 0.0;
    ScanResult scan;
    std::optional<FitReport> fit;   // empty when two peaks were not resolved
    std::string failure;

    double separation() const { return fit ? fit->peaks[1].center - fit->peaks[0].center : 0.0; }
    // Fitted peak height above the lowest point of the scan, peaks sorted
    // by center (k = 0 lower, 1 upper).
    double peak_height(std::size_t k) const {
        if (!fit) return 0.0;
        return fit->height(k) - *std::min_element(scan.heights.begin(), scan.heights.end());
    }
    // (h_low - h_high) / (h_low + h_high)
    double asymmetry() const {
        if (!fit) return 0.0;
        const double a = peak_height(0), b = peak_height(1);
        return (a - b) / (a + b);
    }
};

inline AnticrossingPoint anticrossing_point(const SystemParams& base, double delta_pump, const SweepOptions& opt = {}) {
    SystemParams p = base;
    p.delta_pump = delta_pump;
    AnticrossingPoint pt;
    pt.delta_pump = delta_pump;
    pt.scan = probe_scan(p, sweep_grid(p, opt), opt.observable, opt.scan);
    try {
        pt.fit = fit_lorentzians_report(pt.scan, 2, opt.fit);
    } catch (const TopologyError& e) {
        pt.failure = e.what();
    } catch (const NumericalError& e) {
        pt.failure = e.what();
    }
    return pt;
}

inline std::vector<AnticrossingPoint> anticrossing_scan(const SystemParams& base,
                                                        const std::vector<double>& delta_pump_list,
                                                        const SweepOptions& opt = {}) {
    std::vector<AnticrossingPoint> out;
    for (double dp : delta_pump_list) out.push_back(anticrossing_point(base, dp, opt));
    return out;
}

}  // namespace qdcav
