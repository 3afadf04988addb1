#pragma once

// Rotating-frame Hamiltonian and the Liouvillians of the bichromatically
// driven QD-cavity master equation
//
//   d rho / dt = (L0 + Lplus e^{i delta t} + Lminus e^{-i delta t}) rho.
//
// All rates are angular (rad/s). Superoperators act on column-stacked
// density matrices: vec(A X B) = (B^T (x) A) vec(X).

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <sstream>
#include <string>

#include "qdcav/quantum_core.hpp"

namespace qdcav {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// nu [GHz] -> omega [rad/s]
constexpr double ghz(double nu_ghz) { return two_pi * 1e9 * nu_ghz; }
// omega [rad/s] -> nu [GHz]
constexpr double to_ghz(double omega) { return omega / (two_pi * 1e9); }

struct SystemParams {
    double kappa = 0.0;       // cavity field decay
    double gamma = 0.0;       // QD radiative decay
    double gamma_r = 0.0;     // phonon-mediated QD <-> cavity transfer
    double gamma_d = 0.0;     // QD pure dephasing
    double delta_dc = 0.0;    // omega_cav - omega_QD
    double delta_pump = 0.0;  // omega_pump - omega_QD
    double g = 0.0;           // coherent QD-cavity coupling
    double n_bar = 0.0;       // phonon occupation
    double J1 = 0.0;          // pump amplitude (coefficient of sigma_x)
    double J2 = 0.0;          // probe amplitude
    double delta = 0.0;       // omega_probe - omega_pump

    // kappa/2pi = 17, gamma/2pi = 1, gamma_r/2pi = 0.5, gamma_d/2pi = 3 GHz,
    // Delta = 8 kappa, n_bar = 1, g = 0; drives off.
    static SystemParams reference_defaults() {
        SystemParams p;
        p.kappa = ghz(17.0);
        p.gamma = ghz(1.0);
        p.gamma_r = ghz(0.5);
        p.gamma_d = ghz(3.0);
        p.delta_dc = 8.0 * p.kappa;
        p.n_bar = 1.0;
        return p;
    }

    // Laser Rabi frequency of the pump. J1 multiplies sigma_x, whose
    // eigenvalues are +-1, so the dressed-state splitting is 2 J1.
    double pump_rabi_frequency() const { return 2.0 * J1; }

    // Cavity frequency in the pump frame.
    double cavity_frame_frequency() const { return delta_dc - delta_pump; }

    std::array<double, 11> as_array() const {
        return {kappa, gamma, gamma_r, gamma_d, delta_dc, delta_pump, g, n_bar, J1, J2, delta};
    }

    void validate() const {
        const auto arr = as_array();
        for (double v : arr)
            if (!std::isfinite(v)) throw ConfigError("system parameters must be finite");
        auto nonneg = [](double v, const char* name) {
            if (v < 0.0) throw ConfigError(std::string("system.") + name + " must be >= 0");
        };
        nonneg(kappa, "kappa");
        nonneg(gamma, "gamma");
        nonneg(gamma_r, "gamma_r");
        nonneg(gamma_d, "gamma_d");
        nonneg(n_bar, "n_bar");
        nonneg(J2, "J2");
    }

    // FNV-1a over the bit patterns; identifies the generating parameters
    // of a trajectory.
    std::uint64_t hash() const {
        std::uint64_t h = 1469598103934665603ULL;
        for (double v : as_array()) {
            auto bits = std::bit_cast<std::uint64_t>(v);
            for (int i = 0; i < 8; ++i) {
                h ^= (bits >> (8 * i)) & 0xffU;
                h *= 1099511628211ULL;
            }
        }
        return h;
    }

    friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

inline Vec vectorize(const Mat& m) { return Eigen::Map<const Vec>(m.data(), m.size()); }

inline Mat unvectorize(const Vec& v, int dim) {
    if (v.size() != static_cast<Eigen::Index>(dim) * dim)
        throw DimensionError("unvectorize: length " + std::to_string(v.size()) + " is not " +
                             std::to_string(dim) + "^2");
    return Eigen::Map<const Mat>(v.data(), dim, dim);
}

enum class VecConvention { column_stacking };

class Superoperator {
public:
    Superoperator() = default;
    Superoperator(Mat m, int hilbert_dim) : m_(std::move(m)), hilbert_dim_(hilbert_dim) {
        if (m_.rows() != m_.cols() || m_.rows() != static_cast<Eigen::Index>(hilbert_dim) * hilbert_dim)
            throw DimensionError("superoperator must be d^2 x d^2 for Hilbert dim " +
                                 std::to_string(hilbert_dim));
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    int hilbert_dim() const { return hilbert_dim_; }
    VecConvention convention() const { return VecConvention::column_stacking; }
    const Mat& matrix() const { return m_; }

    Vec apply(const Vec& v) const { return m_ * v; }
    Mat apply(const Mat& rho) const {
        if (rho.rows() != hilbert_dim_) throw DimensionError("superoperator applied to wrong-size matrix");
        return unvectorize(m_ * vectorize(rho), hilbert_dim_);
    }

    friend Superoperator operator+(const Superoperator& a, const Superoperator& b) {
        if (a.dim() != b.dim()) throw DimensionError("superoperator dimension mismatch");
        return {a.m_ + b.m_, a.hilbert_dim_};
    }
    friend Superoperator operator*(cplx s, const Superoperator& a) { return {s * a.m_, a.hilbert_dim_}; }

private:
    Mat m_;
    int hilbert_dim_ = 0;
};

// X -> A X
inline Superoperator spre(const Operator& a) {
    const Mat id = Mat::Identity(a.dim(), a.dim());
    return {kron(id, a.matrix()), a.dim()};
}

// X -> X B
inline Superoperator spost(const Operator& b) {
    const Mat id = Mat::Identity(b.dim(), b.dim());
    return {kron(b.matrix().transpose(), id), b.dim()};
}

// X -> -i [H, X]
inline Superoperator commutator_generator(const Operator& h) {
    return {-I_unit * (spre(h).matrix() - spost(h).matrix()), h.dim()};
}

// X -> C X C^dag - 1/2 {C^dag C, X}
inline Superoperator dissipator(const Operator& c) {
    const Operator cdc(c.matrix().adjoint() * c.matrix());
    const Mat m = kron(c.matrix().conjugate(), c.matrix()) - 0.5 * (spre(cdc).matrix() + spost(cdc).matrix());
    return {m, c.dim()};
}

// Static part of the pump-frame Hamiltonian:
//   H0 = (Delta - delta_pump) a^dag a - delta_pump sigma^dag sigma
//        + g (sigma^dag a + sigma a^dag) + J1 sigma_x
inline Operator hamiltonian_rotating(const SystemParams& p, const HilbertSpace& space) {
    const Mat a = annihilation(space).matrix();
    const Mat s = qd_lowering(space).matrix();
    const Mat ad = a.adjoint();
    const Mat sd = s.adjoint();
    Mat h = (p.delta_dc - p.delta_pump) * (ad * a) - p.delta_pump * (sd * s) + p.g * (sd * a + s * ad) +
            p.J1 * (s + sd);
    return Operator(std::move(h), "H0");
}

struct Liouvillians {
    HilbertSpace space;
    Superoperator L0;
    Superoperator Lplus;   // multiplies e^{+i delta t}
    Superoperator Lminus;  // multiplies e^{-i delta t}

    // Full generator at time t for probe-pump detuning delta.
    Superoperator at(double t, double delta) const {
        const cplx ep = std::polar(1.0, delta * t);
        return {L0.matrix() + ep * Lplus.matrix() + std::conj(ep) * Lminus.matrix(), space.dim()};
    }
};

// Collapse operators in the order they enter L0.
inline std::array<Operator, 5> collapse_operators(const SystemParams& p, const HilbertSpace& space) {
    const Mat a = annihilation(space).matrix();
    const Mat s = qd_lowering(space).matrix();
    return {Operator(std::sqrt(2.0 * p.gamma) * s, "sqrt(2 gamma) sigma"),
            Operator(std::sqrt(2.0 * p.kappa) * a, "sqrt(2 kappa) a"),
            Operator(std::sqrt(2.0 * p.gamma_r * p.n_bar) * (a.adjoint() * s), "sqrt(2 gamma_r n) a^dag sigma"),
            Operator(std::sqrt(2.0 * p.gamma_r * (1.0 + p.n_bar)) * (a * s.adjoint()),
                     "sqrt(2 gamma_r (1+n)) a sigma^dag"),
            Operator(std::sqrt(2.0 * p.gamma_d) * (s.adjoint() * s), "sqrt(2 gamma_d) sigma^dag sigma")};
}

// L0 = -i[H0, .] + five dissipators; Lplus = -i J2 [sigma, .];
// Lminus = -i J2 [sigma^dag, .]. The probe amplitude is folded in here.
inline Liouvillians build_liouvillians(const SystemParams& p, const HilbertSpace& space) {
    p.validate();
    Mat l0 = commutator_generator(hamiltonian_rotating(p, space)).matrix();
    for (const auto& c : collapse_operators(p, space)) l0 += dissipator(c).matrix();
    const Operator s = qd_lowering(space);
    const int d = space.dim();
    return {space, Superoperator(std::move(l0), d), cplx{p.J2, 0.0} * commutator_generator(s),
            cplx{p.J2, 0.0} * commutator_generator(s.adjoint())};
}

}  // namespace qdcav
