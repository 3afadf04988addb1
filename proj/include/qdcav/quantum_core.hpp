#pragma once

// Truncated QD (two-level) x cavity (Fock) Hilbert space and the dense
// operators living on it.
//
// Basis ordering is qubit (x) Fock with the QD ground state first:
//   index(qd, n) = qd * (n_max_fock + 1) + n,  qd in {0 = g, 1 = e}.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <string>
#include <utility>

#include "qdcav/errors.hpp"

namespace qdcav {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline constexpr cplx I_unit{0.0, 1.0};

class HilbertSpace {
public:
    HilbertSpace() = default;

    int n_max_fock() const { return n_max_fock_; }
    int fock_levels() const { return n_max_fock_ + 1; }
    int dim() const { return 2 * (n_max_fock_ + 1); }

    int index(int qd, int n) const { return qd * fock_levels() + n; }

    // Recorded in output metadata so that stored matrices can be decoded.
    std::string ordering() const {
        return "qd{g,e} (x) fock{0.." + std::to_string(n_max_fock_) + "}, qd-major, ground first";
    }

    friend bool operator==(const HilbertSpace&, const HilbertSpace&) = default;

private:
    friend HilbertSpace make_space(int);
    explicit HilbertSpace(int n) : n_max_fock_(n) {}
    int n_max_fock_ = 1;
};

inline HilbertSpace make_space(int n_max_fock) {
    if (n_max_fock < 1)
        throw ConfigError("n_max_fock must be >= 1 (got " + std::to_string(n_max_fock) + ")");
    return HilbertSpace(n_max_fock);
}

class Operator {
public:
    Operator() = default;
    explicit Operator(Mat m, std::string label = {}) : m_(std::move(m)), label_(std::move(label)) {
        if (m_.rows() != m_.cols())
            throw DimensionError("operator must be square, got " + std::to_string(m_.rows()) + "x" +
                                 std::to_string(m_.cols()));
        if (!m_.allFinite()) throw NumericalError("operator '" + label_ + "' has non-finite entries");
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    const Mat& matrix() const { return m_; }
    const std::string& label() const { return label_; }

    double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }
    bool is_hermitian(double tol = 1e-12) const { return hermiticity_error() < tol; }

    Operator adjoint() const {
        return Operator(m_.adjoint(), label_.empty() ? std::string{} : label_ + "^dag");
    }

    friend Operator operator+(const Operator& a, const Operator& b) {
        check_same(a, b);
        return Operator(a.m_ + b.m_);
    }
    friend Operator operator-(const Operator& a, const Operator& b) {
        check_same(a, b);
        return Operator(a.m_ - b.m_);
    }
    friend Operator operator*(const Operator& a, const Operator& b) {
        check_same(a, b);
        return Operator(a.m_ * b.m_);
    }
    friend Operator operator*(cplx s, const Operator& a) { return Operator(s * a.m_, a.label_); }
    friend Operator operator*(double s, const Operator& a) { return Operator(s * a.m_, a.label_); }

private:
    static void check_same(const Operator& a, const Operator& b) {
        if (a.dim() != b.dim())
            throw DimensionError("operator dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                                 std::to_string(b.dim()));
    }

    Mat m_;
    std::string label_;
};

class DensityMatrix {
public:
    DensityMatrix() = default;
    explicit DensityMatrix(Mat m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols()) throw DimensionError("density matrix must be square");
    }

    int dim() const { return static_cast<int>(m_.rows()); }
    const Mat& matrix() const { return m_; }
    cplx trace() const { return m_.trace(); }

    double hermiticity_error() const { return (m_ - m_.adjoint()).cwiseAbs().maxCoeff(); }
    double min_eigenvalue() const {
        Mat h = 0.5 * (m_ + m_.adjoint());
        Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    // Physical-state checks with the default tolerances: Hermitian to 1e-10,
    // unit trace to 1e-10, eigenvalues above -1e-8.
    bool is_physical(double herm_tol = 1e-10, double trace_tol = 1e-10, double eig_tol = 1e-8) const {
        return hermiticity_error() < herm_tol && std::abs(trace() - cplx{1.0, 0.0}) < trace_tol &&
               min_eigenvalue() > -eig_tol;
    }

    // Trace distance 1/2 ||a - b||_1 on the Hermitian part.
    friend double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
        if (a.dim() != b.dim()) throw DimensionError("trace_distance: dimension mismatch");
        Mat d = a.m_ - b.m_;
        d = 0.5 * (d + d.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Mat> es(d, Eigen::EigenvaluesOnly);
        return 0.5 * es.eigenvalues().cwiseAbs().sum();
    }

private:
    Mat m_;
};

// Product state |qd><qd| (x) |n><n|.
inline DensityMatrix basis_state(const HilbertSpace& space, int qd, int n) {
    Mat m = Mat::Zero(space.dim(), space.dim());
    m(space.index(qd, n), space.index(qd, n)) = 1.0;
    return DensityMatrix(std::move(m));
}

inline DensityMatrix maximally_mixed(const HilbertSpace& space) {
    return DensityMatrix(Mat::Identity(space.dim(), space.dim()) / static_cast<double>(space.dim()));
}

inline Operator identity(const HilbertSpace& space) {
    return Operator(Mat::Identity(space.dim(), space.dim()), "I");
}

// I_qd (x) a_fock, with a_fock(n-1, n) = sqrt(n).
inline Operator annihilation(const HilbertSpace& space) {
    Mat m = Mat::Zero(space.dim(), space.dim());
    for (int qd = 0; qd < 2; ++qd)
        for (int n = 1; n <= space.n_max_fock(); ++n)
            m(space.index(qd, n - 1), space.index(qd, n)) = std::sqrt(static_cast<double>(n));
    return Operator(std::move(m), "a");
}

// |g><e| (x) I_fock.
inline Operator qd_lowering(const HilbertSpace& space) {
    Mat m = Mat::Zero(space.dim(), space.dim());
    for (int n = 0; n <= space.n_max_fock(); ++n) m(space.index(0, n), space.index(1, n)) = 1.0;
    return Operator(std::move(m), "sigma");
}

inline Operator cavity_number(const HilbertSpace& space) {
    const Operator a = annihilation(space);
    return Operator(a.matrix().adjoint() * a.matrix(), "a^dag a");
}

inline Operator qd_population(const HilbertSpace& space) {
    const Operator s = qd_lowering(space);
    return Operator(s.matrix().adjoint() * s.matrix(), "sigma^dag sigma");
}

inline Operator sigma_x(const HilbertSpace& space) {
    const Operator s = qd_lowering(space);
    return Operator(s.matrix() + s.matrix().adjoint(), "sigma_x");
}

enum class ComposeKind { product, commutator, kron };

inline Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Operator compose(const Operator& a, const Operator& b, ComposeKind kind) {
    switch (kind) {
        case ComposeKind::product:
            return a * b;
        case ComposeKind::commutator:
            if (a.dim() != b.dim()) throw DimensionError("commutator: dimension mismatch");
            return Operator(a.matrix() * b.matrix() - b.matrix() * a.matrix());
        case ComposeKind::kron:
            return Operator(kron(a.matrix(), b.matrix()));
    }
    throw std::logic_error("compose: unknown kind");
}

// tr(A rho)
inline cplx expectation(const Operator& a, const DensityMatrix& rho) {
    if (a.dim() != rho.dim())
        throw DimensionError("expectation: operator dim " + std::to_string(a.dim()) + " vs state dim " +
                             std::to_string(rho.dim()));
    // tr(AB) = sum_ij A_ij B_ji without forming the product.
    return (a.matrix().cwiseProduct(rho.matrix().transpose())).sum();
}

}  // namespace qdcav
