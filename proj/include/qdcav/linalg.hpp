#pragma once

// Small dense solvers shared by the Floquet recursion and the steady-state
// extraction.

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <sstream>
#include <string>

#include "qdcav/errors.hpp"
#include "qdcav/quantum_core.hpp"

namespace qdcav::linalg {

struct SolveResult {
    Mat x;
    double rcond = 0.0;
    int refinement_steps = 0;
};

// A X = B by LU with partial pivoting, followed by up to `max_refine` steps
// of iterative refinement while the residual improves.
inline SolveResult solve_refined(const Mat& a, const Mat& b, const std::string& context, int max_refine = 2,
                                 double singular_rcond = 1e-15) {
    Eigen::PartialPivLU<Mat> lu(a);
    SolveResult out;
    out.rcond = lu.rcond();
    if (!(out.rcond > singular_rcond)) {
        std::ostringstream os;
        os << "singular matrix in " << context << " (rcond estimate " << out.rcond << ")";
        throw NumericalError(os.str());
    }
    out.x = lu.solve(b);
    const double bnorm = b.norm();
    double res = (b - a * out.x).norm();
    for (int k = 0; k < max_refine && res > 1e-14 * bnorm; ++k) {
        Mat r = b - a * out.x;
        Mat cand = out.x + lu.solve(r);
        double cres = (b - a * cand).norm();
        if (!(cres < res)) break;
        out.x = std::move(cand);
        res = cres;
        ++out.refinement_steps;
    }
    if (!out.x.allFinite()) throw NumericalError("non-finite solution in " + context);
    return out;
}

struct NullVector {
    Vec v;
    double smallest = 0.0;       // smallest singular value
    double second_smallest = 0.0;
    double largest = 0.0;
};

// Right singular vector of the smallest singular value. Throws when the
// second-smallest singular value is also numerically zero.
inline NullVector null_vector(const Mat& m, double degenerate_rel = 1e-9) {
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();  // descending
    const Eigen::Index n = s.size();
    NullVector out;
    out.v = svd.matrixV().col(n - 1);
    out.smallest = s(n - 1);
    out.second_smallest = n > 1 ? s(n - 2) : s(n - 1);
    out.largest = s(0);
    if (n > 1 && out.second_smallest <= degenerate_rel * out.largest) {
        std::ostringstream os;
        os << "degenerate null space: two smallest singular values " << out.smallest << " and "
           << out.second_smallest << " (largest " << out.largest << ")";
        throw NumericalError(os.str());
    }
    return out;
}

}  // namespace qdcav::linalg
