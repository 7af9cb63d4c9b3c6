#include "agingmimo/linalg.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace agingmimo {

MatC hermitize(const MatC& a) { return 0.5 * (a + a.adjoint()); }

cxd frob_inner(const MatC& a, const MatC& b) { return (a.array() * b.array().conjugate()).sum(); }

MatC solve_hpsd(const MatC& a, const MatC& b, double rel_floor) {
    Eigen::LLT<MatC> llt(a);
    if (llt.info() == Eigen::Success) return llt.solve(b);
    const double floor = rel_floor * std::max(a.real().trace() / a.rows(), 1e-300);
    MatC floored = a + floor * MatC::Identity(a.rows(), a.cols());
    Eigen::LDLT<MatC> ldlt(floored);
    return ldlt.solve(b);
}

MatC inv_sqrt_hpsd(const MatC& a, double rel_floor, bool allow_floor) {
    Eigen::SelfAdjointEigenSolver<MatC> eig(a);
    VecR lam = eig.eigenvalues();
    const double lam_max = lam.maxCoeff();
    const double floor = rel_floor * std::max(lam_max, 0.0);
    VecR inv_sqrt(lam.size());
    for (int i = 0; i < lam.size(); ++i) {
        double l = lam(i);
        if (allow_floor && l < floor) l = floor;
        inv_sqrt(i) = 1.0 / std::sqrt(l);
    }
    return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().adjoint();
}

double min_eigenvalue(const MatC& a) {
    Eigen::SelfAdjointEigenSolver<MatC> eig(a, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

MatC psd_factor(const MatC& a) {
    Eigen::SelfAdjointEigenSolver<MatC> eig(a);
    VecR lam = eig.eigenvalues().cwiseMax(0.0);
    return eig.eigenvectors() * lam.cwiseSqrt().asDiagonal();
}

MatC kron(const MatC& a, const MatC& b) {
    MatC out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

VecC vec(const MatC& m) {
    return Eigen::Map<const VecC>(m.data(), m.size());
}

MatC unvec(const VecC& v, int rows, int cols) {
    return Eigen::Map<const MatC>(v.data(), rows, cols);
}

}  // namespace agingmimo
