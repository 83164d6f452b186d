#pragma once

#include "surfdg/assembly.hpp"

#include <Eigen/Core>

namespace surfdg {

enum class Preconditioner { None, Jacobi };

struct SolverOptions {
    /// Relative residual target ||b - Ax|| / ||b||.
    double tol = 1e-10;
    /// 0 selects 10 * n.
    std::size_t max_iter = 0;
    Preconditioner precond = Preconditioner::Jacobi;
};

struct SolveReport {
    Eigen::VectorXd solution;
    std::size_t iterations = 0;
    /// True residual of the returned solution.
    double final_relative_residual = 0.0;
    bool converged = false;
};

/// Multiplication by the inverse diagonal. Throws ZeroDiagonal.
class JacobiPreconditioner {
public:
    explicit JacobiPreconditioner(const CsrMatrix& matrix);

    Eigen::VectorXd apply(const Eigen::VectorXd& r) const;
    const Eigen::VectorXd& inverse_diagonal() const noexcept { return inv_diag_; }

private:
    Eigen::VectorXd inv_diag_;
};

JacobiPreconditioner jacobi_precondition(const CsrMatrix& matrix);

/// Preconditioned conjugate gradients. Throws NotSymmetric when
/// max|A - A^T| > 1e-10 max|A|, and SolverBreakdown when p^T A p <= 0.
/// Hitting max_iter returns a report with converged = false.
SolveReport cg(const CsrMatrix& matrix, const Eigen::VectorXd& rhs, const SolverOptions& options = {});
SolveReport cg(const SparseSystem& system, const SolverOptions& options = {});

/// Preconditioned BiCGSTAB. A rho or omega breakdown restarts the iteration
/// from the current iterate once; a second breakdown throws SolverBreakdown.
SolveReport bicgstab(const CsrMatrix& matrix, const Eigen::VectorXd& rhs,
                     const SolverOptions& options = {});
SolveReport bicgstab(const SparseSystem& system, const SolverOptions& options = {});

} // namespace surfdg
