#include "surfdg/solvers.hpp"

#include "surfdg/errors.hpp"

#include <cmath>
#include <limits>
#include <optional>

namespace surfdg {

namespace {

void check_system(const CsrMatrix& A, const Eigen::VectorXd& b)
{
    if (A.rows != A.cols) {
        throw InvalidArgument("solver requires a square matrix");
    }
    if (static_cast<std::size_t>(b.size()) != A.rows) {
        throw InvalidArgument("right-hand side does not match the matrix");
    }
    if (!b.allFinite()) {
        throw InvalidArgument("right-hand side is not finite");
    }
}

std::size_t iteration_cap(const CsrMatrix& A, const SolverOptions& options)
{
    return options.max_iter ? options.max_iter : 10 * A.rows;
}

class Precond {
public:
    Precond(const CsrMatrix& A, Preconditioner kind)
    {
        if (kind == Preconditioner::Jacobi) {
            jacobi_.emplace(A);
        }
    }

    Eigen::VectorXd operator()(const Eigen::VectorXd& r) const
    {
        return jacobi_ ? jacobi_->apply(r) : r;
    }

private:
    std::optional<JacobiPreconditioner> jacobi_;
};

double relative_residual(const CsrMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b,
                         double b_norm)
{
    return (b - A * x).norm() / b_norm;
}

SolveReport trivial_report(const Eigen::VectorXd& b)
{
    SolveReport report;
    report.solution = Eigen::VectorXd::Zero(b.size());
    report.converged = true;
    return report;
}

} // namespace

JacobiPreconditioner::JacobiPreconditioner(const CsrMatrix& matrix)
{
    const Eigen::VectorXd d = matrix.diagonal();
    inv_diag_.resize(d.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (d[i] == 0.0 || !std::isfinite(d[i])) {
            throw ZeroDiagonal("zero diagonal entry in row " + std::to_string(i));
        }
        inv_diag_[i] = 1.0 / d[i];
    }
}

Eigen::VectorXd JacobiPreconditioner::apply(const Eigen::VectorXd& r) const
{
    if (r.size() != inv_diag_.size()) {
        throw InvalidArgument("preconditioner size mismatch");
    }
    return inv_diag_.cwiseProduct(r);
}

JacobiPreconditioner jacobi_precondition(const CsrMatrix& matrix)
{
    return JacobiPreconditioner(matrix);
}

SolveReport cg(const CsrMatrix& A, const Eigen::VectorXd& b, const SolverOptions& options)
{
    check_system(A, b);
    const double asym = check_symmetry(A);
    if (asym > 1e-10 * A.max_abs()) {
        throw NotSymmetric("matrix is not symmetric: max|A - A^T| = " + std::to_string(asym));
    }
    const double b_norm = b.norm();
    if (b_norm == 0.0) {
        return trivial_report(b);
    }
    const Precond M(A, options.precond);
    const std::size_t cap = iteration_cap(A, options);

    SolveReport report;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd r = b;
    Eigen::VectorXd z = M(r);
    Eigen::VectorXd p = z;
    Eigen::VectorXd Ap(b.size());
    double rz = r.dot(z);

    std::size_t k = 0;
    while (k < cap) {
        A.multiply(p, Ap);
        const double pAp = p.dot(Ap);
        if (!(pAp > 0.0)) {
            throw SolverBreakdown("CG breakdown: p^T A p = " + std::to_string(pAp) +
                                  " (matrix not positive definite; penalty too small?)");
        }
        const double alpha = rz / pAp;
        x += alpha * p;
        r -= alpha * Ap;
        ++k;
        if (r.norm() / b_norm <= options.tol) {
            r = b - A * x;
            if (r.norm() / b_norm <= options.tol) {
                break;
            }
            z = M(r);
            p = z;
            rz = r.dot(z);
            continue;
        }
        z = M(r);
        const double rz_next = r.dot(z);
        p = z + (rz_next / rz) * p;
        rz = rz_next;
    }
    report.iterations = k;
    report.final_relative_residual = relative_residual(A, x, b, b_norm);
    report.converged = report.final_relative_residual <= options.tol;
    report.solution = std::move(x);
    return report;
}

SolveReport cg(const SparseSystem& system, const SolverOptions& options)
{
    return cg(system.matrix, system.rhs, options);
}

SolveReport bicgstab(const CsrMatrix& A, const Eigen::VectorXd& b, const SolverOptions& options)
{
    check_system(A, b);
    const double b_norm = b.norm();
    if (b_norm == 0.0) {
        return trivial_report(b);
    }
    const Precond M(A, options.precond);
    const std::size_t cap = iteration_cap(A, options);
    constexpr double tiny = std::numeric_limits<double>::min() * 1e10;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd r = b;
    Eigen::VectorXd r_hat = r;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(b.size());
    Eigen::VectorXd s, t, y, z;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    int restarts = 0;

    auto reset = [&] {
        r = b - A * x;
        r_hat = r;
        p.setZero();
        v.setZero();
        rho = alpha = omega = 1.0;
    };
    auto restart = [&](const char* what) {
        if (restarts++ > 0) {
            throw SolverBreakdown(std::string("BiCGSTAB breakdown: ") + what);
        }
        reset();
    };

    std::size_t k = 0;
    while (k < cap) {
        const double rho_next = r_hat.dot(r);
        if (std::abs(rho_next) < tiny * r_hat.norm() * r.norm() || std::abs(rho_next) < tiny) {
            restart("rho vanished");
            continue;
        }
        const double beta = (rho_next / rho) * (alpha / omega);
        rho = rho_next;
        p = r + beta * (p - omega * v);
        y = M(p);
        A.multiply(y, v);
        const double rv = r_hat.dot(v);
        if (std::abs(rv) < tiny) {
            restart("r_hat . v vanished");
            continue;
        }
        alpha = rho / rv;
        s = r - alpha * v;
        ++k;
        if (s.norm() / b_norm <= options.tol) {
            x += alpha * y;
            if (relative_residual(A, x, b, b_norm) <= options.tol) {
                break;
            }
            reset();
            continue;
        }
        z = M(s);
        A.multiply(z, t);
        const double tt = t.dot(t);
        if (tt < tiny) {
            x += alpha * y;
            restart("t vanished");
            continue;
        }
        omega = t.dot(s) / tt;
        x += alpha * y + omega * z;
        r = s - omega * t;
        if (r.norm() / b_norm <= options.tol) {
            if (relative_residual(A, x, b, b_norm) <= options.tol) {
                break;
            }
            reset();
            continue;
        }
        if (std::abs(omega) < tiny) {
            restart("omega vanished");
        }
    }
    SolveReport report;
    report.iterations = k;
    report.final_relative_residual = relative_residual(A, x, b, b_norm);
    report.converged = report.final_relative_residual <= options.tol;
    report.solution = std::move(x);
    return report;
}

SolveReport bicgstab(const SparseSystem& system, const SolverOptions& options)
{
    return bicgstab(system.matrix, system.rhs, options);
}

} // namespace surfdg
