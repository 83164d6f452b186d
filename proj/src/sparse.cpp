#include "surfdg/assembly.hpp"

#include "parallel.hpp"
#include "surfdg/errors.hpp"

#include <algorithm>
#include <cmath>

namespace surfdg {

void CsrMatrix::multiply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const
{
    if (static_cast<std::size_t>(x.size()) != cols) {
        throw InvalidArgument("matrix-vector size mismatch");
    }
    y.resize(static_cast<Eigen::Index>(rows));
    detail::parallel_for(rows, [&](std::size_t i) {
        double sum = 0.0;
        for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
            sum += values[k] * x[static_cast<Eigen::Index>(columns[k])];
        }
        y[static_cast<Eigen::Index>(i)] = sum;
    });
}

Eigen::VectorXd CsrMatrix::operator*(const Eigen::VectorXd& x) const
{
    Eigen::VectorXd y;
    multiply(x, y);
    return y;
}

double CsrMatrix::at(std::size_t i, std::size_t j) const
{
    if (i >= rows || j >= cols) {
        throw InvalidArgument("matrix index out of range");
    }
    const auto first = columns.begin() + static_cast<std::ptrdiff_t>(row_offsets[i]);
    const auto last = columns.begin() + static_cast<std::ptrdiff_t>(row_offsets[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    return (it != last && *it == j) ? values[static_cast<std::size_t>(it - columns.begin())] : 0.0;
}

Eigen::VectorXd CsrMatrix::diagonal() const
{
    Eigen::VectorXd d(static_cast<Eigen::Index>(std::min(rows, cols)));
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        d[i] = at(static_cast<std::size_t>(i), static_cast<std::size_t>(i));
    }
    return d;
}

double CsrMatrix::max_abs() const
{
    double m = 0.0;
    for (double v : values) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

Eigen::MatrixXd CsrMatrix::to_dense() const
{
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                              static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(columns[k])) += values[k];
        }
    }
    return d;
}

} // namespace surfdg
