#include "ddc/numkit.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ddc {

namespace {

void require_square(const Matrix& m, const char* who) {
    if (m.rows() != m.cols()) {
        std::ostringstream os;
        os << who << ": matrix must be square, got " << m.rows() << "x" << m.cols();
        throw std::invalid_argument(os.str());
    }
}

void require_finite(const Matrix& m, const char* who) {
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(who) + ": matrix has non-finite entries");
    }
}

// [m/m] Pade approximant of e^A, m = 13 (Higham 2005 coefficients).
Matrix pade13(const Matrix& a) {
    static const double b[] = {64764752532480000.0, 32382376266240000.0,
                               7771770303897600.0,  1187353796428800.0,
                               129060195264000.0,   10559470521600.0,
                               670442572800.0,      33522128640.0,
                               1323241920.0,        40840800.0,
                               960960.0,            16380.0,
                               182.0,               1.0};
    const Eigen::Index n = a.rows();
    const Matrix id = Matrix::Identity(n, n);
    const Matrix a2 = a * a;
    const Matrix a4 = a2 * a2;
    const Matrix a6 = a4 * a2;
    const Matrix u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) +
                          b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    const Matrix v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) +
                     b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
    return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Matrix expm(const Matrix& m) {
    require_square(m, "expm");
    require_finite(m, "expm");
    const double theta13 = 5.371920351148152;
    const double norm = m.cwiseAbs().colwise().sum().maxCoeff();  // 1-norm
    int squarings = 0;
    if (norm > theta13) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / theta13)));
    }
    Matrix result = pade13(m / std::ldexp(1.0, squarings));
    for (int i = 0; i < squarings; ++i) {
        result = result * result;
    }
    return result;
}

Spectrum spectrum(const Matrix& m) {
    require_square(m, "spectrum");
    require_finite(m, "spectrum");
    Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("spectrum: eigenvalue iteration failed to converge");
    }
    Spectrum result;
    result.eigenvalues = solver.eigenvalues();
    result.residual_bound = 0.0;
    const Eigen::MatrixXcd vectors = solver.eigenvectors();
    const Eigen::MatrixXcd mc = m.cast<std::complex<double>>();
    for (Eigen::Index i = 0; i < result.eigenvalues.size(); ++i) {
        const Eigen::VectorXcd v = vectors.col(i);
        const double residual = (mc * v - result.eigenvalues(i) * v).norm();
        result.residual_bound = std::max(result.residual_bound, residual);
    }
    return result;
}

HurwitzCheck is_hurwitz(const Matrix& m, double margin) {
    if (margin < 0.0) {
        throw std::invalid_argument("is_hurwitz: margin must be nonnegative");
    }
    const Spectrum spec = spectrum(m);
    double abscissa = -std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < spec.eigenvalues.size(); ++i) {
        abscissa = std::max(abscissa, spec.eigenvalues(i).real());
    }
    return {abscissa < -margin, abscissa};
}

RankResult numerical_rank(const Matrix& m, double tolerance) {
    require_finite(m, "numerical_rank");
    Eigen::JacobiSVD<Matrix> svd(m);
    RankResult result;
    result.singular_values = svd.singularValues();
    const double sigma_max = result.singular_values.size() > 0 ? result.singular_values(0) : 0.0;
    result.tolerance_used =
        tolerance >= 0.0
            ? tolerance
            : static_cast<double>(std::max(m.rows(), m.cols())) * sigma_max * 1e-12;
    result.rank = 0;
    for (Eigen::Index i = 0; i < result.singular_values.size(); ++i) {
        if (result.singular_values(i) > result.tolerance_used) ++result.rank;
    }
    return result;
}

Matrix solve_linear(const Matrix& a, const Matrix& rhs, bool least_squares) {
    require_finite(a, "solve_linear");
    require_finite(rhs, "solve_linear");
    if (a.rows() != rhs.rows()) {
        throw std::invalid_argument("solve_linear: row counts of a and rhs differ");
    }
    if (least_squares || a.rows() != a.cols()) {
        Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
        return svd.solve(rhs);
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    const Vector sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    const double smax = sv(0);
    if (smin <= smax * 1e-12) {
        std::ostringstream os;
        os << "solve_linear: matrix is singular or ill-conditioned (cond ~ "
           << (smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity()) << ")";
        throw std::runtime_error(os.str());
    }
    return a.partialPivLu().solve(rhs);
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

Matrix solve_stacked(Eigen::Index rows, Eigen::Index cols,
                     const std::vector<MatrixEquation>& equations,
                     double residual_tol) {
    const Eigen::Index unknowns = rows * cols;
    Eigen::Index total_rows = 0;
    for (const auto& eq : equations) total_rows += eq.rhs.size();

    Matrix system = Matrix::Zero(total_rows, unknowns);
    Vector rhs(total_rows);
    Eigen::Index offset = 0;
    for (const auto& eq : equations) {
        if (eq.terms.empty()) {
            throw std::invalid_argument("solve_stacked: equation without terms");
        }
        Matrix block = Matrix::Zero(eq.rhs.size(), unknowns);
        for (const auto& [left, right] : eq.terms) {
            if (left.cols() != rows || right.rows() != cols ||
                left.rows() != eq.rhs.rows() || right.cols() != eq.rhs.cols()) {
                throw std::invalid_argument("solve_stacked: term dimensions inconsistent");
            }
            // vec(L X R) = (R^T kron L) vec(X), column-major.
            block += kron(right.transpose(), left);
        }
        system.block(offset, 0, eq.rhs.size(), unknowns) = block;
        rhs.segment(offset, eq.rhs.size()) =
            Eigen::Map<const Vector>(eq.rhs.data(), eq.rhs.size());
        offset += eq.rhs.size();
    }

    Eigen::JacobiSVD<Matrix> svd(system, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector solution = svd.solve(rhs);
    const double residual = (system * solution - rhs).norm();
    if (residual > residual_tol * (1.0 + rhs.norm())) {
        std::ostringstream os;
        os << "solve_stacked: system inconsistent, residual " << residual;
        throw std::runtime_error(os.str());
    }
    return Eigen::Map<const Matrix>(solution.data(), rows, cols);
}

}  // namespace ddc
