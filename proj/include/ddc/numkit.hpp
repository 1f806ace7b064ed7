#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

// Dense small-matrix numerical kernel: matrix exponential, eigenvalues,
// linear/stacked solves, numerical rank, definiteness and Hurwitz tests.
// All functions are pure; dimension or conditioning problems throw.

namespace ddc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

struct Spectrum {
    ComplexVector eigenvalues;   // conjugate pairs adjacent
    double residual_bound;       // max_i ||M v_i - lambda_i v_i|| over unit eigenvectors
};

struct HurwitzCheck {
    bool hurwitz;
    double abscissa;             // max real part of the spectrum
};

struct RankResult {
    Eigen::Index rank;
    Vector singular_values;      // descending
    double tolerance_used;
};

// e^M by scaling-and-squaring with a degree-13 Pade approximant.
Matrix expm(const Matrix& m);

Spectrum spectrum(const Matrix& m);

// true iff the spectral abscissa of m is below -margin.
HurwitzCheck is_hurwitz(const Matrix& m, double margin = 0.0);

// Rank = number of singular values above tol; default tol is
// max(rows, cols) * sigma_max * 1e-12 (exact-data regime).
RankResult numerical_rank(const Matrix& m, double tolerance = -1.0);

// Solves a * x = rhs. Square systems are condition-guarded; pass
// least_squares = true for rectangular or deliberately rank-deficient use.
Matrix solve_linear(const Matrix& a, const Matrix& rhs, bool least_squares = false);

// One relation  sum_k  L_k * X * R_k = rhs  of a stacked linear system in X.
// Scalar-shaped factors are allowed (e.g. row vector left, column right).
struct MatrixEquation {
    std::vector<std::pair<Matrix, Matrix>> terms;   // (left, right) pairs
    Matrix rhs;
};

// Least-squares solve for the X (rows x cols) satisfying all equations,
// via Kronecker vectorization. Throws if the stacked system is inconsistent
// beyond residual_tol (relative).
Matrix solve_stacked(Eigen::Index rows, Eigen::Index cols,
                     const std::vector<MatrixEquation>& equations,
                     double residual_tol = 1e-8);

Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace ddc
