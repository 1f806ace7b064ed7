#include "ddc/realization.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ddc {

namespace {

// Product of (s + r) over roots, coefficients ascending.
Vector poly_from_negated_roots(const std::vector<double>& roots) {
    Vector p = Vector::Zero(roots.size() + 1);
    p(0) = 1.0;
    Eigen::Index degree = 0;
    for (double r : roots) {
        Vector next = Vector::Zero(p.size());
        next.segment(1, degree + 1) += p.segment(0, degree + 1);
        next.segment(0, degree + 1) += r * p.segment(0, degree + 1);
        p = next;
        ++degree;
    }
    return p;
}

// Columns: coefficients (ascending, degree <= n-1) of gamma_i prod_{j != i} (s + lambda_j),
// the i-th component of adj(sI - Lambda) ell for diagonal Lambda.
Matrix adjugate_matching_matrix(const OutputFilterParams& params) {
    const int n = params.order();
    Matrix match = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> others;
        for (int j = 0; j < n; ++j) {
            if (j != i) others.push_back(params.lambdas(j));
        }
        match.col(i) = params.gammas(i) * poly_from_negated_roots(others);
    }
    return match;
}

}  // namespace

void StateFilterParams::validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("StateFilterParams: lambda must be > 0");
    if (gamma == 0.0) throw std::invalid_argument("StateFilterParams: gamma must be nonzero");
}

void OutputFilterParams::validate() const {
    const int n = order();
    if (n < 1 || gammas.size() != n) {
        throw std::invalid_argument("OutputFilterParams: lambdas/gammas size mismatch");
    }
    double prev = 0.0;
    for (int i = 0; i < n; ++i) {
        if (!(lambdas(i) > prev)) {
            throw std::invalid_argument(
                "OutputFilterParams: lambdas must satisfy 0 < l1 < ... < ln");
        }
        prev = lambdas(i);
        if (gammas(i) == 0.0) {
            throw std::invalid_argument("OutputFilterParams: gammas must be nonzero");
        }
    }
}

Matrix OutputFilterParams::Lambda() const {
    return (-lambdas).asDiagonal();
}

StateRealization state_realization(const StatePlant& plant, const StateFilterParams& params) {
    params.validate();
    const int n = plant.n();
    const int m = plant.m();
    StateRealization real;
    real.F = Matrix::Zero(n + m, n + m);
    real.F.topLeftCorner(n, n) = plant.A;
    real.F.topRightCorner(n, m) = plant.B;
    real.F.bottomRightCorner(m, m) = -params.lambda * Matrix::Identity(m, m);
    real.G = Matrix::Zero(n + m, m);
    real.G.bottomRows(m) = params.gamma * Matrix::Identity(m, m);
    real.D = Matrix::Zero(n + m, n);
    real.D.topRows(n) = params.gamma * Matrix::Identity(n, n);
    return real;
}

OutputRealization output_realization(const OutputFilterParams& params,
                                     const Vector& theta1, const Vector& theta2) {
    params.validate();
    const int n = params.order();
    if (theta1.size() != n || theta2.size() != n) {
        throw std::invalid_argument("output_realization: theta dimension mismatch");
    }
    OutputRealization real;
    real.F = Matrix::Zero(2 * n, 2 * n);
    real.F.topLeftCorner(n, n) = params.Lambda() + params.ell() * theta1.transpose();
    real.F.topRightCorner(n, n) = params.ell() * theta2.transpose();
    real.F.bottomRightCorner(n, n) = params.Lambda();
    real.g = Vector::Zero(2 * n);
    real.g.tail(n) = params.ell();
    return real;
}

Matrix output_disturbance_map(const OutputFilterParams& params, const Vector& c) {
    const int n = params.order();
    Matrix d = Matrix::Zero(2 * n, c.size());
    d.topRows(n) = params.ell() * c.transpose();
    return d;
}

Trajectory run_state_filter(const StatePlant& plant, const Exosystem& exo, const Vector& x0,
                            const StateFilterParams& params, double horizon, double step) {
    plant.validate();
    params.validate();
    const int n = plant.n();
    const int m = plant.m();
    if (x0.size() != n) throw std::invalid_argument("run_state_filter: x0 dimension mismatch");

    LtiBlock plant_block;
    plant_block.A = plant.A;
    plant_block.B = plant.B;
    plant_block.from_input = Matrix::Identity(m, m);
    plant_block.x0 = x0;

    // zeta_hat' = -lambda zeta_hat + gamma [x; u], zeta_hat(0) = 0
    LtiBlock filter_block;
    filter_block.A = -params.lambda * Matrix::Identity(n + m, n + m);
    Matrix gain = Matrix::Zero(n + m, n + m);
    gain.topLeftCorner(n, n) = params.gamma * Matrix::Identity(n, n);
    gain.bottomRightCorner(m, m) = params.gamma * Matrix::Identity(m, m);
    filter_block.B = gain;
    Matrix from_input = Matrix::Zero(n + m, m);
    from_input.bottomRows(m).setIdentity();
    filter_block.from_input = from_input;
    Matrix from_plant = Matrix::Zero(n + m, n);
    from_plant.topRows(n).setIdentity();
    filter_block.from_blocks.emplace_back(0, from_plant);
    filter_block.x0 = Vector::Zero(n + m);

    return simulate_cascade({plant_block, filter_block}, exo, horizon, step);
}

Matrix error_batch(const Vector& x0, double lambda, double Ts, int count) {
    if (!(lambda > 0.0)) throw std::invalid_argument("error_batch: lambda must be > 0");
    if (count < 1) throw std::invalid_argument("error_batch: count must be >= 1");
    Matrix e(x0.size(), count);
    for (int k = 0; k < count; ++k) {
        e.col(k) = std::exp(-lambda * k * Ts) * x0;
    }
    return e;
}

Trajectory run_output_filter(const OutputPlant& plant, const Exosystem& exo, const Vector& x0,
                             const OutputFilterParams& params, double horizon, double step) {
    plant.validate();
    params.validate();
    const int n_plant = plant.n();
    const int n = params.order();
    if (x0.size() != n_plant) throw std::invalid_argument("run_output_filter: x0 dimension mismatch");

    LtiBlock plant_block;
    plant_block.A = plant.A;
    plant_block.B = plant.b;
    plant_block.from_input = Matrix::Identity(1, 1);
    plant_block.x0 = x0;

    // zeta_hat' = blkdiag(Lambda, Lambda) zeta_hat + [ell 0; 0 ell] [y; u]
    LtiBlock filter_block;
    filter_block.A = Matrix::Zero(2 * n, 2 * n);
    filter_block.A.topLeftCorner(n, n) = params.Lambda();
    filter_block.A.bottomRightCorner(n, n) = params.Lambda();
    Matrix gain = Matrix::Zero(2 * n, 2);
    gain.col(0).head(n) = params.ell();
    gain.col(1).tail(n) = params.ell();
    filter_block.B = gain;
    Matrix from_input = Matrix::Zero(2, 1);
    from_input(1, 0) = 1.0;   // u channel
    filter_block.from_input = from_input;
    Matrix from_plant = Matrix::Zero(2, n_plant);
    from_plant.row(0) = plant.c.transpose();   // y channel
    filter_block.from_blocks.emplace_back(0, from_plant);
    filter_block.x0 = Vector::Zero(2 * n);

    return simulate_cascade({plant_block, filter_block}, exo, horizon, step);
}

Trajectory run_chi(const OutputFilterParams& params, double horizon, double step) {
    params.validate();
    if (step <= 0.0) throw std::invalid_argument("run_chi: step must be positive");
    const long long steps = std::llround(horizon / step);
    if (std::abs(horizon / step - steps) > 1e-9) {
        throw std::invalid_argument("run_chi: horizon must be a multiple of the step");
    }
    const int n = params.order();
    const int points = static_cast<int>(steps) + 1;
    Trajectory traj;
    traj.step = step;
    traj.times = Vector::LinSpaced(points, 0.0, step * (points - 1));
    traj.state.resize(n, points);
    for (int k = 0; k < points; ++k) {
        traj.state.col(k) = (-params.lambdas * traj.times(k)).array().exp();
    }
    traj.deriv = params.Lambda() * traj.state;
    traj.input = Matrix::Zero(0, points);
    traj.spans = {{0, n}};
    return traj;
}

Vector characteristic_polynomial(const Matrix& a) {
    const Eigen::Index n = a.rows();
    if (a.cols() != n) throw std::invalid_argument("characteristic_polynomial: non-square");
    Vector coeffs = Vector::Zero(n + 1);
    coeffs(n) = 1.0;
    Matrix m = Matrix::Identity(n, n);
    for (Eigen::Index k = 1; k <= n; ++k) {
        m = a * m;
        const double c = -m.trace() / static_cast<double>(k);
        coeffs(n - k) = c;
        m += c * Matrix::Identity(n, n);
    }
    return coeffs;
}

Vector transfer_numerator(const Matrix& a, const Vector& b, const Vector& c) {
    // adj(sI - A) = sum_k M_k s^{n-1-k} with M_0 = I,
    // M_k = A M_{k-1} + c_{n-k} I from the Faddeev-LeVerrier recursion.
    const Eigen::Index n = a.rows();
    Vector numerator = Vector::Zero(n);
    Matrix m = Matrix::Identity(n, n);
    numerator(n - 1) = c.dot(b);
    for (Eigen::Index k = 1; k < n; ++k) {
        const Matrix am = a * m;
        const double coeff = -am.trace() / static_cast<double>(k);
        m = am + coeff * Matrix::Identity(n, n);
        numerator(n - 1 - k) = c.dot(m * b);
    }
    return numerator;
}

std::pair<Vector, Vector> oracle_theta(const OutputPlant& plant, const OutputFilterParams& params) {
    plant.validate();
    params.validate();
    const int n = plant.n();
    if (params.order() != n) {
        throw std::invalid_argument("oracle_theta: filter order must equal plant order");
    }

    std::vector<double> roots(params.lambdas.data(), params.lambdas.data() + n);
    const Vector char_filter = poly_from_negated_roots(roots);   // det(sI - Lambda)
    const Vector char_plant = characteristic_polynomial(plant.A);
    const Vector num_plant = transfer_numerator(plant.A, plant.b, plant.c);

    const Matrix match = adjugate_matching_matrix(params);
    Vector theta1, theta2;
    try {
        theta1 = solve_linear(match, (char_filter - char_plant).head(n));
        theta2 = solve_linear(match, num_plant);
    } catch (const std::runtime_error&) {
        throw std::runtime_error(
            "oracle_theta: coefficient-matching matrix singular; filter params violate "
            "the distinct-lambda / nonzero-gamma invariants");
    }

    const double scale = 1.0 + char_plant.norm() + num_plant.norm();
    const double res1 = (match * theta1 - (char_filter - char_plant).head(n)).norm();
    const double res2 = (match * theta2 - num_plant).norm();
    if (res1 > 1e-9 * scale || res2 > 1e-9 * scale) {
        throw std::runtime_error("oracle_theta: polynomial identity residual too large");
    }
    return {theta1, theta2};
}

PiHL oracle_pi_h_l(const OutputPlant& plant, const OutputFilterParams& params,
                   const Vector& theta1, const Vector& theta2, const Vector& x0) {
    plant.validate();
    params.validate();
    const int n = plant.n();
    const OutputRealization real = output_realization(params, theta1, theta2);

    // Pi F = A Pi, Pi g = b, c^T Pi = [th1^T th2^T], stacked and vectorized.
    Vector theta(2 * n);
    theta << theta1, theta2;
    std::vector<MatrixEquation> equations;
    equations.push_back({{{Matrix::Identity(n, n), real.F},
                          {-plant.A, Matrix::Identity(2 * n, 2 * n)}},
                         Matrix::Zero(n, 2 * n)});
    equations.push_back({{{Matrix::Identity(n, n), real.g}}, plant.b});
    equations.push_back(
        {{{plant.c.transpose(), Matrix::Identity(2 * n, 2 * n)}}, theta.transpose()});
    Matrix pi = solve_stacked(n, 2 * n, equations, 1e-8);

    PiHL result;
    result.Pi = pi;
    const Matrix pi1 = pi.leftCols(n);
    const Matrix closed = plant.A - pi1 * params.ell() * plant.c.transpose();
    Eigen::EigenSolver<Matrix> solver(closed);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("oracle_pi_h_l: eigensolver failed");
    }

    // Match eigenvectors to the diagonal order of Lambda.
    result.H = Matrix::Zero(n, n);
    std::vector<bool> used(n, false);
    for (int i = 0; i < n; ++i) {
        int best = -1;
        double best_gap = 1e-6;
        for (int j = 0; j < n; ++j) {
            if (used[j]) continue;
            const std::complex<double> ev = solver.eigenvalues()(j);
            const double gap = std::abs(ev - std::complex<double>(-params.lambdas(i), 0.0));
            if (gap < best_gap) {
                best_gap = gap;
                best = j;
            }
        }
        if (best < 0) {
            std::ostringstream os;
            os << "oracle_pi_h_l: spectrum of A - Pi1 ell c^T does not match Lambda "
               << "(assumption violation); missing eigenvalue " << -params.lambdas(i);
            throw std::runtime_error(os.str());
        }
        used[best] = true;
        Vector column = solver.eigenvectors().col(best).real();
        result.H.col(i) = column / column.norm();
    }

    const Vector weights = solve_linear(result.H, x0);
    result.L = result.H * weights.asDiagonal();
    return result;
}

}  // namespace ddc
