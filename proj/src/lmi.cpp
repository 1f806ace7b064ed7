#include "ddc/lmi.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace ddc {

using nlohmann::json;

Matrix PsdBlock::evaluate(const Matrix& q) const {
    Matrix value = Matrix::Zero(size, size);
    const Eigen::Map<const Vector> vq(q.data(), q.size());
    for (const auto& c : coefficients) {
        value(c.row % size, c.row / size) += c.value * vq(c.var);
    }
    return value;
}

double LinearFunctional::evaluate(const Matrix& q) const {
    const Eigen::Map<const Vector> vq(q.data(), q.size());
    double value = 0.0;
    for (const auto& [var, coeff] : terms) value += coeff * vq(var);
    return value;
}

json LmiProblem::to_json() const {
    json j;
    j["var_rows"] = var_rows;
    j["var_cols"] = var_cols;
    j["delta"] = delta;
    j["scale"] = scale;
    j["equalities"] = json::array();
    for (const auto& eq : equalities) {
        json terms = json::array();
        for (const auto& [var, coeff] : eq.terms) terms.push_back({var, coeff});
        j["equalities"].push_back(std::move(terms));
    }
    j["psd_blocks"] = json::array();
    for (const auto& block : blocks) {
        json b;
        b["size"] = block.size;
        b["offset"] = block.offset;
        b["margin_slack"] = block.margin_slack;
        json coeffs = json::array();
        for (const auto& c : block.coefficients) coeffs.push_back({c.row, c.var, c.value});
        b["coefficients"] = std::move(coeffs);
        j["psd_blocks"].push_back(std::move(b));
    }
    return j;
}

LmiProblem LmiProblem::from_json(const json& j) {
    LmiProblem p;
    p.var_rows = j.at("var_rows").get<int>();
    p.var_cols = j.at("var_cols").get<int>();
    p.delta = j.at("delta").get<double>();
    p.scale = j.value("scale", 1.0);
    for (const auto& eq : j.at("equalities")) {
        LinearFunctional f;
        for (const auto& term : eq) f.terms.emplace_back(term[0].get<int>(), term[1].get<double>());
        p.equalities.push_back(std::move(f));
    }
    for (const auto& b : j.at("psd_blocks")) {
        PsdBlock block;
        block.size = b.at("size").get<int>();
        block.offset = b.at("offset").get<double>();
        block.margin_slack = b.value("margin_slack", 1e-6);
        for (const auto& c : b.at("coefficients")) {
            block.coefficients.push_back(
                {c[0].get<int>(), c[1].get<int>(), c[2].get<double>()});
        }
        p.blocks.push_back(std::move(block));
    }
    return p;
}

namespace {

// Block L(Q) = M Q on the d x d block: entry (r, c) of the block gets
// M(r, k) * Q(k, c).
void add_product_coefficients(PsdBlock& block, const Matrix& m, int var_rows, double sign) {
    const int d = block.size;
    for (int c = 0; c < d; ++c) {
        for (int r = 0; r < d; ++r) {
            for (int k = 0; k < var_rows; ++k) {
                const double value = sign * m(r, k);
                if (value != 0.0) {
                    block.coefficients.push_back({r + c * d, k + c * var_rows, value});
                }
            }
        }
    }
}

// -(MQ + (MQ)^T) on the block.
void add_negated_sym_coefficients(PsdBlock& block, const Matrix& m, int var_rows) {
    const int d = block.size;
    for (int c = 0; c < d; ++c) {
        for (int r = 0; r < d; ++r) {
            for (int k = 0; k < var_rows; ++k) {
                if (m(r, k) != 0.0) {
                    block.coefficients.push_back({r + c * d, k + c * var_rows, -m(r, k)});
                }
                if (m(c, k) != 0.0) {
                    block.coefficients.push_back({r + c * d, k + r * var_rows, -m(c, k)});
                }
            }
        }
    }
}

void add_symmetry_equalities(LmiProblem& problem, const Matrix& z) {
    const int d = static_cast<int>(z.rows());
    const int rows = problem.var_rows;
    for (int r = 0; r < d; ++r) {
        for (int c = r + 1; c < d; ++c) {
            LinearFunctional f;
            for (int k = 0; k < rows; ++k) {
                if (z(r, k) != 0.0) f.terms.emplace_back(k + c * rows, z(r, k));
                if (z(c, k) != 0.0) f.terms.emplace_back(k + r * rows, -z(c, k));
            }
            problem.equalities.push_back(std::move(f));
        }
    }
}

LmiProblem encode_pair(const Matrix& z, const Matrix& w, int columns, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("encode: delta must be positive");
    LmiProblem problem;
    problem.var_rows = static_cast<int>(z.cols());
    problem.var_cols = columns;
    problem.delta = delta;
    problem.scale = std::max(1e-300, std::max(z.norm(), w.norm()));

    PsdBlock gram;   // Z Q - I >= 0
    gram.size = columns;
    gram.offset = 1.0;
    gram.margin_slack = 1e-6;
    add_product_coefficients(gram, z, problem.var_rows, 1.0);
    problem.blocks.push_back(std::move(gram));

    PsdBlock decay;   // -(WQ + (WQ)^T) - delta I >= 0
    decay.size = columns;
    decay.offset = delta;
    decay.margin_slack = 1e-3;
    add_negated_sym_coefficients(decay, w, problem.var_rows);
    problem.blocks.push_back(std::move(decay));

    add_symmetry_equalities(problem, z);
    return problem;
}

}  // namespace

LmiProblem encode_state_lmi(const StateBatch& batch, double delta) {
    Matrix d_map = Matrix::Zero(batch.n() + batch.m(), batch.n());
    d_map.topRows(batch.n()) = batch.gamma * Matrix::Identity(batch.n(), batch.n());
    const Matrix w = batch.Zdot - d_map * batch.E;
    return encode_pair(batch.Z, w, batch.n() + batch.m(), delta);
}

LmiProblem encode_output_lmi(const OutputBatch& batch, double delta) {
    return encode_pair(batch.Za, batch.Zadot, 3 * batch.n(), delta);
}

LmiProblem encode_baseline_lmi(const BaselineBatch& batch, double delta) {
    return encode_pair(batch.X, batch.Xdot, static_cast<int>(batch.X.rows()), delta);
}

LmiSolution solve(const LmiProblem& problem, const LmiBackend& backend) {
    BackendResult result;
    try {
        result = backend.solve(problem);
    } catch (const std::exception& e) {
        LmiSolution failure;
        failure.status = SolveStatus::BackendFailure;
        failure.message = std::string("backend threw: ") + e.what();
        return failure;
    }

    LmiSolution solution;
    solution.certificate = result.certificate;
    solution.message = result.message;
    if (!result.feasible) {
        solution.status = SolveStatus::Infeasible;
        return solution;
    }

    // Residuals recomputed here, independent of whatever the backend did.
    solution.Q = result.Q;
    solution.equality_residual = 0.0;
    for (const auto& eq : problem.equalities) {
        solution.equality_residual =
            std::max(solution.equality_residual, std::abs(eq.evaluate(result.Q)));
    }
    bool accepted = solution.equality_residual <= 1e-7 * problem.scale * result.Q.norm();
    for (const auto& block : problem.blocks) {
        const Matrix value = block.evaluate(result.Q);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (value + value.transpose()));
        const double min_eig = eig.eigenvalues().minCoeff();
        solution.block_min_eigs.push_back(min_eig);
        if (min_eig < block.offset * (1.0 - block.margin_slack)) accepted = false;
    }
    if (!accepted) {
        solution.status = SolveStatus::BackendFailure;
        solution.message = "solver-inconsistency: recomputed residuals violate the contract";
        return solution;
    }
    solution.status = SolveStatus::Feasible;
    return solution;
}

LmiSolution solve(const LmiProblem& problem) {
    return solve(problem, BarrierBackend());
}

namespace {

GainResult certify(Matrix k, Matrix k_full, const Matrix* closed_loop) {
    GainResult result;
    result.K = std::move(k);
    result.K_full = std::move(k_full);
    if (closed_loop) {
        result.closed_loop = *closed_loop;
        const HurwitzCheck check = is_hurwitz(result.closed_loop, 1e-9);
        result.abscissa = check.abscissa;
        result.certification = check.hurwitz ? Certification::Certified : Certification::Failed;
    }
    return result;
}

Matrix gain_from(const Matrix& u, const Matrix& z, const Matrix& q) {
    const Matrix zq = z * q;
    Eigen::JacobiSVD<Matrix> svd(zq);
    const Vector sv = svd.singularValues();
    if (sv(sv.size() - 1) <= 1e-12 * sv(0)) {
        throw std::runtime_error("gain: ZQ is singular, contract ZQ >= I violated");
    }
    return u * q * zq.inverse();
}

}  // namespace

GainResult gain_state(const StateBatch& batch, const Matrix& q,
                      const StatePlant* ground_truth, const StateFilterParams* params) {
    const Matrix k = gain_from(batch.U, batch.Z, q);
    if (ground_truth) {
        StateFilterParams filter{batch.lambda, batch.gamma};
        if (params) filter = *params;
        const StateRealization real = state_realization(*ground_truth, filter);
        const Matrix closed = real.F + real.G * k;
        return certify(k, k, &closed);
    }
    return certify(k, k, nullptr);
}

GainResult gain_output(const OutputBatch& batch, const Matrix& q,
                       const OutputRealization* oracle) {
    const Matrix k_full = gain_from(batch.U, batch.Za, q);
    const int n = batch.n();
    const Matrix k = k_full.rightCols(2 * n);   // projection [0; I_{2n}]
    if (oracle) {
        const Matrix closed = oracle->F + oracle->g * k;
        return certify(k, k_full, &closed);
    }
    return certify(k, k_full, nullptr);
}

GainResult gain_baseline(const BaselineBatch& batch, const Matrix& q,
                         const StatePlant* ground_truth) {
    const Matrix k = gain_from(batch.U, batch.X, q);
    if (ground_truth) {
        const Matrix closed = ground_truth->A + ground_truth->B * k;
        return certify(k, k, &closed);
    }
    return certify(k, k, nullptr);
}

std::pair<Matrix, Matrix> identify_fg(const StateBatch& batch) {
    const ExcitationReport excitation = check_excitation_state(batch);
    if (!excitation.exciting()) {
        throw std::runtime_error("identify_fg: batch is not exciting, identification impossible");
    }
    const int n = batch.n();
    const int m = batch.m();
    Matrix d_map = Matrix::Zero(n + m, n);
    d_map.topRows(n) = batch.gamma * Matrix::Identity(n, n);
    Matrix regressor(n + 2 * m, batch.N());
    regressor << batch.Z, batch.U;
    const Matrix target = batch.Zdot - d_map * batch.E;
    // [F G] = target * pinv([Z; U])
    const Matrix fg = solve_linear(regressor.transpose(), target.transpose(), true).transpose();
    return {fg.leftCols(n + m), fg.rightCols(m)};
}

}  // namespace ddc
