#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "ddc/lmi.hpp"

// Log-barrier path-following for the homogeneous strict feasibility problem
//
//   max t   s.t.   L_k(v) - t I >= 0  for every PSD block,  |v|^2 < 1,
//
// where v parameterizes the nullspace of the equality constraints. Strict
// feasibility (t* > 0) rescales to the requested offsets because the block
// maps are linear in Q. Problem sizes here are tiny (blocks <= ~10, a few
// hundred variables), so dense Newton steps are cheap.

namespace ddc {

namespace {

struct BlockData {
    int size;
    std::vector<Matrix> basis_maps;   // symmetrized L(basis_i), normalized
    double scale;                     // normalization factor applied
};

Matrix equality_matrix(const LmiProblem& problem) {
    const int vars = problem.var_rows * problem.var_cols;
    Matrix aeq = Matrix::Zero(static_cast<Eigen::Index>(problem.equalities.size()), vars);
    for (size_t r = 0; r < problem.equalities.size(); ++r) {
        for (const auto& [var, coeff] : problem.equalities[r].terms) {
            aeq(static_cast<Eigen::Index>(r), var) += coeff;
        }
    }
    return aeq;
}

Matrix nullspace_basis(const Matrix& aeq, int vars) {
    if (aeq.rows() == 0) return Matrix::Identity(vars, vars);
    Eigen::JacobiSVD<Matrix> svd(aeq, Eigen::ComputeFullV);
    const Vector sv = svd.singularValues();
    const double tol = std::max(aeq.rows(), aeq.cols()) * (sv.size() ? sv(0) : 0.0) * 1e-12;
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > tol) ++rank;
    }
    return svd.matrixV().rightCols(vars - rank);
}

Matrix apply_block_map(const PsdBlock& block, const Vector& direction) {
    Matrix value = Matrix::Zero(block.size, block.size);
    for (const auto& c : block.coefficients) {
        value(c.row % block.size, c.row / block.size) += c.value * direction(c.var);
    }
    return 0.5 * (value + value.transpose());
}

bool all_positive_definite(const std::vector<BlockData>& blocks, const Vector& v, double t,
                           std::vector<Eigen::LLT<Matrix>>* factors) {
    if (factors) factors->clear();
    for (const auto& block : blocks) {
        Matrix s = -t * Matrix::Identity(block.size, block.size);
        for (size_t i = 0; i < block.basis_maps.size(); ++i) {
            s.noalias() += v(static_cast<Eigen::Index>(i)) * block.basis_maps[i];
        }
        Eigen::LLT<Matrix> llt(s);
        if (llt.info() != Eigen::Success) return false;
        if (factors) factors->push_back(std::move(llt));
    }
    return true;
}

}  // namespace

BackendResult BarrierBackend::solve(const LmiProblem& problem) const {
    const int vars = problem.var_rows * problem.var_cols;
    if (vars <= 0 || problem.blocks.empty()) {
        throw std::invalid_argument("BarrierBackend: empty problem");
    }
    for (const auto& block : problem.blocks) {
        if (block.offset < 0.0) {
            throw std::invalid_argument("BarrierBackend: negative block offset unsupported");
        }
    }

    const Matrix basis = nullspace_basis(equality_matrix(problem), vars);
    const int p = static_cast<int>(basis.cols());
    if (p == 0) {
        return {false, Matrix(), 0.0, "equality constraints leave no free variables"};
    }

    std::vector<BlockData> blocks;
    for (const auto& spec : problem.blocks) {
        BlockData data;
        data.size = spec.size;
        data.basis_maps.reserve(p);
        double sq_sum = 0.0;
        for (int i = 0; i < p; ++i) {
            Matrix f = apply_block_map(spec, basis.col(i));
            sq_sum += f.squaredNorm();
            data.basis_maps.push_back(std::move(f));
        }
        data.scale = std::sqrt(sq_sum / p) + 1e-300;
        for (auto& f : data.basis_maps) f /= data.scale;
        blocks.push_back(std::move(data));
    }

    Vector v = Vector::Zero(p);
    double t = -1.0;   // strictly feasible: all blocks are t*(-I) = I > 0, |v| = 0

    std::vector<Eigen::LLT<Matrix>> factors;
    double mu = options_.mu_initial;
    while (mu >= options_.mu_final) {
        for (int step = 0; step < options_.max_newton_steps; ++step) {
            if (!all_positive_definite(blocks, v, t, &factors)) {
                return {false, Matrix(), t, "interior point left the cone (numerical failure)"};
            }
            Vector grad = Vector::Zero(p + 1);
            Matrix hess = Matrix::Zero(p + 1, p + 1);
            for (size_t b = 0; b < blocks.size(); ++b) {
                const int d = blocks[b].size;
                const Matrix id = Matrix::Identity(d, d);
                const Matrix s_inv = factors[b].solve(id);
                std::vector<Matrix> g(p);
                for (int i = 0; i < p; ++i) g[i] = s_inv * blocks[b].basis_maps[i];
                for (int i = 0; i < p; ++i) {
                    grad(i) -= g[i].trace();
                    for (int j = i; j < p; ++j) {
                        const double value = g[i].cwiseProduct(g[j].transpose()).sum();
                        hess(i, j) += value;
                        hess(j, i) = hess(i, j);
                    }
                    const double cross = -g[i].cwiseProduct(s_inv).sum();   // S^{-1} symmetric
                    hess(i, p) += cross;
                    hess(p, i) = hess(i, p);
                }
                grad(p) += s_inv.trace();
                hess(p, p) += s_inv.squaredNorm();
            }
            // ball barrier -log(1 - |v|^2) and the objective -t/mu
            const double slack = 1.0 - v.squaredNorm();
            grad.head(p) += 2.0 * v / slack;
            hess.topLeftCorner(p, p) +=
                (2.0 / slack) * Matrix::Identity(p, p) + (4.0 / (slack * slack)) * v * v.transpose();
            grad(p) -= 1.0 / mu;

            Eigen::LDLT<Matrix> ldlt(hess);
            if (ldlt.info() != Eigen::Success) break;
            const Vector delta = ldlt.solve(-grad);
            const double decrement = -grad.dot(delta);
            double alpha = 1.0;
            auto acceptable = [&](double a) {
                const Vector v_try = v + a * delta.head(p);
                const double t_try = t + a * delta(p);
                return v_try.squaredNorm() < 1.0 &&
                       all_positive_definite(blocks, v_try, t_try, nullptr);
            };
            while (alpha > 1e-14 && !acceptable(alpha)) alpha *= 0.5;
            if (alpha <= 1e-14) break;
            v += alpha * delta.head(p);
            t += alpha * delta(p);
            if (decrement < 1e-12) break;
        }
        mu *= options_.mu_factor;
    }

    if (!(t > options_.feasibility_threshold)) {
        return {false, Matrix(), t, "strict feasibility margin not positive"};
    }

    // Reconstruct Q and rescale so every block clears its offset.
    const Vector vec_q = basis * v;
    Matrix q = Eigen::Map<const Matrix>(vec_q.data(), problem.var_rows, problem.var_cols);
    double factor = 0.0;
    for (const auto& spec : problem.blocks) {
        const Matrix value = apply_block_map(spec, vec_q);
        Eigen::SelfAdjointEigenSolver<Matrix> eig(value);
        const double min_eig = eig.eigenvalues().minCoeff();
        if (min_eig <= 0.0) {
            return {false, Matrix(), t, "rescaling failed: block not strictly positive"};
        }
        if (spec.offset > 0.0) factor = std::max(factor, spec.offset / min_eig);
    }
    if (factor == 0.0) factor = 1.0;
    q *= 1.05 * factor;   // small headroom over the binding offset
    return {true, q, t, "feasible"};
}

}  // namespace ddc
