#pragma once

#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ddc/batching.hpp"
#include "ddc/numkit.hpp"

// Conic encoding of the stabilization LMIs, a pluggable feasibility backend,
// gain extraction, and independent certification. The backend is a contract:
// anything returning a Q whose independently recomputed residuals satisfy the
// solution checks qualifies.

namespace ddc {

// One coefficient of a linear map: block entry `row` (column-major within the
// block) picks up `value` times variable entry `var` (column-major in vec(Q)).
struct MapCoefficient {
    int row;
    int var;
    double value;
};

// Constraint  L(Q) - offset * I  >= 0  with L linear in Q. `margin_slack` is
// the relative slack the recomputed minimum eigenvalue may leave below the
// offset before the solution is rejected.
struct PsdBlock {
    int size = 0;
    std::vector<MapCoefficient> coefficients;
    double offset = 0.0;
    double margin_slack = 1e-6;

    Matrix evaluate(const Matrix& q) const;   // L(Q), without the offset
};

// A linear functional of vec(Q) forced to zero.
struct LinearFunctional {
    std::vector<std::pair<int, double>> terms;
    double evaluate(const Matrix& q) const;
};

struct LmiProblem {
    int var_rows = 0;
    int var_cols = 0;
    std::vector<LinearFunctional> equalities;
    std::vector<PsdBlock> blocks;
    double delta = 0.0;
    double scale = 1.0;   // magnitude of the data, for relative residual checks

    nlohmann::json to_json() const;
    static LmiProblem from_json(const nlohmann::json& j);
};

enum class SolveStatus { Feasible, Infeasible, BackendFailure };

struct LmiSolution {
    SolveStatus status = SolveStatus::BackendFailure;
    Matrix Q;
    double certificate = 0.0;            // solver's normalized strict-feasibility margin
    double equality_residual = 0.0;      // recomputed, max |functional(Q)|
    std::vector<double> block_min_eigs;  // recomputed min eigenvalue per block
    std::string message;
};

struct BackendResult {
    bool feasible = false;
    Matrix Q;
    double certificate = 0.0;
    std::string message;
};

class LmiBackend {
  public:
    virtual ~LmiBackend() = default;
    virtual BackendResult solve(const LmiProblem& problem) const = 0;
};

// Built-in backend: eliminates the equality constraints, then follows the
// central path of  max t  s.t.  L_k(v) >= t I, |v| < 1  (the constraints are
// homogeneous in Q, so strict feasibility at any scale rescales to the
// requested offsets).
class BarrierBackend : public LmiBackend {
  public:
    struct Options {
        double mu_initial = 1.0;
        double mu_factor = 0.2;
        double mu_final = 1e-12;
        double feasibility_threshold = 1e-9;
        int max_newton_steps = 80;
    };
    BarrierBackend() = default;
    explicit BarrierBackend(Options options) : options_(options) {}
    BackendResult solve(const LmiProblem& problem) const override;

  private:
    Options options_;
};

// Runs the backend, then recomputes every residual from the problem data and
// downgrades an inconsistent "feasible" answer to a backend failure.
LmiSolution solve(const LmiProblem& problem, const LmiBackend& backend);
LmiSolution solve(const LmiProblem& problem);   // default BarrierBackend

// Encodings. Homogeneous-equivalent to the strict LMIs: ZQ >= I and
// sym(WQ) <= -delta I, with symmetry of ZQ as exact linear equalities.
LmiProblem encode_state_lmi(const StateBatch& batch, double delta);
LmiProblem encode_output_lmi(const OutputBatch& batch, double delta);
LmiProblem encode_baseline_lmi(const BaselineBatch& batch, double delta);

enum class Certification { Certified, Failed, Unknown };

struct GainResult {
    Matrix K;            // declared shape: m x (n+m) state, 1 x 2n output, m x n baseline
    Matrix K_full;       // output case: unprojected U Q (Za Q)^{-1}; otherwise equals K
    Matrix closed_loop;  // F + G K (or equivalent), when ground truth is available
    double abscissa = 0.0;
    Certification certification = Certification::Unknown;
};

GainResult gain_state(const StateBatch& batch, const Matrix& q,
                      const StatePlant* ground_truth = nullptr,
                      const StateFilterParams* params = nullptr);
GainResult gain_output(const OutputBatch& batch, const Matrix& q,
                       const OutputRealization* oracle = nullptr);
GainResult gain_baseline(const BaselineBatch& batch, const Matrix& q,
                         const StatePlant* ground_truth = nullptr);

// Independent identification oracle: [F G] from least squares on the sampled
// compensated identity Zdot - D E = F Z + G U. Requires an exciting batch.
std::pair<Matrix, Matrix> identify_fg(const StateBatch& batch);

}  // namespace ddc
