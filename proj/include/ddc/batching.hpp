#pragma once

#include <filesystem>

#include "ddc/lti_sim.hpp"
#include "ddc/realization.hpp"

// Sampled data batches for the three designs (baseline, state-filter,
// output-filter) plus the excitation diagnostics deciding whether the
// downstream LMIs can be feasible.

namespace ddc {

struct StateBatch {
    Matrix U;      // m x N
    Matrix Z;      // (n+m) x N, filter state samples
    Matrix Zdot;   // (n+m) x N, exact filter derivatives
    Matrix E;      // n x N, transient columns e^{-lambda k Ts} x0
    double Ts = 0.0;
    double lambda = 0.0;
    double gamma = 0.0;
    Vector x0;
    int n() const { return static_cast<int>(E.rows()); }
    int m() const { return static_cast<int>(U.rows()); }
    int N() const { return static_cast<int>(U.cols()); }
};

struct OutputBatch {
    Matrix U;       // 1 x N
    Matrix Za;      // 3n x N, chi stacked above zeta_hat
    Matrix Zadot;   // 3n x N
    double Ts = 0.0;
    Vector lambdas;
    Vector gammas;
    int n() const { return static_cast<int>(lambdas.size()); }
    int N() const { return static_cast<int>(U.cols()); }
};

struct BaselineBatch {
    Matrix U;      // m x N
    Matrix X;      // n x N
    Matrix Xdot;   // n x N, exact derivatives from the simulator
    double Ts = 0.0;
};

struct ExcitationReport {
    int required_rank = 0;
    int achieved_rank = 0;
    double smallest_singular_value = 0.0;   // last singular value counted toward the rank
    double gramian_mu = 0.0;                // filled by gramian_mu() when a dense run exists
    int recommended_N = 0;
    bool exciting() const { return achieved_rank >= required_rank; }
};

// filter_traj must come from run_state_filter (block 0 plant, block 1 filter).
StateBatch build_state_batch(const Trajectory& filter_traj, const StateFilterParams& params,
                             const Vector& x0, double Ts, int count);

// filter_traj from run_output_filter, chi_traj from run_chi on the same grid.
OutputBatch build_output_batch(const Trajectory& filter_traj, const Trajectory& chi_traj,
                               const OutputFilterParams& params, double Ts, int count);

// plant_traj: any trajectory whose block 0 is the plant state.
BaselineBatch build_baseline_batch(const Trajectory& plant_traj, double Ts, int count);

// rank[Z; U] against n + 2m.
ExcitationReport check_excitation_state(const StateBatch& batch);

// rank[Za; U] against 3n + 1; recommended_N = n + 2p from the sinusoid
// count p of the exploration input (the chi block supplies the extra n rows).
ExcitationReport check_excitation_output(const OutputBatch& batch, int sinusoid_count);

// Smallest eigenvalue of the Gramian  int_0^T [zeta_hat; u][zeta_hat; u]^T dt,
// trapezoidal quadrature on the fine grid of a filter trajectory.
double gramian_mu(const Trajectory& filter_traj);

// Directory layout: one CSV per matrix plus meta.json carrying dimensions,
// Ts and filter parameters. This is the data-driven entry point: designs can
// run from these files without the simulator.
void save_state_batch(const StateBatch& batch, const std::filesystem::path& dir);
StateBatch load_state_batch(const std::filesystem::path& dir);
void save_output_batch(const OutputBatch& batch, const std::filesystem::path& dir);
OutputBatch load_output_batch(const std::filesystem::path& dir);

// "state" or "output" from meta.json.
std::string batch_kind(const std::filesystem::path& dir);

Matrix load_matrix_csv(const std::filesystem::path& file);
void save_matrix_csv(const Matrix& m, const std::filesystem::path& file);

}  // namespace ddc
