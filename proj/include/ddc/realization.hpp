#pragma once

#include <utility>

#include "ddc/lti_sim.hpp"
#include "ddc/numkit.hpp"

// Non-minimal realizations of the plant built from low-pass filters of its
// signals, the exact transient-compensation terms, and the ground-truth
// oracles (theta, Pi, H, L) used only for verification -- never on the
// design path.

namespace ddc {

struct StateFilterParams {
    double lambda = 1.0;   // > 0
    double gamma = 1.0;    // != 0
    void validate() const;
};

// Diagonal filter Lambda = diag(-lambda_i) with 0 < lambda_1 < ... < lambda_n
// and ell = (gamma_1, ..., gamma_n), all nonzero; this parameterization
// certifies (Lambda, ell) controllable by the PBH test.
struct OutputFilterParams {
    Vector lambdas;
    Vector gammas;
    int order() const { return static_cast<int>(lambdas.size()); }
    Matrix Lambda() const;
    Vector ell() const { return gammas; }
    void validate() const;
};

// F = [[A, B], [0, -lambda I]], G = [[0], [gamma I]], D = [[gamma I], [0]].
struct StateRealization {
    Matrix F, G, D;
};
StateRealization state_realization(const StatePlant& plant, const StateFilterParams& params);

// F = [[Lambda + ell th1^T, ell th2^T], [0, Lambda]], g = [0; ell].
struct OutputRealization {
    Matrix F;
    Vector g;
};
OutputRealization output_realization(const OutputFilterParams& params,
                                     const Vector& theta1, const Vector& theta2);

// D = [ell c^T; 0], mapping the mismatch error into the filter dynamics.
Matrix output_disturbance_map(const OutputFilterParams& params, const Vector& c);

// Joint exact simulation of plant and state filter (zeta_hat(0) = 0).
// Blocks of the returned trajectory: 0 = plant (n), 1 = filter (n + m).
Trajectory run_state_filter(const StatePlant& plant, const Exosystem& exo, const Vector& x0,
                            const StateFilterParams& params, double horizon, double step);

// E column k is e^{-lambda k Ts} x0.
Matrix error_batch(const Vector& x0, double lambda, double Ts, int count);

// Joint exact simulation of plant and output filter (zeta_hat(0) = 0).
// Blocks: 0 = plant (n_plant), 1 = filter (2 n_filter).
Trajectory run_output_filter(const OutputPlant& plant, const Exosystem& exo, const Vector& x0,
                             const OutputFilterParams& params, double horizon, double step);

// chi_i(t) = e^{-lambda_i t}, chi_dot = Lambda chi, computed analytically.
Trajectory run_chi(const OutputFilterParams& params, double horizon, double step);

// Characteristic polynomial of A, coefficients ascending, monic
// (Faddeev-LeVerrier).
Vector characteristic_polynomial(const Matrix& a);

// Coefficients (ascending) of c^T adj(sI - A) b, the transfer-function
// numerator over det(sI - A).
Vector transfer_numerator(const Matrix& a, const Vector& b, const Vector& c);

// theta1, theta2 by transfer-function coefficient matching:
//   det(sI-Lambda) - th1^T adj(sI-Lambda) ell = det(sI-A)
//   th2^T adj(sI-Lambda) ell = c^T adj(sI-A) b
std::pair<Vector, Vector> oracle_theta(const OutputPlant& plant, const OutputFilterParams& params);

struct PiHL {
    Matrix Pi;   // n x 2n, full row rank
    Matrix H;    // eigenvectors of A - Pi1 ell c^T ordered to match diag(Lambda)
    Matrix L;    // H diag(H^{-1} x0); mismatch error is eps(t) = L chi(t)
};
PiHL oracle_pi_h_l(const OutputPlant& plant, const OutputFilterParams& params,
                   const Vector& theta1, const Vector& theta2, const Vector& x0);

}  // namespace ddc
