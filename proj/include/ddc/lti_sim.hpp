#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "ddc/numkit.hpp"

// Exact simulation of continuous-time LTI cascades driven by
// sum-of-sinusoids inputs. Every trajectory is propagated with a single
// constant matrix exponential per step, so samples and stored derivatives
// carry no integration error.

namespace ddc {

struct StatePlant {
    Matrix A;   // n x n
    Matrix B;   // n x m
    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
    void validate() const;
    // rank of [B AB ... A^{n-1}B]
    bool controllable() const;
};

struct OutputPlant {
    Matrix A;   // n x n
    Vector b;   // n
    Vector c;   // n
    int n() const { return static_cast<int>(A.rows()); }
    void validate() const;
    bool controllable() const;
    bool observable() const;
};

// SISO realization in controllability canonical form of
// num(s) / den(s), coefficients ascending, den monic of degree n.
OutputPlant plant_from_transfer_function(const Vector& numerator, const Vector& denominator);

struct SinusoidTerm {
    double amplitude;
    double omega;   // rad/s, >= 0
    double phase;   // rad
};

struct ChannelSpec {
    std::vector<SinusoidTerm> terms;
    double offset = 0.0;
};

// u_i(t) = offset_i + sum_j a_j sin(w_j t + phi_j) per channel.
struct SignalSpec {
    std::vector<ChannelSpec> channels;
    int channel_count() const { return static_cast<int>(channels.size()); }
    Vector value_at(double t) const;
    void validate() const;
};

// Autonomous realization of a SignalSpec: u(t) = output_map * e^{S t} * w0.
struct Exosystem {
    Matrix S;
    Vector w0;
    Matrix output_map;
    int dim() const { return static_cast<int>(S.rows()); }
};

Exosystem build_exosystem(const SignalSpec& spec);

// One block of a cascade. Its input is
//   v = from_input * u(t) + sum_j from_blocks[j].second * state(from_blocks[j].first)
// where referenced blocks must come earlier in the list (no algebraic loops).
struct LtiBlock {
    Matrix A;
    Matrix B;            // dim x q; q = input dimension of the block (0 allowed)
    Matrix from_input;   // q x m
    std::vector<std::pair<int, Matrix>> from_blocks;
    Vector x0;
};

struct Trajectory {
    double step = 0.0;                          // h
    Vector times;                               // t_k = k h
    Matrix state;                               // stacked block states, one column per grid point
    Matrix input;                               // exosystem output u(t_k)
    Matrix deriv;                               // exact state derivatives
    std::vector<std::pair<int, int>> spans;     // (row offset, dim) per block

    int grid_points() const { return static_cast<int>(times.size()); }
    double duration() const { return times.size() > 0 ? times(times.size() - 1) : 0.0; }
    Matrix block_state(int block) const;
    Matrix block_deriv(int block) const;
};

Trajectory simulate_cascade(const std::vector<LtiBlock>& blocks, const Exosystem& exo,
                            double horizon, double step);

enum class Signal { State, Input, Derivative };

// Columns at t = 0, Ts, ..., (N-1) Ts. Ts must lie on the simulation grid;
// no interpolation is performed.
Matrix sample(const Trajectory& traj, double Ts, int count, Signal which,
              int row_offset = 0, int rows = -1);

// Header `t,<state names>,<input names>,<derivative names>`, one row per
// grid point, 17 significant digits.
void export_trajectory_csv(const Trajectory& traj, std::ostream& out,
                           const std::vector<std::string>& state_names,
                           const std::vector<std::string>& input_names);

}  // namespace ddc
