#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>

#include "ddc/batching.hpp"
#include "ddc/benchmarks.hpp"

using namespace ddc;

namespace {

SignalSpec zero_input(int channels) {
    SignalSpec spec;
    spec.channels.resize(channels);
    return spec;
}

Trajectory reactor_run(const SignalSpec& input, const Vector& x0, double T = 1.5,
                       double h = 0.001) {
    return run_state_filter(benchmarks::batch_reactor(), build_exosystem(input), x0,
                            benchmarks::reactor_filter(), T, h);
}

Trajectory siso_run(const Vector& x0, double T = 2.0, double h = 0.001) {
    return run_output_filter(benchmarks::nonmin_phase_plant(),
                             build_exosystem(benchmarks::siso_input()), x0,
                             benchmarks::siso_filter(), T, h);
}

}  // namespace

TEST_CASE("state batch: first column reflects the initialization") {
    const Vector x0 = benchmarks::reactor_reference_x0();
    auto traj = reactor_run(benchmarks::reactor_input(), x0);
    const StateBatch batch = build_state_batch(traj, benchmarks::reactor_filter(), x0, 0.1, 1);
    CHECK(batch.Z.col(0).norm() == 0.0);   // zeta_hat(0) = 0
    CHECK((batch.E.col(0) - x0).norm() == 0.0);
}

TEST_CASE("state batch: zero experiment is zero and not exciting") {
    auto traj = reactor_run(zero_input(2), Vector::Zero(4));
    const StateBatch batch =
        build_state_batch(traj, benchmarks::reactor_filter(), Vector::Zero(4), 0.1, 15);
    CHECK(batch.U.norm() == 0.0);
    CHECK(batch.Z.norm() == 0.0);
    CHECK(batch.E.norm() == 0.0);
    const ExcitationReport report = check_excitation_state(batch);
    CHECK(report.achieved_rank == 0);
    CHECK(report.required_rank == 8);
    CHECK_FALSE(report.exciting());
}

TEST_CASE("designed state experiment reaches the full excitation rank") {
    const Vector x0 = benchmarks::reactor_reference_x0();
    auto traj = reactor_run(benchmarks::reactor_input(), x0);
    const StateBatch batch = build_state_batch(traj, benchmarks::reactor_filter(), x0, 0.1, 15);
    CHECK(batch.N() == 15);
    const ExcitationReport report = check_excitation_state(batch);
    CHECK(report.achieved_rank == 8);
    CHECK(report.exciting());
    CHECK(report.smallest_singular_value > 0.0);

    // independent SVD at a 10x finer tolerance agrees
    Matrix stack(8, 15);
    stack << batch.Z, batch.U;
    CHECK(numerical_rank(stack, 15 * stack.jacobiSvd().singularValues()(0) * 1e-13).rank == 8);
}

TEST_CASE("single-frequency input underexcites the reactor") {
    SignalSpec narrow;
    narrow.channels.resize(2);
    narrow.channels[0].terms.push_back({1.0, 1.0, 0.0});
    narrow.channels[1].terms.push_back({1.0, 1.0, 0.0});
    auto traj = reactor_run(narrow, benchmarks::reactor_reference_x0());
    const StateBatch batch = build_state_batch(traj, benchmarks::reactor_filter(),
                                               benchmarks::reactor_reference_x0(), 0.1, 15);
    CHECK(check_excitation_state(batch).achieved_rank < 8);
}

TEST_CASE("compensated batch identity holds with ground truth") {
    const Vector x0 = benchmarks::reactor_reference_x0();
    auto traj = reactor_run(benchmarks::reactor_input(), x0);
    const StateBatch batch = build_state_batch(traj, benchmarks::reactor_filter(), x0, 0.1, 15);
    const StateRealization real =
        state_realization(benchmarks::batch_reactor(), benchmarks::reactor_filter());
    const Matrix residual =
        (batch.Zdot - real.D * batch.E) - (real.F * batch.Z + real.G * batch.U);
    CHECK(residual.norm() <= 1e-9 * (1.0 + batch.Zdot.norm()));
}

TEST_CASE("output batch: first column stacks chi(0) = 1 above zeta_hat(0) = 0") {
    const Vector x0 = benchmarks::siso_reference_x0();
    auto traj = siso_run(x0);
    auto chi = run_chi(benchmarks::siso_filter(), 2.0, 0.001);
    const OutputBatch batch = build_output_batch(traj, chi, benchmarks::siso_filter(), 0.1, 1);
    CHECK((batch.Za.col(0).head(3) - Vector::Ones(3)).norm() == 0.0);
    CHECK(batch.Za.col(0).tail(6).norm() == 0.0);
}

TEST_CASE("designed output experiment reaches rank 3n+1") {
    const Vector x0 = benchmarks::siso_reference_x0();
    auto traj = siso_run(x0);
    auto chi = run_chi(benchmarks::siso_filter(), 2.0, 0.001);
    const OutputBatch batch = build_output_batch(traj, chi, benchmarks::siso_filter(), 0.1, 20);
    CHECK(batch.N() == 20);
    const ExcitationReport report = check_excitation_output(batch, 4);
    CHECK(report.required_rank == 10);
    CHECK(report.achieved_rank == 10);
    CHECK(report.recommended_N == 11);   // n + 2p for p = 4 sinusoids

    // chi block alone is Vandermonde-generated, rank n
    CHECK(numerical_rank(batch.Za.topRows(3)).rank == 3);
}

TEST_CASE("virtual-system batch identity holds with the oracle") {
    const OutputPlant plant = benchmarks::nonmin_phase_plant();
    const OutputFilterParams params = benchmarks::siso_filter();
    const Vector x0 = benchmarks::siso_reference_x0();
    auto traj = siso_run(x0);
    auto chi = run_chi(params, 2.0, 0.001);
    const OutputBatch batch = build_output_batch(traj, chi, params, 0.1, 20);

    auto [theta1, theta2] = oracle_theta(plant, params);
    const OutputRealization real = output_realization(params, theta1, theta2);
    const PiHL oracle = oracle_pi_h_l(plant, params, theta1, theta2, x0);

    Matrix virt = Matrix::Zero(9, 9);
    virt.topLeftCorner(3, 3) = params.Lambda();
    virt.block(3, 0, 6, 3) = output_disturbance_map(params, plant.c) * oracle.L;
    virt.bottomRightCorner(6, 6) = real.F;
    Vector g_ext = Vector::Zero(9);
    g_ext.tail(6) = real.g;
    const Matrix residual = batch.Zadot - (virt * batch.Za + g_ext * batch.U);
    CHECK(residual.norm() <= 1e-8 * (1.0 + batch.Zadot.norm()));
}

TEST_CASE("gramian mu diagnostics") {
    auto silent = reactor_run(zero_input(2), Vector::Zero(4));
    CHECK(gramian_mu(silent) == doctest::Approx(0.0));

    const Vector x0 = benchmarks::reactor_reference_x0();
    auto designed = reactor_run(benchmarks::reactor_input(), x0, 1.5, 0.005);
    const double mu_short = gramian_mu(designed);
    CHECK(mu_short > 0.0);

    auto longer = reactor_run(benchmarks::reactor_input(), x0, 3.0, 0.005);
    CHECK(gramian_mu(longer) >= mu_short - 1e-12);   // integral can only grow
}

TEST_CASE("excitation rank is invariant to input amplitude scaling") {
    SignalSpec loud = benchmarks::reactor_input();
    for (auto& ch : loud.channels) {
        for (auto& term : ch.terms) term.amplitude *= 50.0;
    }
    const Vector x0 = benchmarks::reactor_reference_x0();
    auto a = reactor_run(benchmarks::reactor_input(), x0);
    auto b = reactor_run(loud, x0);
    const StateBatch ba = build_state_batch(a, benchmarks::reactor_filter(), x0, 0.1, 15);
    const StateBatch bb = build_state_batch(b, benchmarks::reactor_filter(), x0, 0.1, 15);
    CHECK(check_excitation_state(ba).achieved_rank == check_excitation_state(bb).achieved_rank);
}

TEST_CASE("baseline batch has exact derivatives") {
    const StatePlant plant = benchmarks::batch_reactor();
    const Vector x0 = benchmarks::reactor_reference_x0();
    auto traj = reactor_run(benchmarks::reactor_input(), x0);
    const BaselineBatch batch = build_baseline_batch(traj, 0.1, 15);
    const Matrix residual = batch.Xdot - (plant.A * batch.X + plant.B * batch.U);
    CHECK(residual.norm() <= 1e-11 * (1.0 + batch.Xdot.norm()));
}

TEST_CASE("state batch round-trips through CSV + sidecar") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ddc_test_state_batch";
    const Vector x0 = benchmarks::reactor_reference_x0();
    auto traj = reactor_run(benchmarks::reactor_input(), x0);
    const StateBatch batch = build_state_batch(traj, benchmarks::reactor_filter(), x0, 0.1, 15);
    save_state_batch(batch, dir);
    CHECK(batch_kind(dir) == "state");
    const StateBatch loaded = load_state_batch(dir);
    CHECK((loaded.U - batch.U).norm() == 0.0);
    CHECK((loaded.Z - batch.Z).norm() == 0.0);
    CHECK((loaded.Zdot - batch.Zdot).norm() == 0.0);
    CHECK((loaded.E - batch.E).norm() == 0.0);
    CHECK(loaded.Ts == batch.Ts);
    CHECK(loaded.lambda == batch.lambda);
    CHECK((loaded.x0 - batch.x0).norm() == 0.0);
    CHECK_THROWS(load_output_batch(dir));   // wrong kind
    fs::remove_all(dir);
}

TEST_CASE("output batch round-trips through CSV + sidecar") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ddc_test_output_batch";
    const Vector x0 = benchmarks::siso_reference_x0();
    auto traj = siso_run(x0);
    auto chi = run_chi(benchmarks::siso_filter(), 2.0, 0.001);
    const OutputBatch batch = build_output_batch(traj, chi, benchmarks::siso_filter(), 0.1, 20);
    save_output_batch(batch, dir);
    CHECK(batch_kind(dir) == "output");
    const OutputBatch loaded = load_output_batch(dir);
    CHECK((loaded.Za - batch.Za).norm() == 0.0);
    CHECK((loaded.Zadot - batch.Zadot).norm() == 0.0);
    CHECK((loaded.U - batch.U).norm() == 0.0);
    CHECK((loaded.lambdas - batch.lambdas).norm() == 0.0);
    fs::remove_all(dir);
}

TEST_CASE("misaligned sampling is rejected") {
    const Vector x0 = benchmarks::reactor_reference_x0();
    auto traj = reactor_run(benchmarks::reactor_input(), x0, 1.5, 0.003);
    CHECK_THROWS(build_state_batch(traj, benchmarks::reactor_filter(), x0, 0.1, 15));
}
