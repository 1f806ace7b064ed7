#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "ddc/benchmarks.hpp"
#include "ddc/lti_sim.hpp"

using namespace ddc;

namespace {

SignalSpec single_sin(double amplitude, double omega, double phase) {
    SignalSpec spec;
    spec.channels.resize(1);
    spec.channels[0].terms.push_back({amplitude, omega, phase});
    return spec;
}

LtiBlock scalar_block(double a, double b_in, double x0) {
    LtiBlock block;
    block.A = a * Matrix::Identity(1, 1);
    block.B = b_in * Matrix::Identity(1, 1);
    block.from_input = Matrix::Identity(1, 1);
    block.x0 = x0 * Vector::Ones(1);
    return block;
}

}  // namespace

TEST_CASE("exosystem for sin(t)") {
    const Exosystem exo = build_exosystem(single_sin(1.0, 1.0, 0.0));
    REQUIRE(exo.dim() == 2);
    Matrix s_expected(2, 2);
    s_expected << 0.0, 1.0, -1.0, 0.0;
    CHECK((exo.S - s_expected).norm() < 1e-15);
    CHECK(exo.w0(0) == doctest::Approx(0.0));
    CHECK(exo.w0(1) == doctest::Approx(1.0));
    CHECK((exo.output_map * exo.w0)(0) == doctest::Approx(0.0));
}

TEST_CASE("exosystem for a constant offset") {
    SignalSpec spec;
    spec.channels.resize(1);
    spec.channels[0].offset = 1.0;
    spec.channels[0].terms.push_back({0.5, 2.0, 0.0});
    const Exosystem exo = build_exosystem(spec);
    for (double t : {0.0, 0.3, 1.7}) {
        const Vector u = exo.output_map * expm(exo.S * t) * exo.w0;
        CHECK(u(0) == doctest::Approx(spec.value_at(t)(0)).epsilon(1e-13));
    }
}

TEST_CASE("exosystem reproduces the two-channel benchmark input") {
    const SignalSpec spec = benchmarks::reactor_input();
    const Exosystem exo = build_exosystem(spec);
    CHECK(exo.dim() == 16);
    for (int k = 0; k <= 30; ++k) {
        const double t = 0.05 * k;
        const Vector u = exo.output_map * expm(exo.S * t) * exo.w0;
        const Vector expected = spec.value_at(t);
        CHECK((u - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
    }
}

TEST_CASE("cascade: autonomous scalar decay is exact") {
    SignalSpec zero;
    zero.channels.resize(1);   // channel present, no terms: u = 0
    auto traj = simulate_cascade({scalar_block(-1.0, 0.0, 1.0)}, build_exosystem(zero), 1.0, 0.01);
    for (int k = 0; k < traj.grid_points(); ++k) {
        CHECK(traj.state(0, k) == doctest::Approx(std::exp(-traj.times(k))).epsilon(1e-12));
    }
}

TEST_CASE("cascade: integrator of cos(t) gives sin(t)") {
    // cos(t) = sin(t + pi/2)
    const SignalSpec spec = single_sin(1.0, 1.0, M_PI / 2.0);
    auto traj = simulate_cascade({scalar_block(0.0, 1.0, 0.0)}, build_exosystem(spec), 2.0, 0.01);
    for (int k = 0; k < traj.grid_points(); ++k) {
        CHECK(traj.state(0, k) == doctest::Approx(std::sin(traj.times(k))).epsilon(1e-12));
    }
}

TEST_CASE("cascade rejects forward block references") {
    LtiBlock first = scalar_block(-1.0, 1.0, 0.0);
    first.from_blocks.emplace_back(1, Matrix::Identity(1, 1));   // not upstream
    LtiBlock second = scalar_block(-1.0, 1.0, 0.0);
    CHECK_THROWS(simulate_cascade({first, second}, build_exosystem(single_sin(1, 1, 0)), 1.0, 0.1));
}

TEST_CASE("sampling basics") {
    SignalSpec zero;
    zero.channels.resize(1);
    auto constant = simulate_cascade({scalar_block(0.0, 0.0, 3.0)}, build_exosystem(zero), 1.0, 0.1);
    const Matrix s = sample(constant, 0.2, 4, Signal::State);
    REQUIRE(s.cols() == 4);
    for (int k = 0; k < 4; ++k) CHECK(s(0, k) == doctest::Approx(3.0));

    auto decay = simulate_cascade({scalar_block(-1.0, 0.0, 1.0)}, build_exosystem(zero), 1.0, 0.01);
    const Matrix d = sample(decay, 0.1, 3, Signal::State);
    CHECK(d(0, 0) == doctest::Approx(1.0));
    CHECK(d(0, 1) == doctest::Approx(std::exp(-0.1)).epsilon(1e-12));
    CHECK(d(0, 2) == doctest::Approx(std::exp(-0.2)).epsilon(1e-12));

    CHECK_THROWS(sample(decay, 0.015, 3, Signal::State));   // off-grid Ts
    CHECK_THROWS(sample(decay, 0.1, 12, Signal::State));    // past the horizon
}

TEST_CASE("benchmark sampling yields 15 columns") {
    const StatePlant plant = benchmarks::batch_reactor();
    LtiBlock block;
    block.A = plant.A;
    block.B = plant.B;
    block.from_input = Matrix::Identity(2, 2);
    block.x0 = benchmarks::reactor_reference_x0();
    auto traj = simulate_cascade({block}, build_exosystem(benchmarks::reactor_input()), 1.5, 0.001);
    CHECK(sample(traj, 0.1, 15, Signal::State).cols() == 15);
    CHECK(sample(traj, 0.1, 15, Signal::Input).rows() == 2);
}

TEST_CASE("stepping is exact: halving h leaves samples unchanged") {
    const StatePlant plant = benchmarks::batch_reactor();
    LtiBlock block;
    block.A = plant.A;
    block.B = plant.B;
    block.from_input = Matrix::Identity(2, 2);
    block.x0 = benchmarks::reactor_reference_x0();
    const Exosystem exo = build_exosystem(benchmarks::reactor_input());
    auto coarse = simulate_cascade({block}, exo, 1.5, 0.01);
    auto fine = simulate_cascade({block}, exo, 1.5, 0.005);
    const Matrix a = sample(coarse, 0.1, 15, Signal::State);
    const Matrix b = sample(fine, 0.1, 15, Signal::State);
    CHECK((a - b).norm() <= 1e-11 * (1.0 + a.norm()));
}

TEST_CASE("superposition: doubling input and x0 doubles the trajectory") {
    const StatePlant plant = benchmarks::batch_reactor();
    LtiBlock block;
    block.A = plant.A;
    block.B = plant.B;
    block.from_input = Matrix::Identity(2, 2);
    block.x0 = benchmarks::reactor_reference_x0();

    SignalSpec doubled = benchmarks::reactor_input();
    for (auto& ch : doubled.channels) {
        for (auto& term : ch.terms) term.amplitude *= 2.0;
    }
    LtiBlock block2 = block;
    block2.x0 *= 2.0;

    auto base = simulate_cascade({block}, build_exosystem(benchmarks::reactor_input()), 1.0, 0.01);
    auto twice = simulate_cascade({block2}, build_exosystem(doubled), 1.0, 0.01);
    CHECK((twice.state - 2.0 * base.state).norm() <= 1e-11 * (1.0 + base.state.norm()));
}

TEST_CASE("stored derivatives satisfy the plant equation pointwise") {
    const StatePlant plant = benchmarks::batch_reactor();
    LtiBlock block;
    block.A = plant.A;
    block.B = plant.B;
    block.from_input = Matrix::Identity(2, 2);
    block.x0 = benchmarks::reactor_reference_x0();
    auto traj = simulate_cascade({block}, build_exosystem(benchmarks::reactor_input()), 1.0, 0.01);
    const Matrix residual = traj.deriv - (plant.A * traj.state + plant.B * traj.input);
    CHECK(residual.norm() <= 1e-12 * (1.0 + traj.deriv.norm()));
}

TEST_CASE("transfer-function realization in controllability canonical form") {
    const OutputPlant plant = benchmarks::nonmin_phase_plant();
    REQUIRE(plant.n() == 3);
    Matrix a_expected(3, 3);
    a_expected << 0, 1, 0, 0, 0, 1, 0, -4, 0;
    CHECK((plant.A - a_expected).norm() < 1e-15);
    CHECK(plant.b(2) == doctest::Approx(1.0));
    CHECK(plant.c(0) == doctest::Approx(-1.0));
    CHECK(plant.c(1) == doctest::Approx(1.0));
    CHECK(plant.controllable());
    CHECK(plant.observable());

    Vector bad_den(3);
    bad_den << 1.0, 0.0, 2.0;   // not monic of matching degree for this num
    Vector long_num(4);
    long_num << 1, 1, 1, 1;
    CHECK_THROWS(plant_from_transfer_function(long_num, bad_den));
}

TEST_CASE("CSV export writes header and all grid rows") {
    SignalSpec zero;
    zero.channels.resize(1);
    auto traj = simulate_cascade({scalar_block(-1.0, 0.0, 1.0)}, build_exosystem(zero), 0.2, 0.1);
    std::ostringstream os;
    export_trajectory_csv(traj, os, {"x"}, {"u"});
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "t,x,u,dx");
    int rows = 0;
    while (std::getline(is, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == traj.grid_points());
}
