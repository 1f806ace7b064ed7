#pragma once

#include "ddc/lti_sim.hpp"
#include "ddc/realization.hpp"

// Canned benchmark systems and reference values: the unstable batch reactor
// (state feedback) and a non-minimum-phase SISO plant (output feedback),
// with the published gains used as certification fixtures.

namespace ddc::benchmarks {

StatePlant batch_reactor();
Vector reactor_reference_x0();
SignalSpec reactor_input();              // 4 unit sinusoids per channel, 8 distinct frequencies
StateFilterParams reactor_filter();      // lambda = gamma = 1
Matrix reactor_published_gain();         // 2 x 6
ComplexVector reactor_published_closed_loop_eigs();
ComplexVector reactor_open_loop_eigs();  // {-8.67, -5.06, 0.0635, 1.99}

OutputPlant nonmin_phase_plant();        // (s - 1) / (s (s^2 + 4)), controllability canonical
Vector siso_reference_x0();
SignalSpec siso_input();                 // 4 unit sinusoids, distinct frequencies
OutputFilterParams siso_filter();        // Lambda = diag(-1,-2,-3), ell = (1,2,3)
Matrix siso_published_gain();            // 1 x 6
ComplexVector siso_published_closed_loop_eigs();
Vector siso_reference_theta1();          // (2.5, -8, 6.5)
Vector siso_reference_theta2();          // (-1, 1.5, -2/3)

}  // namespace ddc::benchmarks
