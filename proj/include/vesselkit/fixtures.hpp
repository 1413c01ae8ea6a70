#pragma once

#include <random>
#include <string>
#include <vector>

#include "vesselkit/interp.hpp"

namespace vesselkit::fixtures {

// A1 = -1, B = 1, X = 1/2, sigma1 = 1: S = (lambda - 1)/(lambda + 1).
Realization fix_a();
// p = 1, sigma1 = sigma2 = 1, gamma = 0 on [0, 1].
VesselParams fix_b_params();
VesselTrajectory fix_b(std::size_t steps = 1000);
// Sturm-Liouville parameters, A1 = -1, B = [1, 1]/sqrt2, X = 1/2.
Realization fix_c_realization();
VesselTrajectory fix_c(std::size_t steps = 1000);
// One state, beta = -1 - tanh, q = -2 sech^2.
VesselTrajectory soliton(std::size_t steps = 1000);
// Nodes (1, 1, 0) and (2, 1, 0.2) with FIX-B parameters, t2_ref = 0.
NPProblem fix_d();

// Stable A1 with a random B; X from the Lyapunov equation, redrawn until well conditioned.
Realization random_realization(std::mt19937_64& rng, Eigen::Index n, const CMatrix& sigma1);

struct Description {
    std::string name;
    std::string summary;
};

std::vector<Description> catalog();

} // namespace vesselkit::fixtures
