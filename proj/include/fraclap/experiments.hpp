#pragma once

#include "fraclap/grid.hpp"
#include "fraclap/verify.hpp"

namespace fraclap {

// Gaussian of the given mass and standard deviation centered at x0 (1-D),
// or radially in 2-D.
Field gaussian_data(const GridSpec& g, double mass, double width, double x0 = 0.0);
// Delta-like datum: Gaussian with width 4h.
Field delta_data(const GridSpec& g, double mass);

namespace experiments {

void operator_cross_validation(CriterionReport& r);
void linear_kernel(CriterionReport& r);
void semigroup_properties(CriterionReport& r);
void smoothing_exponent(CriterionReport& r);
void barenblatt_attraction(CriterionReport& r);
void tail_laws(CriterionReport& r);
void extinction(CriterionReport& r);
void weighted_growth(CriterionReport& r);
void symmetrization(CriterionReport& r);
void kpp_rates(CriterionReport& r);
void dirichlet_behavior(CriterionReport& r);
void exponent_invariants(CriterionReport& r);

}  // namespace experiments
}  // namespace fraclap
