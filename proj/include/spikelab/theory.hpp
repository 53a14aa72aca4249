#pragma once

#include "spikelab/model.hpp"

namespace spikelab {

// Per-test-point risk split. excess = bias + variance + data_noise + target_alignment;
// total = excess + tau_eps2_test.
struct RiskDecomposition {
  double bias = 0.0;
  double variance = 0.0;
  double data_noise = 0.0;
  double target_alignment = 0.0;
  double total = 0.0;
  double excess = 0.0;
};

// Four-term risk. finite_d keeps the O(1/d) corrections (needs d); otherwise the
// proportional limit is returned, with theta2 -> infinity under Frobenius scaling.
RiskDecomposition risk_general(const ProblemSpec& spec, Branch branch, bool finite_d = false);
RiskDecomposition risk_general(const ProblemSpec& spec, bool finite_d = false);

// Closed forms for the three specialised settings. Each returns the excess risk,
// i.e. the total minus tau_eps2_test.
double risk_well_specified(const ProblemSpec& spec, Branch branch);
double risk_misspecified(const ProblemSpec& spec, Branch branch);
double risk_spike_recovery(const ProblemSpec& spec, Branch branch);

struct MisspecIntermediates {
  double delta_c = 0.0;  // alpha_z - alpha_a / c
  double delta_1 = 0.0;  // alpha_z - alpha_a
};
MisspecIntermediates misspec_intermediates(double alpha_z, double alpha_a, double c);

// Risk(aligned, align2 = beta_norm2) - Risk(orthogonal, align2 = 0); negative means alignment helps.
double alignment_coefficient(const ProblemSpec& spec, Branch branch, bool finite_d = false);
double alignment_coefficient(const ProblemSpec& spec, bool finite_d = false);

// Unique c > 1 where c(c - 2) = (1 + sqrt(c))^2.
double c_star();
// Spike strength (operator-norm gamma) above which the top singular value separates.
double bbp_threshold(double c);

// alpha_a^2 |beta|^2 + (alpha_z^2 (1 + 1/phi) - 2 alpha_z alpha_a) (u^T beta)^2.
// Throws UnsupportedSetting when the value is not positive.
double check_phi_positivity(double alpha_z, double alpha_a, double align2, double beta_norm2,
                            double phi);

}  // namespace spikelab
