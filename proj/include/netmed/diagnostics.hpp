#pragma once

// Convergence diagnostics and interval estimates for MCMC output. All
// functions are deterministic in their inputs.

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace netmed {

struct Chain {
  std::string parameter;
  std::vector<double> draws;
  int chain_id = 0;

  // Throws InputError when empty or non-finite.
  void validate() const;
};

// Geweke z-score comparing the first `first_frac` and last `last_frac` of the
// draws. Segment mean variances use batch means with floor(sqrt(len)) batches.
double geweke_z(const Chain& chain, double first_frac = 0.1, double last_frac = 0.5);

// Narrowest window of ceil(prob * n) sorted samples; ties go to the lowest start.
std::pair<double, double> hpd_interval(std::span<const double> samples, double prob);

// Split-chain potential scale reduction. A single chain is split in half.
// Returns 1.0 when the pooled draws have zero variance.
double split_rhat(std::span<const Chain> chains);

// n / (1 + 2 sum rho_t) with Geyer's initial positive sequence, clipped to (0, n].
double effective_sample_size(const Chain& chain);

}  // namespace netmed
