#pragma once

// Latent eigenmodel for a binary symmetric network:
//   link(p_ij) = z_ij,   z_ij = sum_p beta_p h_p,ij + u_i^T Lambda u_j
// fitted by Metropolis-within-Gibbs, plus mediator extraction and latent
// dimension selection.

#include "netmed/graph.hpp"
#include "netmed/kernels.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace netmed {

using kernels::Link;

std::string to_string(Link link);
Link parse_link(const std::string& text);

// Robbins-Monro adaptation of random-walk scales during burn-in:
// log(scale) += (t + 1)^(-decay) * (accepted - target_acceptance).
struct ProposalAdaptation {
  double target_acceptance = 0.3;
  double decay = 0.6;
  double initial_scale_u = 0.5;
  double initial_scale_lambda = 1.0;
  double initial_scale_beta = 0.2;
};

struct EigenmodelConfig {
  int rank = 2;
  int total_iterations = 30000;
  int burn_in = 5000;
  int thin = 1;
  Link link = Link::logit;
  double prior_sd_beta = 10.0;
  double prior_sd_lambda = 10.0;
  double prior_sd_u = 1.0;
  ProposalAdaptation adaptation;
  std::uint64_t seed = 1;
  // Keep every saved U draw. Off means only ulu_postmean, beta and lambda are kept.
  bool store_u_draws = false;

  void validate() const;
  int saved_draws() const { return (total_iterations - burn_in) / thin; }
};

struct EigenmodelFit {
  EigenmodelConfig config;
  int n = 0;
  Eigen::MatrixXd beta_draws;    // saved draws x covariates (zero columns when unconditional)
  Eigen::MatrixXd lambda_draws;  // saved draws x rank
  std::vector<Eigen::MatrixXd> u_draws;
  Eigen::MatrixXd ulu_postmean;  // posterior mean of U Lambda U^T
  Eigen::VectorXd beta_postmean;
  std::map<std::string, double> acceptance;  // post burn-in acceptance rate per block
  std::vector<std::string> warnings;

  int saved_draws() const { return static_cast<int>(lambda_draws.rows()); }
};

EigenmodelFit fit_eigenmodel(const AdjacencyMatrix& a, std::span<const DyadicCovariateMatrix> covariates,
                             const EigenmodelConfig& config);

// Posterior mean of z: ulu_postmean + sum_p mean(beta_p) H_p.
Eigen::MatrixXd latent_postmean(const EigenmodelFit& fit, std::span<const DyadicCovariateMatrix> covariates);

// Log-likelihood of the network for fixed parameters.
double eigenmodel_loglik(const AdjacencyMatrix& a, std::span<const DyadicCovariateMatrix> covariates,
                         std::span<const double> beta, const Eigen::MatrixXd& u, const Eigen::VectorXd& lambda,
                         Link link);

struct MediatorMatrix {
  Eigen::MatrixXd vectors;   // n x Q, orthonormal columns
  Eigen::VectorXd eigenvalues;  // descending
  std::vector<std::string> warnings;

  int n() const { return static_cast<int>(vectors.rows()); }
  int rank() const { return static_cast<int>(vectors.cols()); }
};

// Leading Q eigenvectors of a symmetric matrix. Each column is signed so its
// largest-magnitude entry (lowest index on ties) is positive.
MediatorMatrix extract_mediators(const Eigen::MatrixXd& ulu_postmean, int q);
MediatorMatrix extract_mediators(const EigenmodelFit& fit, int q);

struct ScreeElbow {
  int suggested = 0;
  bool heuristic_available = false;
  std::vector<double> positive_spectrum;
};
// Largest second difference of the positive part of a descending spectrum.
ScreeElbow scree_elbow(std::span<const double> eigenvalues);

struct DimensionCandidate {
  int rank = 0;
  std::vector<double> spectrum;  // full spectrum of ulu_postmean, descending
  bool top_positive = false;     // leading `rank` eigenvalues all > 0
  bool has_negative = false;     // some eigenvalue below -1e-8 * max |eigenvalue|
};

struct DimensionSelection {
  int selected = 2;
  // Set when even the two-dimensional fit has a negative eigenvalue.
  bool fallback = false;
  std::vector<DimensionCandidate> candidates;
  std::optional<EigenmodelFit> selected_fit;
};

// Fits Q = 2, 3, ... q_max and stops at the first Q whose posterior-mean
// decomposition has a negative eigenvalue anywhere in its spectrum; returns
// the last Q without one.
DimensionSelection select_dimension_conditional(const AdjacencyMatrix& a,
                                                std::span<const DyadicCovariateMatrix> covariates,
                                                int q_max, const EigenmodelConfig& config);

}  // namespace netmed
