#pragma once

// Seeded generators. Dyads are visited in row-major i<j order with one uniform
// draw each, so a given seed reproduces the same network bit for bit.

#include "netmed/graph.hpp"
#include "netmed/mediation.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace netmed {

AdjacencyMatrix gen_erdos_renyi(int n, double p, std::uint64_t seed);

// Dyad (i, j) ~ Bernoulli(prob(class_i, class_j)).
AdjacencyMatrix gen_latent_class(const std::vector<int>& memberships, const Eigen::MatrixXd& prob,
                                 std::uint64_t seed);

// p_ij = logistic(intercept - ||x_i - x_j||).
AdjacencyMatrix gen_latent_distance(const Eigen::MatrixXd& positions, double intercept, std::uint64_t seed);

struct DyadicTerm {
  double beta = 0.0;
  DyadicCovariateMatrix h;
};

// p_ij = logistic(sum_p beta_p h_p,ij + u_i^T Lambda u_j).
AdjacencyMatrix gen_eigenmodel(const Eigen::MatrixXd& u, const Eigen::VectorXd& lambda,
                               std::span<const DyadicTerm> terms, std::uint64_t seed);

struct MediationTruth {
  double outcome_intercept = 0.0;  // i_2 (b0 for binary outcomes)
  double cp = 0.0;
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd mediator_intercepts;  // i_3k; zeros when empty
  double mediator_noise_sd = 1.0;
  double outcome_noise_sd = 1.0;
  OutcomeFamily family = OutcomeFamily::continuous;
};

// X ~ Bernoulli(0.5); M_k = i_3k + a_k X + e; Y from the linear or logistic outcome model.
MediationData gen_mediation_data(int n, const MediationTruth& truth, std::uint64_t seed);

}  // namespace netmed
