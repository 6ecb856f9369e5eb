#pragma once

// Bayesian multiple-mediator models with eigenvector mediators.
//
//   M_k = i_3k + a_k X + e_k                       (k = 1..Q, conjugate Gibbs)
//   Y   = b0 + cp X + sum_k b_k M_k + e            (continuous, conjugate Gibbs)
//   logit P(Y = 1) = b0 + cp X + sum_k b_k M_k     (binary, adaptive random-walk Metropolis)
//
// Coefficients get Normal(0, coef_prior_variance) priors and residual
// precisions Gamma(shape, rate) priors. Each draw carries the derived effects
// ab_k = a_k b_k, ab = sum_k ab_k and total = cp + ab.

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace netmed {

enum class OutcomeFamily { continuous, binary };

std::string to_string(OutcomeFamily family);
OutcomeFamily parse_family(const std::string& text);

struct MediationData {
  Eigen::VectorXd x;
  Eigen::VectorXd y;
  Eigen::MatrixXd m;  // n x Q mediators
  OutcomeFamily family = OutcomeFamily::continuous;

  int n() const { return static_cast<int>(x.size()); }
  int q() const { return static_cast<int>(m.cols()); }
  void validate() const;
};

struct MediationConfig {
  int iterations = 30000;  // per chain, burn-in included
  int burn_in = 5000;
  int thin = 1;
  int n_chains = 3;
  double coef_prior_variance = 1e6;
  double precision_shape = 0.001;
  double precision_rate = 0.001;
  std::uint64_t seed = 1;
  double hpd_prob = 0.95;

  void validate() const;
  int saved_draws() const { return (iterations - burn_in) / thin; }
};

// Saved draws of one chain, one column per named parameter.
struct DrawTable {
  std::vector<std::string> names;
  Eigen::MatrixXd values;  // draws x parameters

  Eigen::Index column(const std::string& name) const;
};

struct MediationPosterior {
  int q = 0;
  OutcomeFamily family = OutcomeFamily::continuous;
  std::vector<DrawTable> chains;
  std::vector<std::string> warnings;

  const std::vector<std::string>& names() const { return chains.front().names; }
  // All chains concatenated in chain order.
  std::vector<double> pooled(const std::string& name) const;
};

// Column order of every mediation draw table; summaries follow it.
std::vector<std::string> mediation_parameter_names(int q, OutcomeFamily family);

MediationPosterior fit_continuous_mediation(const MediationData& data, const MediationConfig& config);
MediationPosterior fit_binary_mediation(const MediationData& data, const MediationConfig& config);
MediationPosterior fit_mediation(const MediationData& data, const MediationConfig& config);

// Single-predictor regression of Y on X (parameters c and i1, plus prec_y for
// continuous outcomes), a cross-check for the derived total effect.
MediationPosterior fit_total_effect(const MediationData& data, const MediationConfig& config);

struct Effects {
  std::vector<double> ab_k;
  double ab = 0.0;
  double total = 0.0;
};
Effects derive_effects(std::span<const double> a, std::span<const double> b, double cp);
// Recomputes the ab_k, ab and total columns of a mediation draw table in place.
void derive_effects(DrawTable& draws, int q);

// Outcome log-likelihood of the logistic model at fixed coefficients.
double binary_outcome_loglik(const MediationData& data, double b0, double cp, std::span<const double> b);

struct ParameterSummary {
  std::string parameter;
  double estimate = 0.0;
  double post_sd = 0.0;
  double hpd_lower = 0.0;
  double hpd_upper = 0.0;
  bool significant = false;  // HPD interval excludes 0
};
using PosteriorSummary = std::vector<ParameterSummary>;

ParameterSummary summarize_draws(const std::string& name, std::span<const double> draws, double prob);
// Pools all chains.
PosteriorSummary summarize(const MediationPosterior& posterior, double prob);
std::vector<PosteriorSummary> summarize_per_chain(const MediationPosterior& posterior, double prob);

}  // namespace netmed
