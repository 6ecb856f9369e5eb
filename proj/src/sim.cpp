#include "netmed/sim.hpp"

#include "netmed/error.hpp"
#include "netmed/rng.hpp"

#include <cmath>

namespace netmed {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

template <class Prob>
AdjacencyMatrix sample_dyads(int n, std::uint64_t seed, Prob prob) {
  if (n < 2) throw InputError("generators need at least 2 nodes");
  Rng rng(seed);
  std::vector<std::uint8_t> entries(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const std::uint8_t edge = rng.bernoulli(prob(i, j)) ? 1 : 0;
      entries[static_cast<std::size_t>(i) * n + j] = edge;
      entries[static_cast<std::size_t>(j) * n + i] = edge;
    }
  return AdjacencyMatrix(n, std::move(entries));
}

}  // namespace

AdjacencyMatrix gen_erdos_renyi(int n, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw InputError("edge probability must lie in [0, 1]");
  return sample_dyads(n, seed, [p](int, int) { return p; });
}

AdjacencyMatrix gen_latent_class(const std::vector<int>& memberships, const Eigen::MatrixXd& prob,
                                 std::uint64_t seed) {
  if (prob.rows() != prob.cols()) throw InputError("class probability table must be square");
  for (Eigen::Index r = 0; r < prob.rows(); ++r)
    for (Eigen::Index c = 0; c < prob.cols(); ++c) {
      if (!(prob(r, c) >= 0.0 && prob(r, c) <= 1.0)) throw InputError("class probabilities must lie in [0, 1]");
      if (prob(r, c) != prob(c, r)) throw InputError("class probability table must be symmetric");
    }
  for (int m : memberships)
    if (m < 0 || m >= prob.rows()) throw InputError("class label " + std::to_string(m) + " is out of range");
  return sample_dyads(static_cast<int>(memberships.size()), seed,
                      [&](int i, int j) { return prob(memberships[i], memberships[j]); });
}

AdjacencyMatrix gen_latent_distance(const Eigen::MatrixXd& positions, double intercept, std::uint64_t seed) {
  if (positions.cols() < 1) throw InputError("latent positions need at least one dimension");
  return sample_dyads(static_cast<int>(positions.rows()), seed, [&](int i, int j) {
    return logistic(intercept - (positions.row(i) - positions.row(j)).norm());
  });
}

AdjacencyMatrix gen_eigenmodel(const Eigen::MatrixXd& u, const Eigen::VectorXd& lambda,
                               std::span<const DyadicTerm> terms, std::uint64_t seed) {
  if (u.cols() != lambda.size()) throw InputError("U has " + std::to_string(u.cols()) + " columns but Lambda has " +
                                                  std::to_string(lambda.size()) + " entries");
  const auto n = u.rows();
  for (const auto& term : terms)
    if (term.h.n() != n) throw InputError("dyadic covariate size does not match U");
  Eigen::MatrixXd z = u * lambda.asDiagonal() * u.transpose();
  for (const auto& term : terms) z += term.beta * term.h.values();
  return sample_dyads(static_cast<int>(n), seed, [&](int i, int j) { return logistic(z(i, j)); });
}

MediationData gen_mediation_data(int n, const MediationTruth& truth, std::uint64_t seed) {
  const auto q = truth.a.size();
  if (n < 2) throw InputError("need at least 2 observations");
  if (q < 1 || truth.b.size() != q) throw InputError("a and b must have the same positive length");
  if (truth.mediator_intercepts.size() != 0 && truth.mediator_intercepts.size() != q)
    throw InputError("mediator intercepts must match the mediator count");
  if (!(truth.mediator_noise_sd > 0.0)) throw InputError("mediator noise SD must be positive");
  if (truth.family == OutcomeFamily::continuous && !(truth.outcome_noise_sd > 0.0))
    throw InputError("outcome noise SD must be positive");

  Rng rng(seed);
  MediationData d;
  d.family = truth.family;
  d.x.resize(n);
  d.y.resize(n);
  d.m.resize(n, q);
  for (int i = 0; i < n; ++i) {
    d.x(i) = rng.bernoulli(0.5) ? 1.0 : 0.0;
    double eta = truth.outcome_intercept + truth.cp * d.x(i);
    for (Eigen::Index k = 0; k < q; ++k) {
      const double i3 = truth.mediator_intercepts.size() ? truth.mediator_intercepts(k) : 0.0;
      d.m(i, k) = i3 + truth.a(k) * d.x(i) + truth.mediator_noise_sd * rng.normal();
      eta += truth.b(k) * d.m(i, k);
    }
    if (truth.family == OutcomeFamily::continuous)
      d.y(i) = eta + truth.outcome_noise_sd * rng.normal();
    else
      d.y(i) = rng.bernoulli(logistic(eta)) ? 1.0 : 0.0;
  }
  return d;
}

}  // namespace netmed
