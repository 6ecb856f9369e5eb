#include "netmed/eigenmodel.hpp"

#include "netmed/error.hpp"
#include "netmed/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace netmed {

std::string to_string(Link link) { return link == Link::logit ? "logit" : "probit"; }

Link parse_link(const std::string& text) {
  if (text == "logit") return Link::logit;
  if (text == "probit") return Link::probit;
  throw InputError("unknown link '" + text + "' (expected logit or probit)");
}

void EigenmodelConfig::validate() const {
  if (rank < 1) throw InputError("rank must be at least 1");
  if (total_iterations < 1) throw InputError("total_iterations must be positive");
  if (burn_in < 0 || burn_in >= total_iterations) throw InputError("burn_in must lie in [0, total_iterations)");
  if (thin < 1) throw InputError("thin must be positive");
  if (!(prior_sd_beta > 0.0) || !(prior_sd_lambda > 0.0) || !(prior_sd_u > 0.0))
    throw InputError("prior standard deviations must be positive");
  if (!(adaptation.target_acceptance > 0.0 && adaptation.target_acceptance < 1.0))
    throw InputError("target acceptance must lie in (0, 1)");
}

namespace {

void check_covariates(const AdjacencyMatrix& a, std::span<const DyadicCovariateMatrix> covariates) {
  for (std::size_t p = 0; p < covariates.size(); ++p)
    if (covariates[p].n() != a.n())
      throw InputError("dyadic covariate " + std::to_string(p + 1) + " has " + std::to_string(covariates[p].n()) +
                       " nodes but the network has " + std::to_string(a.n()));
}

Eigen::MatrixXd build_latent(std::span<const DyadicCovariateMatrix> covariates, const Eigen::VectorXd& beta,
                             const Eigen::MatrixXd& u, const Eigen::VectorXd& lambda) {
  Eigen::MatrixXd z = u * lambda.asDiagonal() * u.transpose();
  for (std::size_t p = 0; p < covariates.size(); ++p) z += beta(static_cast<Eigen::Index>(p)) * covariates[p].values();
  return z;
}

// Sampler state for one chain.
class EigenmodelSampler {
 public:
  EigenmodelSampler(const AdjacencyMatrix& a, std::span<const DyadicCovariateMatrix> covariates,
                    const EigenmodelConfig& config)
      : a_(a), h_(covariates), cfg_(config), rng_(config.seed), n_(a.n()), q_(config.rank),
        p_(static_cast<int>(covariates.size())) {
    initialise();
  }

  EigenmodelFit run() {
    EigenmodelFit fit;
    fit.config = cfg_;
    fit.n = n_;
    const int saved = cfg_.saved_draws();
    fit.beta_draws.resize(saved, p_);
    fit.lambda_draws.resize(saved, q_);
    if (cfg_.store_u_draws) fit.u_draws.reserve(saved);
    fit.ulu_postmean = Eigen::MatrixXd::Zero(n_, n_);

    long accepted_u = 0;
    std::vector<long> accepted_lambda(q_, 0), accepted_beta(p_, 0);
    int s = 0;
    for (int t = 0; t < cfg_.total_iterations; ++t) {
      const bool adapting = t < cfg_.burn_in;
      const double gain = std::pow(t + 1.0, -cfg_.adaptation.decay);
      auto adapt = [&](double& log_scale, bool accepted) {
        if (adapting) log_scale += gain * ((accepted ? 1.0 : 0.0) - cfg_.adaptation.target_acceptance);
      };

      z_ = build_latent(h_, beta_, u_, lambda_);
      for (int i = 0; i < n_; ++i) {
        const bool ok = update_row(i);
        adapt(log_scale_u_[i], ok);
        if (!adapting) accepted_u += ok;
      }
      z_ = build_latent(h_, beta_, u_, lambda_);
      loglik_ = kernels::dyad_loglik(a_, z_, cfg_.link);
      for (int k = 0; k < q_; ++k) {
        const bool ok = update_lambda(k);
        adapt(log_scale_lambda_[k], ok);
        if (!adapting) accepted_lambda[k] += ok;
      }
      for (int p = 0; p < p_; ++p) {
        const bool ok = update_beta(p);
        adapt(log_scale_beta_[p], ok);
        if (!adapting) accepted_beta[p] += ok;
      }

      if (!adapting && (t - cfg_.burn_in + 1) % cfg_.thin == 0) {
        fit.beta_draws.row(s) = beta_.transpose();
        fit.lambda_draws.row(s) = lambda_.transpose();
        if (cfg_.store_u_draws) fit.u_draws.push_back(u_);
        kernels::accumulate_low_rank(u_, lambda_, fit.ulu_postmean);
        ++s;
      }
    }

    fit.ulu_postmean /= static_cast<double>(std::max(saved, 1));
    // Symmetrise away accumulated rounding.
    fit.ulu_postmean = 0.5 * (fit.ulu_postmean + fit.ulu_postmean.transpose()).eval();
    fit.beta_postmean = saved > 0 ? Eigen::VectorXd(fit.beta_draws.colwise().mean().transpose())
                                  : Eigen::VectorXd(beta_);

    const double post = cfg_.total_iterations - cfg_.burn_in;
    fit.acceptance["U"] = static_cast<double>(accepted_u) / (post * n_);
    for (int k = 0; k < q_; ++k) fit.acceptance["lambda_" + std::to_string(k + 1)] = accepted_lambda[k] / post;
    for (int p = 0; p < p_; ++p) fit.acceptance["beta_" + std::to_string(p + 1)] = accepted_beta[p] / post;
    return fit;
  }

 private:
  // Spectral start: the Q largest-magnitude eigenpairs of the +/-1 coded network.
  void initialise() {
    Eigen::MatrixXd coded = 2.0 * a_.to_dense() - Eigen::MatrixXd::Ones(n_, n_);
    coded.diagonal().setZero();
    const auto eig = symmetric_eigen_descending(coded);
    std::vector<int> order(n_);
    for (int k = 0; k < n_; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return std::abs(eig.values(x)) > std::abs(eig.values(y)); });
    u_.resize(n_, q_);
    lambda_.resize(q_);
    const double root_n = std::sqrt(static_cast<double>(n_));
    for (int k = 0; k < q_; ++k) {
      u_.col(k) = root_n * cfg_.prior_sd_u * eig.vectors.col(order[k]);
      lambda_(k) = 2.0 * eig.values(order[k]) / (n_ * cfg_.prior_sd_u * cfg_.prior_sd_u);
    }
    beta_ = Eigen::VectorXd::Zero(p_);
    log_scale_u_.assign(n_, std::log(cfg_.adaptation.initial_scale_u));
    log_scale_lambda_.assign(q_, std::log(cfg_.adaptation.initial_scale_lambda));
    log_scale_beta_.assign(p_, std::log(cfg_.adaptation.initial_scale_beta));
  }

  bool accept(double log_ratio) { return log_ratio >= 0.0 || std::log(rng_.uniform()) < log_ratio; }

  bool update_row(int i) {
    const double scale = std::exp(log_scale_u_[i]);
    Eigen::VectorXd step(q_);
    for (int k = 0; k < q_; ++k) step(k) = scale * rng_.normal();
    // Change of z_ij for every j: (step^T Lambda) u_j.
    const Eigen::VectorXd dz = u_ * (lambda_.asDiagonal() * step);
    const auto* row = a_.row(i);
    double delta = 0.0;
    for (int j = 0; j < n_; ++j) {
      if (j == i) continue;
      delta += kernels::dyad_term(cfg_.link, row[j] != 0, z_(i, j) + dz(j)) -
               kernels::dyad_term(cfg_.link, row[j] != 0, z_(i, j));
    }
    const Eigen::VectorXd proposed = u_.row(i).transpose() + step;
    const double var = cfg_.prior_sd_u * cfg_.prior_sd_u;
    delta += -0.5 * (proposed.squaredNorm() - u_.row(i).squaredNorm()) / var;
    if (!accept(delta)) return false;
    u_.row(i) = proposed.transpose();
    for (int j = 0; j < n_; ++j) {
      if (j == i) continue;
      z_(i, j) += dz(j);
      z_(j, i) = z_(i, j);
    }
    return true;
  }

  bool update_lambda(int k) {
    const double step = std::exp(log_scale_lambda_[k]) * rng_.normal();
    const Eigen::VectorXd v = u_.col(k);
    const double proposed_ll = kernels::dyad_loglik_rank_one(a_, z_, v, step, cfg_.link);
    const double var = cfg_.prior_sd_lambda * cfg_.prior_sd_lambda;
    const double next = lambda_(k) + step;
    const double log_ratio = proposed_ll - loglik_ - 0.5 * (next * next - lambda_(k) * lambda_(k)) / var;
    if (!accept(log_ratio)) return false;
    lambda_(k) = next;
    z_.noalias() += step * v * v.transpose();
    loglik_ = proposed_ll;
    return true;
  }

  bool update_beta(int p) {
    const double step = std::exp(log_scale_beta_[p]) * rng_.normal();
    const auto& h = h_[p].values();
    const double proposed_ll = kernels::dyad_loglik_shift(a_, z_, h, step, cfg_.link);
    const double var = cfg_.prior_sd_beta * cfg_.prior_sd_beta;
    const double next = beta_(p) + step;
    const double log_ratio = proposed_ll - loglik_ - 0.5 * (next * next - beta_(p) * beta_(p)) / var;
    if (!accept(log_ratio)) return false;
    beta_(p) = next;
    z_ += step * h;
    loglik_ = proposed_ll;
    return true;
  }

  const AdjacencyMatrix& a_;
  std::span<const DyadicCovariateMatrix> h_;
  EigenmodelConfig cfg_;
  Rng rng_;
  int n_, q_, p_;

  Eigen::MatrixXd u_;
  Eigen::VectorXd lambda_;
  Eigen::VectorXd beta_;
  Eigen::MatrixXd z_;
  double loglik_ = 0.0;
  std::vector<double> log_scale_u_, log_scale_lambda_, log_scale_beta_;
};

}  // namespace

EigenmodelFit fit_eigenmodel(const AdjacencyMatrix& a, std::span<const DyadicCovariateMatrix> covariates,
                             const EigenmodelConfig& config) {
  config.validate();
  check_covariates(a, covariates);
  if (config.rank >= a.n())
    throw InputError("rank " + std::to_string(config.rank) + " must be smaller than the node count " +
                     std::to_string(a.n()));

  EigenmodelSampler sampler(a, covariates, config);
  auto fit = sampler.run();
  const long edges = a.edge_count();
  const long dyads = static_cast<long>(a.n()) * (a.n() - 1) / 2;
  if (edges == 0) fit.warnings.push_back("degenerate network: no edges; posterior is driven by the priors");
  if (edges == dyads) fit.warnings.push_back("degenerate network: complete graph; posterior is driven by the priors");
  return fit;
}

Eigen::MatrixXd latent_postmean(const EigenmodelFit& fit, std::span<const DyadicCovariateMatrix> covariates) {
  if (static_cast<Eigen::Index>(covariates.size()) != fit.beta_postmean.size())
    throw InputError("covariate count does not match the fit");
  Eigen::MatrixXd z = fit.ulu_postmean;
  for (std::size_t p = 0; p < covariates.size(); ++p)
    z += fit.beta_postmean(static_cast<Eigen::Index>(p)) * covariates[p].values();
  return z;
}

double eigenmodel_loglik(const AdjacencyMatrix& a, std::span<const DyadicCovariateMatrix> covariates,
                         std::span<const double> beta, const Eigen::MatrixXd& u, const Eigen::VectorXd& lambda,
                         Link link) {
  check_covariates(a, covariates);
  if (beta.size() != covariates.size()) throw InputError("one beta per dyadic covariate is required");
  if (u.rows() != a.n() || u.cols() != lambda.size()) throw InputError("U and Lambda dimensions are inconsistent");
  const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(beta.data(), static_cast<Eigen::Index>(beta.size()));
  return kernels::dyad_loglik(a, build_latent(covariates, b, u, lambda), link);
}

MediatorMatrix extract_mediators(const Eigen::MatrixXd& ulu_postmean, int q) {
  const auto n = ulu_postmean.rows();
  if (ulu_postmean.cols() != n) throw InputError("posterior mean matrix must be square");
  if (q < 1 || q > n) throw InputError("mediator count must lie in [1, n]");
  const auto eig = symmetric_eigen_descending(ulu_postmean);

  MediatorMatrix out;
  out.vectors = eig.vectors.leftCols(q);
  out.eigenvalues = eig.values.head(q);
  for (int k = 0; k < q; ++k) {
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      if (std::abs(out.vectors(i, k)) > std::abs(out.vectors(arg, k))) arg = i;
    if (out.vectors(arg, k) < 0.0) out.vectors.col(k) *= -1.0;
  }

  const double scale = eig.values.cwiseAbs().maxCoeff();
  const double tol = std::max(scale, 1.0) * 1e-10 * static_cast<double>(n);
  const auto nonzero = (eig.values.array().abs() > tol).count();
  if (q > nonzero)
    out.warnings.push_back("requested " + std::to_string(q) + " mediators but only " + std::to_string(nonzero) +
                           " eigenvalues are numerically nonzero");
  return out;
}

MediatorMatrix extract_mediators(const EigenmodelFit& fit, int q) {
  if (fit.saved_draws() == 0) throw InputError("fit has no saved draws");
  return extract_mediators(fit.ulu_postmean, q);
}

ScreeElbow scree_elbow(std::span<const double> eigenvalues) {
  if (eigenvalues.empty()) throw InputError("scree_elbow needs a non-empty spectrum");
  ScreeElbow out;
  for (double v : eigenvalues)
    if (v > 0.0) out.positive_spectrum.push_back(v);
  std::sort(out.positive_spectrum.begin(), out.positive_spectrum.end(), std::greater<>());
  const auto& s = out.positive_spectrum;
  if (s.size() < 3) {
    out.suggested = static_cast<int>(s.size());
    out.heuristic_available = false;
    return out;
  }
  out.heuristic_available = true;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 2 < s.size(); ++k) {
    const double curvature = s[k] - 2.0 * s[k + 1] + s[k + 2];
    if (curvature > best) {
      best = curvature;
      out.suggested = static_cast<int>(k) + 1;
    }
  }
  return out;
}

DimensionSelection select_dimension_conditional(const AdjacencyMatrix& a,
                                                std::span<const DyadicCovariateMatrix> covariates,
                                                int q_max, const EigenmodelConfig& config) {
  if (q_max < 2) throw InputError("q_max must be at least 2");
  DimensionSelection out;
  for (int q = 2; q <= q_max; ++q) {
    auto cfg = config;
    cfg.rank = q;
    auto fit = fit_eigenmodel(a, covariates, cfg);
    const auto eig = symmetric_eigen_descending(fit.ulu_postmean);
    DimensionCandidate candidate;
    candidate.rank = q;
    candidate.spectrum.assign(eig.values.data(), eig.values.data() + eig.values.size());
    candidate.top_positive = (eig.values.head(q).array() > 0.0).all();
    const double floor = -1e-8 * std::max(eig.values.cwiseAbs().maxCoeff(), 1e-300);
    candidate.has_negative = eig.values.minCoeff() < floor;
    out.candidates.push_back(candidate);
    if (candidate.has_negative) {
      if (q == 2) {
        out.fallback = true;
        out.selected_fit = std::move(fit);
      }
      break;
    }
    out.selected = q;
    out.selected_fit = std::move(fit);
  }
  return out;
}

}  // namespace netmed
