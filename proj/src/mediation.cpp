#include "netmed/mediation.hpp"

#include "netmed/diagnostics.hpp"
#include "netmed/error.hpp"
#include "netmed/kernels.hpp"
#include "netmed/rng.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

namespace netmed {

std::string to_string(OutcomeFamily family) {
  return family == OutcomeFamily::continuous ? "continuous" : "binary";
}

OutcomeFamily parse_family(const std::string& text) {
  if (text == "continuous") return OutcomeFamily::continuous;
  if (text == "binary") return OutcomeFamily::binary;
  throw InputError("unknown outcome family '" + text + "' (expected continuous or binary)");
}

void MediationData::validate() const {
  const auto n = x.size();
  if (y.size() != n || m.rows() != n) throw InputError("X, Y and mediators must have the same length");
  if (m.cols() < 1) throw InputError("at least one mediator is required");
  if (!x.allFinite() || !y.allFinite() || !m.allFinite()) throw InputError("mediation data has missing values");
  if (family == OutcomeFamily::binary)
    for (Eigen::Index i = 0; i < n; ++i)
      if (y(i) != 0.0 && y(i) != 1.0) throw InputError("binary outcome must be coded 0/1");
}

void MediationConfig::validate() const {
  if (iterations < 1) throw InputError("iterations must be positive");
  if (burn_in < 0 || burn_in >= iterations) throw InputError("burn_in must lie in [0, iterations)");
  if (thin < 1) throw InputError("thin must be positive");
  if (n_chains < 1) throw InputError("n_chains must be at least 1");
  if (!(coef_prior_variance > 0.0) || !(precision_shape > 0.0) || !(precision_rate > 0.0))
    throw InputError("prior parameters must be positive");
  if (!(hpd_prob > 0.0 && hpd_prob < 1.0)) throw InputError("hpd probability must lie in (0, 1)");
}

Eigen::Index DrawTable::column(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw InputError("no parameter named '" + name + "'");
  return it - names.begin();
}

std::vector<double> MediationPosterior::pooled(const std::string& name) const {
  std::vector<double> out;
  for (const auto& chain : chains) {
    const auto col = chain.column(name);
    for (Eigen::Index s = 0; s < chain.values.rows(); ++s) out.push_back(chain.values(s, col));
  }
  return out;
}

std::vector<std::string> mediation_parameter_names(int q, OutcomeFamily family) {
  std::vector<std::string> names{"cp"};
  for (int k = 1; k <= q; ++k) names.push_back("a" + std::to_string(k));
  for (int k = 1; k <= q; ++k) names.push_back("b" + std::to_string(k));
  for (int k = 1; k <= q; ++k) names.push_back("ab" + std::to_string(k));
  names.push_back("ab");
  names.push_back("total");
  names.push_back("b0");
  for (int k = 1; k <= q; ++k) names.push_back("i3_" + std::to_string(k));
  for (int k = 1; k <= q; ++k) names.push_back("prec_u" + std::to_string(k));
  if (family == OutcomeFamily::continuous) names.push_back("prec_y");
  return names;
}

Effects derive_effects(std::span<const double> a, std::span<const double> b, double cp) {
  if (a.size() != b.size()) throw InputError("a and b must have the same length");
  Effects e;
  e.ab_k.resize(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    e.ab_k[k] = a[k] * b[k];
    e.ab += e.ab_k[k];
  }
  e.total = cp + e.ab;
  return e;
}

void derive_effects(DrawTable& draws, int q) {
  const auto cp = draws.column("cp");
  const auto a1 = draws.column("a1");
  const auto b1 = draws.column("b1");
  const auto ab1 = draws.column("ab1");
  const auto ab = draws.column("ab");
  const auto total = draws.column("total");
  std::vector<double> a(q), b(q);
  for (Eigen::Index s = 0; s < draws.values.rows(); ++s) {
    for (int k = 0; k < q; ++k) {
      a[k] = draws.values(s, a1 + k);
      b[k] = draws.values(s, b1 + k);
    }
    const auto e = derive_effects(a, b, draws.values(s, cp));
    for (int k = 0; k < q; ++k) draws.values(s, ab1 + k) = e.ab_k[k];
    draws.values(s, ab) = e.ab;
    draws.values(s, total) = e.total;
  }
}

namespace {

// Throws naming the first design column that adds no rank.
void check_design_rank(const Eigen::MatrixXd& design, const std::vector<std::string>& labels) {
  for (Eigen::Index c = 1; c <= design.cols(); ++c) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.leftCols(c));
    qr.setThreshold(1e-10);
    if (qr.rank() < c)
      throw InputError("rank-deficient design: column '" + labels[c - 1] +
                       "' is constant or collinear with earlier columns");
  }
}

std::vector<std::string> mediator_labels(int q) {
  std::vector<std::string> out;
  for (int k = 1; k <= q; ++k) out.push_back("U" + std::to_string(k));
  return out;
}

// Conjugate Gibbs for y = D beta + e, e ~ N(0, 1/tau), beta ~ N(0, v I), tau ~ Gamma(a, b).
class LinearGibbs {
 public:
  LinearGibbs(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, const MediationConfig& cfg)
      : design_(design), y_(y), xtx_(design.transpose() * design), xty_(design.transpose() * y),
        prior_precision_(1.0 / cfg.coef_prior_variance), shape_(cfg.precision_shape + 0.5 * y.size()),
        rate0_(cfg.precision_rate) {
    const double mu = y.mean();
    const double var = (y.array() - mu).square().sum() / std::max<Eigen::Index>(1, y.size() - 1);
    tau_ = var > 0.0 ? 1.0 / var : 1.0;
    beta_ = Eigen::VectorXd::Zero(design.cols());
  }

  void step(Rng& rng) {
    const auto d = design_.cols();
    Eigen::MatrixXd precision = tau_ * xtx_;
    precision.diagonal().array() += prior_precision_;
    const Eigen::LLT<Eigen::MatrixXd> llt(precision);
    const Eigen::VectorXd mean = llt.solve(tau_ * xty_);
    Eigen::VectorXd z(d);
    for (Eigen::Index k = 0; k < d; ++k) z(k) = rng.normal();
    beta_ = mean + llt.matrixU().solve(z);
    const double rss = (y_ - design_ * beta_).squaredNorm();
    tau_ = rng.gamma(shape_, rate0_ + 0.5 * rss);
  }

  const Eigen::VectorXd& beta() const { return beta_; }
  double tau() const { return tau_; }

 private:
  const Eigen::MatrixXd& design_;
  const Eigen::VectorXd& y_;
  Eigen::MatrixXd xtx_;
  Eigen::VectorXd xty_;
  double prior_precision_;
  double shape_;
  double rate0_;
  double tau_;
  Eigen::VectorXd beta_;
};

// Joint random-walk Metropolis for logistic coefficients. Starts near the
// posterior mode with a Laplace proposal covariance; during burn-in the
// covariance is re-estimated from the chain's own draws, then frozen.
class LogisticMetropolis {
 public:
  LogisticMetropolis(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, const MediationConfig& cfg,
                     const Eigen::VectorXd& mode, const Eigen::MatrixXd& laplace_cov, Rng& rng)
      : design_(design), y_(y), prior_precision_(1.0 / cfg.coef_prior_variance), burn_in_(cfg.burn_in) {
    const auto d = design.cols();
    scale2_ = 2.38 * 2.38 / static_cast<double>(d);
    set_proposal(scale2_ * laplace_cov);
    // Overdispersed start around the mode.
    Eigen::VectorXd z(d);
    for (Eigen::Index k = 0; k < d; ++k) z(k) = rng.normal();
    theta_ = mode + chol_ * z;
    log_post_ = log_posterior(theta_);
    sum_ = Eigen::VectorXd::Zero(d);
    outer_ = Eigen::MatrixXd::Zero(d, d);
  }

  bool step(Rng& rng, int t) {
    const auto d = theta_.size();
    Eigen::VectorXd z(d);
    for (Eigen::Index k = 0; k < d; ++k) z(k) = rng.normal();
    const Eigen::VectorXd proposal = theta_ + chol_ * z;
    const double lp = log_posterior(proposal);
    const double log_ratio = lp - log_post_;
    const bool ok = log_ratio >= 0.0 || std::log(rng.uniform()) < log_ratio;
    if (ok) {
      theta_ = proposal;
      log_post_ = lp;
    }
    if (t < burn_in_) adapt(t);
    return ok;
  }

  const Eigen::VectorXd& theta() const { return theta_; }

 private:
  double log_posterior(const Eigen::VectorXd& theta) const {
    return kernels::logistic_loglik(design_, y_, theta) - 0.5 * prior_precision_ * theta.squaredNorm();
  }

  void set_proposal(const Eigen::MatrixXd& cov) {
    Eigen::MatrixXd c = cov;
    c.diagonal().array() += 1e-12;
    const Eigen::LLT<Eigen::MatrixXd> llt(c);
    if (llt.info() == Eigen::Success) chol_ = llt.matrixL();
  }

  void adapt(int t) {
    constexpr int warmup = 250;
    constexpr int every = 200;
    if (t < warmup) return;
    sum_ += theta_;
    outer_ += theta_ * theta_.transpose();
    ++count_;
    if (count_ >= 2 * every && count_ % every == 0) {
      const Eigen::VectorXd mu = sum_ / count_;
      Eigen::MatrixXd cov = (outer_ - count_ * mu * mu.transpose()) / (count_ - 1.0);
      set_proposal(scale2_ * cov);
    }
  }

  const Eigen::MatrixXd& design_;
  const Eigen::VectorXd& y_;
  double prior_precision_;
  int burn_in_;
  double scale2_ = 1.0;
  Eigen::MatrixXd chol_;
  Eigen::VectorXd theta_;
  double log_post_ = 0.0;
  Eigen::VectorXd sum_;
  Eigen::MatrixXd outer_;
  long count_ = 0;
};

struct LogisticMode {
  Eigen::VectorXd mode;
  Eigen::MatrixXd covariance;
  bool separated = false;
};

// Newton-Raphson on the log posterior.
LogisticMode logistic_mode(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, double prior_precision) {
  const auto d = design.cols();
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd hessian(d, d);
  for (int iter = 0; iter < 200; ++iter) {
    const Eigen::VectorXd eta = design * theta;
    const Eigen::VectorXd p = (1.0 / (1.0 + (-eta.array()).exp())).matrix();
    const Eigen::VectorXd w = (p.array() * (1.0 - p.array())).matrix();
    const Eigen::VectorXd grad = design.transpose() * (y - p) - prior_precision * theta;
    hessian = design.transpose() * w.asDiagonal() * design;
    hessian.diagonal().array() += prior_precision;
    const Eigen::VectorXd delta = hessian.ldlt().solve(grad);
    theta += delta;
    if (delta.lpNorm<Eigen::Infinity>() < 1e-10) break;
  }
  const Eigen::VectorXd eta = design * theta;
  const Eigen::VectorXd p = (1.0 / (1.0 + (-eta.array()).exp())).matrix();
  LogisticMode out;
  out.mode = theta;
  out.covariance = hessian.inverse();
  out.separated = (y - p).cwiseAbs().maxCoeff() < 1e-4;
  return out;
}

void check_binary_outcome(const MediationData& data) {
  const double ones = data.y.sum();
  if (ones == 0.0 || ones == static_cast<double>(data.n()))
    throw InputError("binary outcome needs both classes present");
}

template <class ChainBody>
std::vector<DrawTable> run_chains(const MediationConfig& cfg, std::uint64_t stream, ChainBody body) {
  std::vector<DrawTable> chains(cfg.n_chains);
  std::vector<std::exception_ptr> errors(cfg.n_chains);
  const std::uint64_t stage_seed = split_seed(cfg.seed, stream);
#pragma omp parallel for schedule(dynamic, 1)
  for (int c = 0; c < cfg.n_chains; ++c) {
    try {
      Rng rng(split_seed(stage_seed, static_cast<std::uint64_t>(c)));
      chains[c] = body(rng);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return chains;
}

bool is_saved(const MediationConfig& cfg, int t) { return t >= cfg.burn_in && (t - cfg.burn_in + 1) % cfg.thin == 0; }

Eigen::MatrixXd outcome_design(const MediationData& data) {
  const int n = data.n();
  const int q = data.q();
  Eigen::MatrixXd d(n, 2 + q);
  d.col(0).setOnes();
  d.col(1) = data.x;
  d.rightCols(q) = data.m;
  return d;
}

Eigen::MatrixXd predictor_design(const MediationData& data) {
  Eigen::MatrixXd d(data.n(), 2);
  d.col(0).setOnes();
  d.col(1) = data.x;
  return d;
}

void check_common(const MediationData& data, const MediationConfig& config) {
  data.validate();
  config.validate();
  check_design_rank(predictor_design(data), {"intercept", "X"});
  auto labels = mediator_labels(data.q());
  labels.insert(labels.begin(), {"intercept", "X"});
  check_design_rank(outcome_design(data), labels);
}

// Stores the mediator-regression part of a draw.
void store_mediators(DrawTable& t, Eigen::Index s, const std::vector<LinearGibbs>& mediators, int q) {
  const auto a1 = t.column("a1");
  const auto i31 = t.column("i3_1");
  const auto prec1 = t.column("prec_u1");
  for (int k = 0; k < q; ++k) {
    t.values(s, i31 + k) = mediators[k].beta()(0);
    t.values(s, a1 + k) = mediators[k].beta()(1);
    t.values(s, prec1 + k) = mediators[k].tau();
  }
}

void store_outcome(DrawTable& t, Eigen::Index s, const Eigen::VectorXd& coef, int q) {
  t.values(s, t.column("b0")) = coef(0);
  t.values(s, t.column("cp")) = coef(1);
  const auto b1 = t.column("b1");
  for (int k = 0; k < q; ++k) t.values(s, b1 + k) = coef(2 + k);
}

}  // namespace

MediationPosterior fit_continuous_mediation(const MediationData& data, const MediationConfig& config) {
  if (data.family != OutcomeFamily::continuous) throw InputError("continuous mediation needs a continuous outcome");
  check_common(data, config);
  const int q = data.q();
  if (data.n() <= q + 2) throw InputError("continuous mediation needs more observations than Q + 2");

  const Eigen::MatrixXd xd = predictor_design(data);
  const Eigen::MatrixXd yd = outcome_design(data);
  std::vector<Eigen::VectorXd> mcols(q);
  for (int k = 0; k < q; ++k) mcols[k] = data.m.col(k);

  MediationPosterior post;
  post.q = q;
  post.family = OutcomeFamily::continuous;
  post.chains = run_chains(config, streams::mediation, [&](Rng& rng) {
    DrawTable t{mediation_parameter_names(q, OutcomeFamily::continuous),
                Eigen::MatrixXd::Zero(config.saved_draws(), 0)};
    t.values.setZero(config.saved_draws(), static_cast<Eigen::Index>(t.names.size()));
    std::vector<LinearGibbs> mediators;
    for (int k = 0; k < q; ++k) mediators.emplace_back(xd, mcols[k], config);
    LinearGibbs outcome(yd, data.y, config);
    const auto prec_y = t.column("prec_y");
    Eigen::Index s = 0;
    for (int it = 0; it < config.iterations; ++it) {
      for (auto& m : mediators) m.step(rng);
      outcome.step(rng);
      if (!is_saved(config, it)) continue;
      store_mediators(t, s, mediators, q);
      store_outcome(t, s, outcome.beta(), q);
      t.values(s, prec_y) = outcome.tau();
      ++s;
    }
    derive_effects(t, q);
    return t;
  });
  return post;
}

MediationPosterior fit_binary_mediation(const MediationData& data, const MediationConfig& config) {
  if (data.family != OutcomeFamily::binary) throw InputError("binary mediation needs a binary outcome");
  check_common(data, config);
  check_binary_outcome(data);
  const int q = data.q();

  const Eigen::MatrixXd xd = predictor_design(data);
  const Eigen::MatrixXd yd = outcome_design(data);
  std::vector<Eigen::VectorXd> mcols(q);
  for (int k = 0; k < q; ++k) mcols[k] = data.m.col(k);
  const auto mode = logistic_mode(yd, data.y, 1.0 / config.coef_prior_variance);

  MediationPosterior post;
  post.q = q;
  post.family = OutcomeFamily::binary;
  if (mode.separated)
    post.warnings.push_back("complete separation detected: the logistic posterior is driven by the prior tails");
  post.chains = run_chains(config, streams::mediation, [&](Rng& rng) {
    DrawTable t{mediation_parameter_names(q, OutcomeFamily::binary), Eigen::MatrixXd()};
    t.values.setZero(config.saved_draws(), static_cast<Eigen::Index>(t.names.size()));
    std::vector<LinearGibbs> mediators;
    for (int k = 0; k < q; ++k) mediators.emplace_back(xd, mcols[k], config);
    LogisticMetropolis outcome(yd, data.y, config, mode.mode, mode.covariance, rng);
    Eigen::Index s = 0;
    for (int it = 0; it < config.iterations; ++it) {
      for (auto& m : mediators) m.step(rng);
      outcome.step(rng, it);
      if (!is_saved(config, it)) continue;
      store_mediators(t, s, mediators, q);
      store_outcome(t, s, outcome.theta(), q);
      ++s;
    }
    derive_effects(t, q);
    return t;
  });
  return post;
}

MediationPosterior fit_mediation(const MediationData& data, const MediationConfig& config) {
  return data.family == OutcomeFamily::continuous ? fit_continuous_mediation(data, config)
                                                  : fit_binary_mediation(data, config);
}

MediationPosterior fit_total_effect(const MediationData& data, const MediationConfig& config) {
  data.validate();
  config.validate();
  const Eigen::MatrixXd xd = predictor_design(data);
  check_design_rank(xd, {"intercept", "X"});

  MediationPosterior post;
  post.q = 0;
  post.family = data.family;
  if (data.family == OutcomeFamily::continuous) {
    post.chains = run_chains(config, streams::total_effect, [&](Rng& rng) {
      DrawTable t{{"c", "i1", "prec_y"}, Eigen::MatrixXd::Zero(config.saved_draws(), 3)};
      LinearGibbs reg(xd, data.y, config);
      Eigen::Index s = 0;
      for (int it = 0; it < config.iterations; ++it) {
        reg.step(rng);
        if (!is_saved(config, it)) continue;
        t.values(s, 0) = reg.beta()(1);
        t.values(s, 1) = reg.beta()(0);
        t.values(s, 2) = reg.tau();
        ++s;
      }
      return t;
    });
    return post;
  }

  check_binary_outcome(data);
  const auto mode = logistic_mode(xd, data.y, 1.0 / config.coef_prior_variance);
  if (mode.separated)
    post.warnings.push_back("complete separation detected: the logistic posterior is driven by the prior tails");
  post.chains = run_chains(config, streams::total_effect, [&](Rng& rng) {
    DrawTable t{{"c", "i1"}, Eigen::MatrixXd::Zero(config.saved_draws(), 2)};
    LogisticMetropolis reg(xd, data.y, config, mode.mode, mode.covariance, rng);
    Eigen::Index s = 0;
    for (int it = 0; it < config.iterations; ++it) {
      reg.step(rng, it);
      if (!is_saved(config, it)) continue;
      t.values(s, 0) = reg.theta()(1);
      t.values(s, 1) = reg.theta()(0);
      ++s;
    }
    return t;
  });
  return post;
}

double binary_outcome_loglik(const MediationData& data, double b0, double cp, std::span<const double> b) {
  if (static_cast<int>(b.size()) != data.q()) throw InputError("one b coefficient per mediator is required");
  Eigen::VectorXd coef(2 + data.q());
  coef(0) = b0;
  coef(1) = cp;
  for (int k = 0; k < data.q(); ++k) coef(2 + k) = b[k];
  return kernels::logistic_loglik(outcome_design(data), data.y, coef);
}

ParameterSummary summarize_draws(const std::string& name, std::span<const double> draws, double prob) {
  if (draws.empty()) throw InputError("no draws to summarise for '" + name + "'");
  ParameterSummary s;
  s.parameter = name;
  double sum = 0.0;
  for (double v : draws) sum += v;
  s.estimate = sum / static_cast<double>(draws.size());
  double ss = 0.0;
  for (double v : draws) ss += (v - s.estimate) * (v - s.estimate);
  s.post_sd = draws.size() > 1 ? std::sqrt(ss / static_cast<double>(draws.size() - 1)) : 0.0;
  std::tie(s.hpd_lower, s.hpd_upper) = hpd_interval(draws, prob);
  s.significant = s.hpd_lower > 0.0 || s.hpd_upper < 0.0;
  return s;
}

PosteriorSummary summarize(const MediationPosterior& posterior, double prob) {
  if (posterior.chains.empty() || posterior.chains.front().values.rows() == 0)
    throw InputError("posterior has no draws");
  PosteriorSummary out;
  for (const auto& name : posterior.names()) out.push_back(summarize_draws(name, posterior.pooled(name), prob));
  return out;
}

std::vector<PosteriorSummary> summarize_per_chain(const MediationPosterior& posterior, double prob) {
  std::vector<PosteriorSummary> out;
  for (const auto& chain : posterior.chains) {
    MediationPosterior single;
    single.q = posterior.q;
    single.family = posterior.family;
    single.chains = {chain};
    out.push_back(summarize(single, prob));
  }
  return out;
}

}  // namespace netmed
