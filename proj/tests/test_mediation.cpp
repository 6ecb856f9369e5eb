#include "doctest.h"
#include "fixtures.hpp"
#include "oracles.hpp"

#include "netmed/diagnostics.hpp"
#include "netmed/error.hpp"
#include "netmed/mediation.hpp"
#include "netmed/sim.hpp"

#include <cmath>
#include <numeric>

using namespace netmed;

namespace {

MediationConfig quick(int iters = 6000, int burn = 1000, int chains = 2) {
  MediationConfig cfg;
  cfg.iterations = iters;
  cfg.burn_in = burn;
  cfg.n_chains = chains;
  cfg.seed = 99;
  return cfg;
}

double mean_of(const MediationPosterior& p, const std::string& name) {
  const auto d = p.pooled(name);
  return std::accumulate(d.begin(), d.end(), 0.0) / static_cast<double>(d.size());
}

double mcse(const MediationPosterior& p, const std::string& name) {
  double ess = 0.0;
  const auto col = p.chains.front().column(name);
  for (const auto& c : p.chains) {
    const auto v = c.values.col(col);
    ess += effective_sample_size(Chain{name, {v.data(), v.data() + v.size()}, 1});
  }
  const auto d = p.pooled(name);
  const double m = std::accumulate(d.begin(), d.end(), 0.0) / d.size();
  double ss = 0.0;
  for (double x : d) ss += (x - m) * (x - m);
  return std::sqrt(ss / (d.size() - 1) / ess);
}

MediationTruth truth(double cp, std::initializer_list<double> a, std::initializer_list<double> b,
                     OutcomeFamily family = OutcomeFamily::continuous) {
  MediationTruth t;
  t.cp = cp;
  t.a = fixture::vec(a);
  t.b = fixture::vec(b);
  t.family = family;
  return t;
}

}  // namespace

TEST_SUITE("mediation") {
  TEST_CASE("parameter names follow the table order") {
    const std::vector<std::string> want{"cp", "a1", "a2", "b1", "b2", "ab1", "ab2", "ab", "total",
                                        "b0", "i3_1", "i3_2", "prec_u1", "prec_u2", "prec_y"};
    CHECK(mediation_parameter_names(2, OutcomeFamily::continuous) == want);
    auto binary = want;
    binary.pop_back();
    CHECK(mediation_parameter_names(2, OutcomeFamily::binary) == binary);
  }

  TEST_CASE("derived effects") {
    const std::vector<double> a{1, 2}, b{3, 4};
    const auto e = derive_effects(a, b, 0.5);
    CHECK(e.ab_k == std::vector<double>{3, 8});
    CHECK(e.ab == 11.0);
    CHECK(e.total == 11.5);
    const std::vector<double> z{0, 0};
    CHECK(derive_effects(z, b, 0.7).ab == 0.0);
    CHECK(derive_effects(z, b, 0.7).total == 0.7);
    const std::vector<double> a1{0.1}, b1{-0.2};
    CHECK(derive_effects(a1, b1, 1.0).ab == doctest::Approx(-0.02));
    CHECK(derive_effects(a1, b1, 1.0).total == doctest::Approx(0.98));
  }

  TEST_CASE("validation") {
    auto d = gen_mediation_data(50, truth(0.5, {1}, {1}), 1);
    MediationData bad = d;
    bad.x.setConstant(1.0);
    CHECK_THROWS_WITH_AS(fit_continuous_mediation(bad, quick()), doctest::Contains("X"), InputError);
    CHECK_THROWS_AS(fit_total_effect(bad, quick()), InputError);
    bad = d;
    bad.m.col(0) = bad.x;
    CHECK_THROWS_WITH_AS(fit_continuous_mediation(bad, quick()), doctest::Contains("U1"), InputError);
    bad = d;
    bad.m = Eigen::MatrixXd::Zero(50, 0);
    CHECK_THROWS_AS(fit_continuous_mediation(bad, quick()), InputError);
    bad = d;
    bad.y(3) = std::nan("");
    CHECK_THROWS_AS(fit_continuous_mediation(bad, quick()), InputError);
    auto tiny = gen_mediation_data(4, truth(0.5, {1, 1}, {1, 1}), 1);
    CHECK_THROWS_AS(fit_continuous_mediation(tiny, quick()), InputError);

    auto cfg = quick();
    cfg.burn_in = cfg.iterations;
    CHECK_THROWS_AS(cfg.validate(), InputError);
    cfg = quick();
    cfg.n_chains = 0;
    CHECK_THROWS_AS(cfg.validate(), InputError);

    auto b = gen_mediation_data(100, truth(0.5, {1}, {1}, OutcomeFamily::binary), 2);
    b.y.setZero();
    CHECK_THROWS_AS(fit_binary_mediation(b, quick()), InputError);
    b.y.setOnes();
    CHECK_THROWS_AS(fit_binary_mediation(b, quick()), InputError);
    b.y(0) = 0.5;
    CHECK_THROWS_AS(fit_binary_mediation(b, quick()), InputError);
  }

  TEST_CASE("continuous recovery with two mediators") {
    const auto d = gen_mediation_data(500, truth(0.5, {1, -1}, {0.3, 0.2}), 3);
    const auto post = fit_continuous_mediation(d, quick(10000, 2000, 3));
    CHECK(std::abs(mean_of(post, "cp") - 0.5) < 0.15);
    CHECK(std::abs(mean_of(post, "a1") - 1.0) < 0.15);
    CHECK(std::abs(mean_of(post, "a2") + 1.0) < 0.15);
    CHECK(std::abs(mean_of(post, "b1") - 0.3) < 0.15);
    CHECK(std::abs(mean_of(post, "b2") - 0.2) < 0.15);
    CHECK(post.chains.size() == 3);
    CHECK(post.chains[0].values.rows() == 8000);
  }

  TEST_CASE("Y equal to X") {
    auto d = gen_mediation_data(200, truth(0.0, {0}, {0}), 4);
    d.y = d.x;
    const auto post = fit_continuous_mediation(d, quick());
    CHECK(std::abs(mean_of(post, "cp") - 1.0) < 0.05);
    CHECK(std::abs(mean_of(post, "ab")) < 0.05);
  }

  TEST_CASE("ab matches the OLS difference c - c'") {
    const auto d = gen_mediation_data(500, truth(0.3, {0.6}, {0.5}), 5);
    const auto post = fit_continuous_mediation(d, quick(10000, 2000, 3));
    Eigen::MatrixXd dx(d.n(), 2), dxm(d.n(), 3);
    dx << Eigen::VectorXd::Ones(d.n()), d.x;
    dxm << Eigen::VectorXd::Ones(d.n()), d.x, d.m;
    const double diff = oracle::ols(dx, d.y)(1) - oracle::ols(dxm, d.y)(1);
    CHECK(std::abs(mean_of(post, "ab") - diff) < 0.02);
  }

  TEST_CASE("cp marginal matches the normal-gamma posterior") {
    const auto d = gen_mediation_data(50, truth(0.4, {0.8}, {0.5}), 6);
    auto cfg = quick(20000, 2000, 3);
    const auto post = fit_continuous_mediation(d, cfg);
    Eigen::MatrixXd design(d.n(), 3);
    design << Eigen::VectorXd::Ones(d.n()), d.x, d.m;
    const auto [mean, sd] = oracle::normal_gamma_marginal(design, d.y, 1, cfg.coef_prior_variance,
                                                          cfg.precision_shape, cfg.precision_rate);
    CHECK(std::abs(mean_of(post, "cp") - mean) < 3 * mcse(post, "cp"));
    const auto s = summarize_draws("cp", post.pooled("cp"), 0.95);
    CHECK(std::abs(s.post_sd - sd) / sd < 0.05);
  }

  TEST_CASE("shifting X changes only intercepts") {
    auto d = gen_mediation_data(300, truth(0.5, {0.7}, {0.4}), 7);
    const auto p1 = fit_continuous_mediation(d, quick());
    d.x.array() += 5.0;
    const auto p2 = fit_continuous_mediation(d, quick());
    for (const auto* name : {"cp", "a1", "b1", "ab"}) {
      INFO(name);
      CHECK(std::abs(mean_of(p1, name) - mean_of(p2, name)) < 3 * std::hypot(mcse(p1, name), mcse(p2, name)));
    }
  }

  TEST_CASE("chains agree") {
    const auto d = gen_mediation_data(200, truth(0.5, {0.7}, {0.4}), 8);
    const auto post = fit_continuous_mediation(d, quick(8000, 1000, 3));
    const auto per = summarize_per_chain(post, 0.95);
    REQUIRE(per.size() == 3);
    const double se = mcse(post, "ab") * std::sqrt(3.0);
    const auto ab = [&](int c) {
      for (const auto& r : per[c])
        if (r.parameter == "ab") return r.estimate;
      return 0.0;
    };
    for (int c = 1; c < 3; ++c) CHECK(std::abs(ab(c) - ab(0)) < 3 * std::sqrt(2.0) * se);
  }

  TEST_CASE("derived identities hold exactly in every draw") {
    const auto d = gen_mediation_data(100, truth(0.5, {0.7, 0.2, -0.4}, {0.4, 1.0, 0.3}), 9);
    const auto post = fit_continuous_mediation(d, quick(2000, 500, 2));
    for (const auto& c : post.chains)
      for (Eigen::Index s = 0; s < c.values.rows(); ++s) {
        double ab = 0.0;
        for (int k = 1; k <= 3; ++k) {
          const double term = c.values(s, c.column("a" + std::to_string(k))) * c.values(s, c.column("b" + std::to_string(k)));
          CHECK(c.values(s, c.column("ab" + std::to_string(k))) == term);
          ab += term;
        }
        CHECK(c.values(s, c.column("ab")) == ab);
        CHECK(c.values(s, c.column("total")) == c.values(s, c.column("cp")) + ab);
      }
  }

  TEST_CASE("same seed gives identical draws") {
    const auto d = gen_mediation_data(100, truth(0.5, {0.7}, {0.4}, OutcomeFamily::binary), 10);
    const auto p1 = fit_binary_mediation(d, quick(3000, 500, 2));
    const auto p2 = fit_binary_mediation(d, quick(3000, 500, 2));
    CHECK(p1.chains[0].values == p2.chains[0].values);
    CHECK(p1.chains[1].values == p2.chains[1].values);
    CHECK_FALSE(p1.chains[0].values == p1.chains[1].values);
  }

  TEST_CASE("binary recovery") {
    auto t = truth(1.0, {0.5}, {2.0}, OutcomeFamily::binary);
    t.outcome_intercept = -1.0;
    const auto d = gen_mediation_data(1000, t, 11);
    const auto post = fit_binary_mediation(d, quick(10000, 2000, 3));
    CHECK(std::abs(mean_of(post, "b0") + 1.0) < 0.3);
    CHECK(std::abs(mean_of(post, "cp") - 1.0) < 0.3);
    CHECK(std::abs(mean_of(post, "a1") - 0.5) < 0.3);
    CHECK(std::abs(mean_of(post, "b1") - 2.0) < 0.3);
    CHECK(post.warnings.empty());
  }

  TEST_CASE("binary null data") {
    const auto d = gen_mediation_data(500, truth(0.0, {0}, {0}, OutcomeFamily::binary), 12);
    const auto s = summarize(fit_binary_mediation(d, quick()), 0.95);
    for (const auto& r : s)
      if (r.parameter == "ab") CHECK_FALSE(r.significant);
  }

  TEST_CASE("logistic likelihood at zero coefficients") {
    const auto d = gen_mediation_data(80, truth(0.0, {0, 0}, {0, 0}, OutcomeFamily::binary), 13);
    const std::vector<double> b{0.0, 0.0};
    CHECK(binary_outcome_loglik(d, 0.0, 0.0, b) == doctest::Approx(80 * std::log(0.5)));
  }

  TEST_CASE("complete separation is flagged") {
    auto d = gen_mediation_data(60, truth(0.0, {0.3}, {0}, OutcomeFamily::binary), 14);
    d.y = d.x;
    const auto post = fit_binary_mediation(d, quick(3000, 1000, 1));
    CHECK_FALSE(post.warnings.empty());
  }

  TEST_CASE("total effect cross-check") {
    const auto d = gen_mediation_data(400, truth(0.2, {0.4}, {0.5}), 15);
    const auto post = fit_continuous_mediation(d, quick());
    const auto tot = fit_total_effect(d, quick());
    CHECK(tot.names() == std::vector<std::string>{"c", "i1", "prec_y"});
    CHECK(std::abs(mean_of(tot, "c") - mean_of(post, "total")) < 0.1);

    const auto null = gen_mediation_data(300, truth(0.0, {0}, {0}), 16);
    const auto s = summarize(fit_total_effect(null, quick()), 0.95);
    CHECK(s[0].parameter == "c");
    CHECK(s[0].hpd_lower <= 0.0);
    CHECK(s[0].hpd_upper >= 0.0);
  }

  TEST_CASE("summaries") {
    const std::vector<double> ones{1, 1, 1};
    const auto s = summarize_draws("p", ones, 0.95);
    CHECK(s.estimate == 1.0);
    CHECK(s.post_sd == 0.0);
    CHECK(s.hpd_lower == 1.0);
    CHECK(s.hpd_upper == 1.0);
    CHECK(s.significant);
    CHECK_THROWS_AS(summarize_draws("p", std::vector<double>{}, 0.95), InputError);

    int close = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng(seed);
      std::vector<double> z;
      for (int i = 0; i < 10000; ++i) z.push_back(rng.normal());
      const auto n = summarize_draws("z", z, 0.95);
      CHECK(std::abs(n.estimate) < 0.05);
      CHECK_FALSE(n.significant);
      close += std::abs(n.hpd_lower + 1.96) < 0.1 && std::abs(n.hpd_upper - 1.96) < 0.1;
    }
    CHECK(close >= 12);

    std::vector<double> pos{0.5, 1.0, 2.0, 3.0};
    CHECK(summarize_draws("p", pos, 0.95).significant);
  }
}
