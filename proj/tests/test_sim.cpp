#include "doctest.h"
#include "oracles.hpp"

#include "netmed/error.hpp"
#include "netmed/graph.hpp"
#include "netmed/sim.hpp"

#include <cmath>

using namespace netmed;

namespace {

double block_density(const AdjacencyMatrix& a, const std::vector<int>& g, bool within) {
  double edges = 0, pairs = 0;
  for (int i = 0; i < a.n(); ++i)
    for (int j = i + 1; j < a.n(); ++j)
      if ((g[i] == g[j]) == within) {
        pairs += 1;
        edges += a(i, j);
      }
  return edges / pairs;
}

}  // namespace

TEST_SUITE("sim") {
  TEST_CASE("erdos-renyi") {
    CHECK(gen_erdos_renyi(20, 0.0, 1).edge_count() == 0);
    CHECK(density(gen_erdos_renyi(20, 1.0, 1)) == 1.0);
    CHECK(std::abs(density(gen_erdos_renyi(1000, 0.1, 2)) - 0.1) < 0.01);
    CHECK_THROWS_AS(gen_erdos_renyi(10, 1.5, 1), InputError);
    CHECK(gen_erdos_renyi(30, 0.3, 4) == gen_erdos_renyi(30, 0.3, 4));
    CHECK_FALSE(gen_erdos_renyi(30, 0.3, 4) == gen_erdos_renyi(30, 0.3, 5));
  }

  TEST_CASE("latent class") {
    std::vector<int> g;
    for (int i = 0; i < 10; ++i) g.push_back(i < 5 ? 0 : 1);
    Eigen::MatrixXd p(2, 2);
    p << 1, 0, 0, 1;
    const auto cliques = gen_latent_class(g, p, 1);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j)
        if (i != j) CHECK(cliques(i, j) == (g[i] == g[j]));
    Eigen::MatrixXd asym(2, 2);
    asym << 0.5, 0.1, 0.2, 0.5;
    CHECK_THROWS_AS(gen_latent_class(g, asym, 1), InputError);

    std::vector<int> g60;
    for (int i = 0; i < 60; ++i) g60.push_back(i < 30 ? 0 : 1);
    Eigen::MatrixXd blocks(2, 2);
    blocks << 0.5, 0.05, 0.05, 0.5;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto a = gen_latent_class(g60, blocks, s);
      CHECK(block_density(a, g60, true) > block_density(a, g60, false));
    }
    Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(2, 2, 0.3);
    double total = 0;
    for (std::uint64_t s = 0; s < 20; ++s) total += density(gen_latent_class(g60, flat, s));
    CHECK(std::abs(total / 20 - 0.3) < 0.01);
  }

  TEST_CASE("latent distance") {
    const Eigen::MatrixXd same = Eigen::MatrixXd::Zero(200, 2);
    CHECK(std::abs(density(gen_latent_distance(same, 0.0, 3)) - 0.5) < 0.02);
    CHECK(gen_latent_distance(same, -50.0, 3).edge_count() == 0);
    Eigen::MatrixXd pos(40, 2);
    std::vector<int> g;
    for (int i = 0; i < 40; ++i) {
      pos(i, 0) = i < 20 ? -10.0 : 10.0;
      pos(i, 1) = 0.01 * i;
      g.push_back(i < 20);
    }
    const auto a = gen_latent_distance(pos, 2.0, 4);
    CHECK(block_density(a, g, true) > 0.7);
    CHECK(block_density(a, g, false) < 0.01);
  }

  TEST_CASE("eigenmodel generator") {
    const Eigen::MatrixXd u0 = Eigen::MatrixXd::Zero(300, 2);
    const Eigen::VectorXd l2 = Eigen::VectorXd::Ones(2);
    CHECK(std::abs(density(gen_eigenmodel(u0, l2, {}, 1)) - 0.5) < 0.02);

    Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(20, 20);
    ones.diagonal().setZero();
    std::vector<DyadicTerm> terms{{50.0, DyadicCovariateMatrix(ones)}};
    const auto full = gen_eigenmodel(Eigen::MatrixXd::Zero(20, 1), Eigen::VectorXd::Zero(1), terms, 1);
    CHECK(density(full) == 1.0);

    CHECK_THROWS_AS(gen_eigenmodel(u0, Eigen::VectorXd::Ones(3), {}, 1), InputError);
    CHECK_THROWS_AS(gen_eigenmodel(Eigen::MatrixXd::Zero(10, 1), Eigen::VectorXd::Zero(1), terms, 1), InputError);

    // Rank-one structure shows up in the adjacency spectrum.
    const int n = 100;
    Eigen::MatrixXd u(n, 1);
    for (int i = 0; i < n; ++i) u(i, 0) = i < n / 2 ? 1.0 : -1.0;
    u(0, 0) = 1.5;
    Eigen::VectorXd lambda(1);
    lambda << 4.0;
    const auto a = gen_eigenmodel(u, lambda, {}, 7);
    const auto e = symmetric_eigen_descending(a.to_dense());
    std::vector<double> top, truth;
    for (int i = 0; i < n; ++i) {
      top.push_back(e.vectors(i, 0));
      truth.push_back(u(i, 0));
    }
    CHECK(std::abs(oracle::pearson(top, truth)) > 0.8);
  }

  TEST_CASE("mediation data") {
    MediationTruth zero;
    zero.a = Eigen::VectorXd::Zero(1);
    zero.b = Eigen::VectorXd::Zero(1);
    zero.cp = 0.0;
    const auto d = gen_mediation_data(1000, zero, 2);
    std::vector<double> x(d.x.data(), d.x.data() + d.n()), y(d.y.data(), d.y.data() + d.n());
    CHECK(std::abs(oracle::pearson(x, y)) < 0.1);

    MediationTruth ident;
    ident.a = Eigen::VectorXd::Ones(1);
    ident.b = Eigen::VectorXd::Ones(1);
    ident.cp = 0.0;
    ident.mediator_noise_sd = 0.1;
    ident.outcome_noise_sd = 1e-3;
    const auto e = gen_mediation_data(500, ident, 3);
    Eigen::MatrixXd dx(e.n(), 2), dxm(e.n(), 3);
    dx << Eigen::VectorXd::Ones(e.n()), e.x;
    dxm << Eigen::VectorXd::Ones(e.n()), e.x, e.m;
    const double c = oracle::ols(dx, e.y)(1), cprime = oracle::ols(dxm, e.y)(1);
    CHECK(std::abs(c - cprime - 1.0) < 0.05);

    MediationTruth binary = zero;
    binary.family = OutcomeFamily::binary;
    const auto b = gen_mediation_data(1000, binary, 4);
    CHECK(std::abs(b.y.mean() - 0.5) < 0.05);
    for (int i = 0; i < b.n(); ++i) CHECK((b.y(i) == 0.0 || b.y(i) == 1.0));

    MediationTruth bad = zero;
    bad.b = Eigen::VectorXd::Zero(2);
    CHECK_THROWS_AS(gen_mediation_data(10, bad, 1), InputError);
  }
}
