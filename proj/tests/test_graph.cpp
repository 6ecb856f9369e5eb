#include "doctest.h"
#include "oracles.hpp"

#include "netmed/error.hpp"
#include "netmed/graph.hpp"
#include "netmed/rng.hpp"
#include "netmed/sim.hpp"

using namespace netmed;

namespace {

AdjacencyMatrix from_edges(int n, std::vector<std::pair<int, int>> edges) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  std::vector<std::pair<std::string, std::string>> named;
  for (auto [a, b] : edges) named.emplace_back(std::to_string(a), std::to_string(b));
  return from_edge_list(named, ids);
}

AdjacencyMatrix k3() { return from_edges(3, {{0, 1}, {1, 2}, {0, 2}}); }

}  // namespace

TEST_SUITE("graph") {
  TEST_CASE("edge list construction") {
    const auto a = from_edge_list({{"a", "b"}}, {"a", "b", "c"});
    CHECK(a(0, 1));
    CHECK(a(1, 0));
    CHECK(a.edge_count() == 1);
    CHECK(from_edge_list({}, {"a", "b"}).edge_count() == 0);
    CHECK(k3().edge_count() == 3);
    CHECK_THROWS_AS(from_edge_list({{"a", "z"}}, {"a", "b"}), InputError);
    CHECK_THROWS_AS(from_edge_list({{"a", "a"}}, {"a", "b"}), InputError);
  }

  TEST_CASE("adjacency invariants") {
    CHECK_THROWS_AS(AdjacencyMatrix(2, {0, 1, 0, 0}), InputError);
    CHECK_THROWS_AS(AdjacencyMatrix(2, {1, 1, 1, 0}), InputError);
    CHECK_THROWS_AS(AdjacencyMatrix(2, {0, 2, 2, 0}), InputError);
    CHECK_THROWS_AS(AdjacencyMatrix(1, {0}), InputError);
    Eigen::MatrixXd m(2, 2);
    m << 0, 0.5, 0.5, 0;
    CHECK_THROWS_AS(AdjacencyMatrix::from_dense(m), InputError);
  }

  TEST_CASE("density") {
    CHECK(density(k3()) == 1.0);
    CHECK(density(AdjacencyMatrix::empty(5)) == 0.0);
    CHECK(density(from_edges(4, {{0, 1}, {2, 3}})) == doctest::Approx(2.0 / 6.0));
  }

  TEST_CASE("diameter") {
    CHECK(diameter(k3()).value == 1);
    CHECK_FALSE(diameter(k3()).disconnected);
    CHECK(diameter(from_edges(4, {{0, 1}, {1, 2}, {2, 3}})).value == 3);
    const auto two = diameter(from_edges(4, {{0, 1}, {2, 3}}));
    CHECK(two.value == 1);
    CHECK(two.disconnected);
    const auto none = diameter(AdjacencyMatrix::empty(4));
    CHECK(none.value == 0);
    CHECK(none.disconnected);
    // The larger component wins even when it appears second.
    const auto big = diameter(from_edges(6, {{0, 1}, {2, 3}, {3, 4}, {4, 5}}));
    CHECK(big.value == 3);
  }

  TEST_CASE("transitivity") {
    CHECK(transitivity(k3()) == 1.0);
    CHECK(transitivity(from_edges(4, {{0, 1}, {0, 2}, {0, 3}})) == 0.0);
    // K4 minus an edge: 2 triangles over 8 two-paths.
    const auto k4e = from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}});
    CHECK(transitivity(k4e) == doctest::Approx(0.75));
    CHECK(transitivity(k4e) == oracle::graph_stats(k4e).transitivity);
    CHECK(transitivity(AdjacencyMatrix::empty(3)) == 0.0);
  }

  TEST_CASE("uniform homophily") {
    const auto h = uniform_homophily({"F", "F", "M"});
    CHECK(h(0, 1) == 1.0);
    CHECK(h(0, 2) == 0.0);
    CHECK(h(1, 2) == 0.0);
    CHECK(h(0, 0) == 0.0);
    const auto same = uniform_homophily({"x", "x", "x", "x"});
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(same(i, j) == (i == j ? 0.0 : 1.0));
    const auto alt = uniform_homophily({"a", "b", "a", "b"});
    int ones = 0;
    for (int i = 0; i < 4; ++i)
      for (int j = i + 1; j < 4; ++j) ones += alt(i, j) == 1.0;
    CHECK(ones == 2);
    CHECK(alt(0, 2) == 1.0);
    CHECK(alt(1, 3) == 1.0);
    CHECK_THROWS_AS(uniform_homophily({"a", "NA"}), InputError);
    CHECK_THROWS_AS(uniform_homophily({"a", ""}), InputError);
  }

  TEST_CASE("dyadic covariate invariants") {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(DyadicCovariateMatrix{m}, InputError);
    m(1, 0) = 1.0;
    m(2, 2) = 1.0;
    CHECK_THROWS_AS(DyadicCovariateMatrix{m}, InputError);
  }

  TEST_CASE("adjacency spectrum") {
    const auto k2 = adjacency_spectrum(from_edges(2, {{0, 1}}));
    CHECK(k2[0] == doctest::Approx(1.0));
    CHECK(k2[1] == doctest::Approx(-1.0));
    for (double v : adjacency_spectrum(AdjacencyMatrix::empty(3))) CHECK(v == doctest::Approx(0.0));
    const auto s = adjacency_spectrum(k3());
    CHECK(s[0] == doctest::Approx(2.0));
    CHECK(s[1] == doctest::Approx(-1.0));
    CHECK(s[2] == doctest::Approx(-1.0));
  }

  TEST_CASE("statistics match the brute-force oracle on random graphs") {
    Rng rng(11);
    for (int rep = 0; rep < 50; ++rep) {
      const int n = 2 + static_cast<int>(rng.uniform() * 10);
      const auto a = gen_erdos_renyi(n, rng.uniform(), 100 + rep);
      const auto want = oracle::graph_stats(a);
      const auto d = diameter(a);
      CHECK(density(a) == want.density);
      CHECK(d.value == want.diameter);
      CHECK(d.disconnected == want.disconnected);
      CHECK(transitivity(a) == want.transitivity);
    }
  }

  TEST_CASE("statistics are invariant under relabelling") {
    const auto a = gen_erdos_renyi(12, 0.3, 5);
    std::vector<int> perm{3, 7, 0, 11, 5, 1, 9, 2, 10, 4, 8, 6};
    const auto b = a.permuted(perm);
    CHECK(density(a) == density(b));
    CHECK(diameter(a).value == diameter(b).value);
    CHECK(transitivity(a) == transitivity(b));
    const auto sa = adjacency_spectrum(a), sb = adjacency_spectrum(b);
    for (std::size_t k = 0; k < sa.size(); ++k) CHECK(sa[k] == doctest::Approx(sb[k]).epsilon(1e-10));
  }

  TEST_CASE("symmetric eigen sorts descending") {
    Eigen::MatrixXd m(3, 3);
    m << 1, 0, 0, 0, 3, 0, 0, 0, 2;
    const auto e = symmetric_eigen_descending(m);
    CHECK(e.values(0) == doctest::Approx(3.0));
    CHECK(e.values(1) == doctest::Approx(2.0));
    CHECK(e.values(2) == doctest::Approx(1.0));
    CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));
  }
}
