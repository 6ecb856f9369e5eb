#include "netmed/kernels.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace netmed::kernels {

namespace {

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

// log Phi(x), switching to the Mills-ratio asymptote where erfc underflows.
double log_normal_cdf(double x) {
  if (x > -30.0) return std::log(0.5 * std::erfc(-x / std::numbers::sqrt2));
  const double x2 = x * x;
  return -0.5 * x2 - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log1p(-1.0 / x2);
}

template <class Shift>
double row_loglik(const AdjacencyMatrix& a, const Eigen::MatrixXd& z, int i, Link link, Shift shift) {
  const auto* row = a.row(i);
  double s = 0.0;
  for (int j = i + 1; j < a.n(); ++j) s += dyad_term(link, row[j] != 0, z(i, j) + shift(i, j));
  return s;
}

template <class Shift>
double loglik_serial(const AdjacencyMatrix& a, const Eigen::MatrixXd& z, Link link, Shift shift) {
  double s = 0.0;
  for (int i = 0; i < a.n(); ++i)
    for (int j = i + 1; j < a.n(); ++j) s += dyad_term(link, a(i, j), z(i, j) + shift(i, j));
  return s;
}

template <class Shift>
double loglik_parallel(const AdjacencyMatrix& a, const Eigen::MatrixXd& z, Link link, Shift shift) {
  const int n = a.n();
  std::vector<double> partial(n, 0.0);
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < n; ++i) partial[i] = row_loglik(a, z, i, link, shift);
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

constexpr auto no_shift = [](int, int) { return 0.0; };

}  // namespace

double dyad_term(Link link, bool edge, double z) {
  if (link == Link::logit) return (edge ? z : 0.0) - softplus(z);
  return log_normal_cdf(edge ? z : -z);
}

double inverse_link(Link link, double z) {
  if (link == Link::logit) return 1.0 / (1.0 + std::exp(-z));
  return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double dyad_loglik_serial(const AdjacencyMatrix& a, const Eigen::MatrixXd& z, Link link) {
  return loglik_serial(a, z, link, no_shift);
}

double dyad_loglik(const AdjacencyMatrix& a, const Eigen::MatrixXd& z, Link link) {
  return loglik_parallel(a, z, link, no_shift);
}

double dyad_loglik_shift_serial(const AdjacencyMatrix& a, const Eigen::MatrixXd& z,
                                const Eigen::MatrixXd& d, double shift, Link link) {
  return loglik_serial(a, z, link, [&](int i, int j) { return shift * d(i, j); });
}

double dyad_loglik_shift(const AdjacencyMatrix& a, const Eigen::MatrixXd& z, const Eigen::MatrixXd& d,
                         double shift, Link link) {
  return loglik_parallel(a, z, link, [&](int i, int j) { return shift * d(i, j); });
}

double dyad_loglik_rank_one_serial(const AdjacencyMatrix& a, const Eigen::MatrixXd& z,
                                   const Eigen::VectorXd& v, double shift, Link link) {
  return loglik_serial(a, z, link, [&](int i, int j) { return shift * v(i) * v(j); });
}

double dyad_loglik_rank_one(const AdjacencyMatrix& a, const Eigen::MatrixXd& z, const Eigen::VectorXd& v,
                            double shift, Link link) {
  return loglik_parallel(a, z, link, [&](int i, int j) { return shift * v(i) * v(j); });
}

void accumulate_low_rank_serial(const Eigen::MatrixXd& u, const Eigen::VectorXd& lambda,
                                Eigen::MatrixXd& acc) {
  acc.noalias() += u * lambda.asDiagonal() * u.transpose();
}

void accumulate_low_rank(const Eigen::MatrixXd& u, const Eigen::VectorXd& lambda, Eigen::MatrixXd& acc) {
  const auto n = u.rows();
  const auto q = u.cols();
  // Column-major: each column j is owned by one thread.
#pragma omp parallel for schedule(static)
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = 0; k < q; ++k) {
      const double w = lambda(k) * u(j, k);
      for (Eigen::Index i = 0; i < n; ++i) acc(i, j) += u(i, k) * w;
    }
  }
}

TriadCounts count_triads_serial(const AdjacencyMatrix& a) {
  const int n = a.n();
  TriadCounts c;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const int edges = a(i, j) + a(i, k) + a(j, k);
        if (edges == 3) {
          ++c.triangles;
          c.connected_triples += 3;
        } else if (edges == 2) {
          ++c.connected_triples;
        }
      }
  return c;
}

TriadCounts count_triads(const AdjacencyMatrix& a) {
  const int n = a.n();
  long triangles = 0;
  long triples = 0;
#pragma omp parallel for schedule(dynamic, 8) reduction(+ : triangles, triples)
  for (int v = 0; v < n; ++v) {
    const auto* row = a.row(v);
    long degree = 0;
    for (int w = 0; w < n; ++w) degree += row[w];
    triples += degree * (degree - 1) / 2;
    // Triangles whose lowest node is v.
    for (int j = v + 1; j < n; ++j) {
      if (!row[j]) continue;
      const auto* rj = a.row(j);
      for (int k = j + 1; k < n; ++k) triangles += row[k] & rj[k];
    }
  }
  return {triangles, triples};
}

double logistic_loglik_serial(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& coef) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < design.rows(); ++i) {
    const double eta = design.row(i).dot(coef);
    s += y(i) * eta - softplus(eta);
  }
  return s;
}

double logistic_loglik(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, const Eigen::VectorXd& coef) {
  constexpr Eigen::Index block = 256;
  const Eigen::Index n = design.rows();
  const Eigen::Index blocks = (n + block - 1) / block;
  std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index lo = b * block;
    const Eigen::Index hi = std::min(n, lo + block);
    double s = 0.0;
    for (Eigen::Index i = lo; i < hi; ++i) {
      const double eta = design.row(i).dot(coef);
      s += y(i) * eta - softplus(eta);
    }
    partial[b] = s;
  }
  double s = 0.0;
  for (double p : partial) s += p;
  return s;
}

}  // namespace netmed::kernels
