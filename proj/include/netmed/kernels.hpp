#pragma once

// Data-parallel inner loops shared by the samplers. Every OpenMP kernel has a
// plain serial twin (suffix _serial) kept as the reference for tests and the
// benchmark. Parallel reductions accumulate fixed per-row or per-block partial
// sums and combine them in index order, so results do not depend on the
// number of threads.

#include "netmed/graph.hpp"

#include <Eigen/Dense>

namespace netmed::kernels {

enum class Link { logit, probit };

// Log Bernoulli likelihood of one dyad given its latent value z.
double dyad_term(Link link, bool edge, double z);
// Edge probability for latent value z.
double inverse_link(Link link, double z);

// Sum over i<j of dyad_term(A_ij, Z_ij).
double dyad_loglik_serial(const AdjacencyMatrix& a, const Eigen::MatrixXd& z, Link link);
double dyad_loglik(const AdjacencyMatrix& a, const Eigen::MatrixXd& z, Link link);

// Sum over i<j of dyad_term(A_ij, Z_ij + shift * D_ij).
double dyad_loglik_shift_serial(const AdjacencyMatrix& a, const Eigen::MatrixXd& z,
                                const Eigen::MatrixXd& d, double shift, Link link);
double dyad_loglik_shift(const AdjacencyMatrix& a, const Eigen::MatrixXd& z,
                         const Eigen::MatrixXd& d, double shift, Link link);

// As above with the rank-one direction D = v v^T.
double dyad_loglik_rank_one_serial(const AdjacencyMatrix& a, const Eigen::MatrixXd& z,
                                   const Eigen::VectorXd& v, double shift, Link link);
double dyad_loglik_rank_one(const AdjacencyMatrix& a, const Eigen::MatrixXd& z,
                            const Eigen::VectorXd& v, double shift, Link link);

// acc += U diag(lambda) U^T
void accumulate_low_rank_serial(const Eigen::MatrixXd& u, const Eigen::VectorXd& lambda,
                                Eigen::MatrixXd& acc);
void accumulate_low_rank(const Eigen::MatrixXd& u, const Eigen::VectorXd& lambda, Eigen::MatrixXd& acc);

struct TriadCounts {
  long triangles = 0;
  long connected_triples = 0;  // two-paths, counted once per centre and leaf pair
};
// The serial version enumerates every node triple directly.
TriadCounts count_triads_serial(const AdjacencyMatrix& a);
TriadCounts count_triads(const AdjacencyMatrix& a);

// sum_i y_i eta_i - log(1 + exp(eta_i)) with eta = design * coef.
double logistic_loglik_serial(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                              const Eigen::VectorXd& coef);
double logistic_loglik(const Eigen::MatrixXd& design, const Eigen::VectorXd& y, const Eigen::VectorXd& coef);

}  // namespace netmed::kernels
