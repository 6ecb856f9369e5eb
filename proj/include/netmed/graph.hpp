#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace netmed {

// Undirected binary sociomatrix: symmetric, zero diagonal, n >= 2.
class AdjacencyMatrix {
 public:
  // Validates the invariants; throws InputError on violation.
  AdjacencyMatrix(int n, std::vector<std::uint8_t> entries);
  static AdjacencyMatrix empty(int n);
  // Accepts a dense matrix whose entries are exactly 0 or 1.
  static AdjacencyMatrix from_dense(const Eigen::MatrixXd& m);

  int n() const { return n_; }
  bool operator()(int i, int j) const { return entries_[static_cast<std::size_t>(i) * n_ + j] != 0; }
  const std::uint8_t* row(int i) const { return entries_.data() + static_cast<std::size_t>(i) * n_; }
  const std::vector<std::uint8_t>& entries() const { return entries_; }

  long edge_count() const;
  Eigen::MatrixXd to_dense() const;
  // Simultaneous row/column relabelling: result(perm[i], perm[j]) = (*this)(i, j).
  AdjacencyMatrix permuted(const std::vector<int>& perm) const;

  friend bool operator==(const AdjacencyMatrix&, const AdjacencyMatrix&) = default;

 private:
  int n_;
  std::vector<std::uint8_t> entries_;
};

// Symmetric real dyadic covariate with zero diagonal.
class DyadicCovariateMatrix {
 public:
  explicit DyadicCovariateMatrix(Eigen::MatrixXd values);

  int n() const { return static_cast<int>(values_.rows()); }
  double operator()(int i, int j) const { return values_(i, j); }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  Eigen::MatrixXd values_;
};

struct NodalColumn {
  enum class Kind { continuous, categorical };
  std::string name;
  Kind kind = Kind::categorical;
  std::vector<std::string> labels;  // raw text for every column
  std::vector<double> values;       // parsed values for continuous columns
};

// Per-node attributes keyed by node id.
struct NodalCovariates {
  std::vector<std::string> ids;
  std::vector<NodalColumn> columns;

  const NodalColumn& column(const std::string& name) const;
  void validate() const;
};

AdjacencyMatrix from_edge_list(const std::vector<std::pair<std::string, std::string>>& edges,
                               const std::vector<std::string>& node_ids);

double density(const AdjacencyMatrix& a);

struct Diameter {
  int value = 0;
  // Set when the graph has more than one component; value then refers to the
  // largest component (ties: the one holding the lowest node index).
  bool disconnected = false;
};
Diameter diameter(const AdjacencyMatrix& a);

// 3 * triangles / connected triples; 0 without any connected triple.
double transitivity(const AdjacencyMatrix& a);

// Entry (i, j) is 1 when nodes i != j share a category. Empty strings and "NA"
// count as missing and are rejected.
DyadicCovariateMatrix uniform_homophily(const std::vector<std::string>& categories);

// All eigenvalues of the adjacency matrix, descending.
std::vector<double> adjacency_spectrum(const AdjacencyMatrix& a);

// Eigenpairs of a symmetric matrix sorted by eigenvalue descending; ties keep
// the solver's original index order.
struct SymmetricEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};
SymmetricEigen symmetric_eigen_descending(const Eigen::MatrixXd& m);

}  // namespace netmed
