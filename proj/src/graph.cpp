#include "netmed/graph.hpp"

#include "netmed/error.hpp"
#include "netmed/kernels.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>

namespace netmed {

AdjacencyMatrix::AdjacencyMatrix(int n, std::vector<std::uint8_t> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n_ < 2) throw InputError("adjacency matrix needs at least 2 nodes");
  if (entries_.size() != static_cast<std::size_t>(n_) * n_)
    throw InputError("adjacency entries do not form an n x n matrix");
  for (int i = 0; i < n_; ++i) {
    if ((*this)(i, i)) throw InputError("adjacency matrix has a self-loop at node " + std::to_string(i));
    for (int j = 0; j < n_; ++j) {
      const auto v = entries_[static_cast<std::size_t>(i) * n_ + j];
      if (v > 1) throw InputError("adjacency entries must be 0 or 1");
      if (v != entries_[static_cast<std::size_t>(j) * n_ + i])
        throw InputError("adjacency matrix is not symmetric at (" + std::to_string(i) + "," +
                         std::to_string(j) + ")");
    }
  }
}

AdjacencyMatrix AdjacencyMatrix::empty(int n) {
  return AdjacencyMatrix(n, std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(n, 0)) * std::max(n, 0), 0));
}

AdjacencyMatrix AdjacencyMatrix::from_dense(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw InputError("adjacency matrix must be square");
  const int n = static_cast<int>(m.rows());
  std::vector<std::uint8_t> entries(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double v = m(i, j);
      if (v != 0.0 && v != 1.0) throw InputError("adjacency entries must be 0 or 1");
      entries[static_cast<std::size_t>(i) * n + j] = v == 1.0 ? 1 : 0;
    }
  return AdjacencyMatrix(n, std::move(entries));
}

long AdjacencyMatrix::edge_count() const {
  long count = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) count += (*this)(i, j);
  return count;
}

Eigen::MatrixXd AdjacencyMatrix::to_dense() const {
  Eigen::MatrixXd m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = (*this)(i, j) ? 1.0 : 0.0;
  return m;
}

AdjacencyMatrix AdjacencyMatrix::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != n_) throw InputError("permutation length does not match n");
  std::vector<std::uint8_t> out(entries_.size());
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      out[static_cast<std::size_t>(perm[i]) * n_ + perm[j]] = entries_[static_cast<std::size_t>(i) * n_ + j];
  return AdjacencyMatrix(n_, std::move(out));
}

DyadicCovariateMatrix::DyadicCovariateMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols()) throw InputError("dyadic covariate must be square");
  const auto n = values_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (values_(i, i) != 0.0) throw InputError("dyadic covariate must have a zero diagonal");
    for (Eigen::Index j = i + 1; j < n; ++j)
      if (values_(i, j) != values_(j, i)) throw InputError("dyadic covariate must be symmetric");
  }
}

const NodalColumn& NodalCovariates::column(const std::string& name) const {
  for (const auto& c : columns)
    if (c.name == name) return c;
  throw InputError("no covariate column named '" + name + "'");
}

void NodalCovariates::validate() const {
  std::set<std::string> names;
  for (const auto& c : columns) {
    if (!names.insert(c.name).second) throw InputError("duplicate covariate column '" + c.name + "'");
    if (c.labels.size() != ids.size()) throw InputError("column '" + c.name + "' has the wrong length");
    if (c.kind == NodalColumn::Kind::continuous && c.values.size() != ids.size())
      throw InputError("column '" + c.name + "' has the wrong length");
  }
}

AdjacencyMatrix from_edge_list(const std::vector<std::pair<std::string, std::string>>& edges,
                               const std::vector<std::string>& node_ids) {
  std::map<std::string, int> index;
  for (std::size_t i = 0; i < node_ids.size(); ++i)
    if (!index.emplace(node_ids[i], static_cast<int>(i)).second)
      throw InputError("duplicate node id '" + node_ids[i] + "'");
  const int n = static_cast<int>(node_ids.size());
  if (n < 2) throw InputError("adjacency matrix needs at least 2 nodes");
  std::vector<std::uint8_t> entries(static_cast<std::size_t>(n) * n, 0);
  auto lookup = [&](const std::string& id) {
    auto it = index.find(id);
    if (it == index.end()) throw InputError("unknown node id '" + id + "'");
    return it->second;
  };
  for (const auto& [from, to] : edges) {
    const int i = lookup(from);
    const int j = lookup(to);
    if (i == j) throw InputError("self-loop on node '" + from + "'");
    entries[static_cast<std::size_t>(i) * n + j] = 1;
    entries[static_cast<std::size_t>(j) * n + i] = 1;
  }
  return AdjacencyMatrix(n, std::move(entries));
}

double density(const AdjacencyMatrix& a) {
  const double pairs = 0.5 * a.n() * (a.n() - 1);
  return static_cast<double>(a.edge_count()) / pairs;
}

namespace {

std::vector<int> bfs_distances(const AdjacencyMatrix& a, int source) {
  std::vector<int> dist(a.n(), -1);
  std::queue<int> frontier;
  dist[source] = 0;
  frontier.push(source);
  while (!frontier.empty()) {
    const int v = frontier.front();
    frontier.pop();
    const auto* row = a.row(v);
    for (int w = 0; w < a.n(); ++w)
      if (row[w] && dist[w] < 0) {
        dist[w] = dist[v] + 1;
        frontier.push(w);
      }
  }
  return dist;
}

}  // namespace

Diameter diameter(const AdjacencyMatrix& a) {
  const int n = a.n();
  std::vector<int> component(n, -1);
  std::vector<int> sizes;
  for (int v = 0; v < n; ++v) {
    if (component[v] >= 0) continue;
    const auto dist = bfs_distances(a, v);
    int size = 0;
    for (int w = 0; w < n; ++w)
      if (dist[w] >= 0) {
        component[w] = static_cast<int>(sizes.size());
        ++size;
      }
    sizes.push_back(size);
  }
  // Components are numbered in order of their lowest node, so max_element picks
  // the lowest-index component among equally large ones.
  const int largest = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());

  Diameter result;
  result.disconnected = sizes.size() > 1;
  for (int v = 0; v < n; ++v) {
    if (component[v] != largest) continue;
    for (int d : bfs_distances(a, v)) result.value = std::max(result.value, d);
  }
  return result;
}

double transitivity(const AdjacencyMatrix& a) {
  const auto counts = kernels::count_triads(a);
  if (counts.connected_triples == 0) return 0.0;
  return 3.0 * static_cast<double>(counts.triangles) / static_cast<double>(counts.connected_triples);
}

DyadicCovariateMatrix uniform_homophily(const std::vector<std::string>& categories) {
  const int n = static_cast<int>(categories.size());
  if (n == 0) throw InputError("homophily needs at least one node");
  for (int i = 0; i < n; ++i)
    if (categories[i].empty() || categories[i] == "NA")
      throw InputError("missing category value at node " + std::to_string(i));
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (categories[i] == categories[j]) h(i, j) = h(j, i) = 1.0;
  return DyadicCovariateMatrix(std::move(h));
}

SymmetricEigen symmetric_eigen_descending(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) throw std::runtime_error("symmetric eigensolver failed");
  const auto n = m.rows();
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), 0);
  const auto& values = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return values(x) > values(y); });
  SymmetricEigen out{Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = values(order[k]);
    out.vectors.col(k) = solver.eigenvectors().col(order[k]);
  }
  return out;
}

std::vector<double> adjacency_spectrum(const AdjacencyMatrix& a) {
  const auto eig = symmetric_eigen_descending(a.to_dense());
  return {eig.values.data(), eig.values.data() + eig.values.size()};
}

}  // namespace netmed
