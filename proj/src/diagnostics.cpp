#include "netmed/diagnostics.hpp"

#include "netmed/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace netmed {

void Chain::validate() const {
  if (draws.empty()) throw InputError("chain '" + parameter + "' is empty");
  for (double v : draws)
    if (!std::isfinite(v)) throw InputError("chain '" + parameter + "' has non-finite draws");
}

namespace {

double mean(std::span<const double> x) { return std::accumulate(x.begin(), x.end(), 0.0) / x.size(); }

// Variance of the segment mean estimated from non-overlapping batch means.
double batch_means_variance(std::span<const double> x) {
  const std::size_t batches = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(x.size())));
  const std::size_t size = x.size() / batches;
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) means[b] = mean(x.subspan(b * size, size));
  const double m = mean(means);
  double ss = 0.0;
  for (double v : means) ss += (v - m) * (v - m);
  return ss / static_cast<double>(batches - 1) / static_cast<double>(batches);
}

double variance(std::span<const double> x, double m) {
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size() - 1);
}

}  // namespace

double geweke_z(const Chain& chain, double first_frac, double last_frac) {
  chain.validate();
  if (!(first_frac > 0.0) || !(last_frac > 0.0) || first_frac + last_frac > 1.0)
    throw InputError("geweke fractions must be positive and sum to at most 1");
  const std::size_t n = chain.draws.size();
  if (n < 100) throw InputError("geweke_z needs at least 100 draws");
  const auto first_len = static_cast<std::size_t>(std::floor(first_frac * n));
  const auto last_len = static_cast<std::size_t>(std::floor(last_frac * n));
  if (first_len < 4 || last_len < 4) throw InputError("geweke segments are too short");

  const std::span<const double> all(chain.draws);
  const auto head = all.first(first_len);
  const auto tail = all.last(last_len);
  const double var = batch_means_variance(head) + batch_means_variance(tail);
  if (!(var > 0.0)) throw DegenerateChainError();
  return (mean(head) - mean(tail)) / std::sqrt(var);
}

std::pair<double, double> hpd_interval(std::span<const double> samples, double prob) {
  if (samples.empty()) throw InputError("hpd_interval needs at least one sample");
  if (!(prob > 0.0 && prob < 1.0)) throw InputError("hpd probability must lie in (0, 1)");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  auto count = static_cast<std::size_t>(std::ceil(prob * static_cast<double>(n) - 1e-9));
  count = std::clamp<std::size_t>(count, 1, n);
  std::size_t best = 0;
  double best_width = sorted[count - 1] - sorted[0];
  for (std::size_t start = 1; start + count <= n; ++start) {
    const double width = sorted[start + count - 1] - sorted[start];
    if (width < best_width) {
      best_width = width;
      best = start;
    }
  }
  return {sorted[best], sorted[best + count - 1]};
}

double split_rhat(std::span<const Chain> chains) {
  if (chains.empty()) throw InputError("split_rhat needs at least one chain");
  const std::size_t len = chains.front().draws.size();
  for (const auto& c : chains) {
    c.validate();
    if (c.draws.size() != len) throw InputError("split_rhat chains must have equal lengths");
  }
  if (chains.size() < 2 && len < 100) throw InputError("split_rhat needs chains of at least 100 draws");
  if (len < 4) throw InputError("split_rhat chains are too short");

  const std::size_t half = len / 2;
  std::vector<std::span<const double>> pieces;
  for (const auto& c : chains) {
    const std::span<const double> d(c.draws);
    pieces.push_back(d.first(half));
    pieces.push_back(d.subspan(len - half, half));
  }
  const double m = static_cast<double>(pieces.size());
  const double n = static_cast<double>(half);
  std::vector<double> means;
  double within = 0.0;
  for (auto p : pieces) {
    const double mu = mean(p);
    means.push_back(mu);
    within += variance(p, mu);
  }
  within /= m;
  const double grand = mean(means);
  double between = 0.0;
  for (double mu : means) between += (mu - grand) * (mu - grand);
  between *= n / (m - 1.0);

  if (within == 0.0 && between == 0.0) return 1.0;
  if (within == 0.0) return std::numeric_limits<double>::infinity();
  const double pooled = (n - 1.0) / n * within + between / n;
  return std::sqrt(pooled / within);
}

double effective_sample_size(const Chain& chain) {
  chain.validate();
  const std::size_t n = chain.draws.size();
  if (n < 100) throw InputError("effective_sample_size needs at least 100 draws");
  const double mu = mean(chain.draws);
  std::vector<double> centred(n);
  for (std::size_t i = 0; i < n; ++i) centred[i] = chain.draws[i] - mu;
  const double c0 = std::inner_product(centred.begin(), centred.end(), centred.begin(), 0.0) / n;
  if (!(c0 > 0.0)) throw DegenerateChainError();

  auto rho = [&](std::size_t lag) {
    double s = 0.0;
    for (std::size_t i = 0; i + lag < n; ++i) s += centred[i] * centred[i + lag];
    return s / n / c0;
  };
  // tau = -1 + 2 sum_m (rho_2m + rho_2m+1) over the initial positive pairs.
  double tau = -1.0;
  for (std::size_t lag = 0; lag + 1 < n; lag += 2) {
    const double pair = rho(lag) + rho(lag + 1);
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  const double nd = static_cast<double>(n);
  if (tau <= 0.0) return nd;
  return std::min(nd, nd / tau);
}

}  // namespace netmed
