#include "parkcast/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "parkcast/errors.hpp"
#include "parkcast/rng.hpp"

namespace parkcast {

double minkowski_distance(const std::vector<double>& a,
                          const std::vector<double>& b, double p) {
  if (a.size() != b.size())
    throw ConfigError("minkowski_distance: dimension mismatch");
  if (p < 1.0) throw ConfigError("minkowski_distance: order p must be >= 1");

  double max_abs = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    max_abs = std::max(max_abs, std::abs(a[i] - b[i]));
  if (max_abs == 0.0) return 0.0;

  // Factor out the largest component so |d/max|^p stays in range.
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    sum += std::pow(std::abs(a[i] - b[i]) / max_abs, p);
  return max_abs * std::pow(sum, 1.0 / p);
}

namespace {

double sq_euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k,
                    std::uint64_t seed, int max_iter, double tol) {
  const std::size_t n = points.size();
  if (k <= 0) throw ConfigError("kmeans: k must be positive");
  if (static_cast<std::size_t>(k) > n)
    throw ConfigError("kmeans: k exceeds number of points");
  const std::size_t dim = points.front().size();
  for (const auto& p : points)
    if (p.size() != dim) throw ConfigError("kmeans: points of unequal dimension");

  Rng rng(seed);
  KMeansResult res;
  res.centroids.reserve(k);

  // k-means++ seeding.
  res.centroids.push_back(points[rng.uniform_index(n)]);
  std::vector<double> d2(n);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      for (const auto& cen : res.centroids)
        best = std::min(best, sq_euclid(points[i], cen));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total <= 0.0) {
      pick = rng.uniform_index(n);  // all remaining points coincide
    } else {
      double r = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    }
    res.centroids.push_back(points[pick]);
  }

  res.assignments.assign(n, 0);
  std::vector<std::vector<double>> sums(k, std::vector<double>(dim));
  std::vector<std::size_t> counts(k);

  for (int iter = 0; iter < max_iter; ++iter) {
    // Assign. Ties go to the lowest centroid index.
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_euclid(points[i], res.centroids[0]);
      for (int c = 1; c < k; ++c) {
        const double d = sq_euclid(points[i], res.centroids[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      res.assignments[i] = best;
    }

    // Reseed any emptied cluster to the point farthest from its own centroid.
    for (auto& s : sums) std::fill(s.begin(), s.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0u);
    for (std::size_t i = 0; i < n; ++i) {
      counts[res.assignments[i]] += 1;
      for (std::size_t j = 0; j < dim; ++j)
        sums[res.assignments[i]][j] += points[i][j];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[res.assignments[i]] <= 1) continue;  // keep donors nonempty
        const double d = sq_euclid(points[i], res.centroids[res.assignments[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far_d < 0.0) continue;  // no donor; leave the centroid in place
      const int old = res.assignments[far];
      counts[old] -= 1;
      for (std::size_t j = 0; j < dim; ++j) sums[old][j] -= points[far][j];
      res.assignments[far] = c;
      counts[c] = 1;
      for (std::size_t j = 0; j < dim; ++j) sums[c][j] = points[far][j];
    }

    // Update.
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      std::vector<double> next(dim);
      for (std::size_t j = 0; j < dim; ++j)
        next[j] = sums[c][j] / static_cast<double>(counts[c]);
      shift = std::max(shift, std::sqrt(sq_euclid(next, res.centroids[c])));
      res.centroids[c] = std::move(next);
    }

    // Inertia against the updated centroids (monotone across iterations).
    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      inertia += sq_euclid(points[i], res.centroids[res.assignments[i]]);
    res.inertia_history.push_back(inertia);
    res.inertia = inertia;
    res.iterations = iter + 1;
    if (shift < tol) break;
  }
  return res;
}

std::vector<std::vector<double>> zscore(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return {};
  const std::size_t dim = rows.front().size();
  const double n = static_cast<double>(rows.size());
  std::vector<double> mean(dim, 0.0), var(dim, 0.0);
  for (const auto& r : rows)
    for (std::size_t j = 0; j < dim; ++j) mean[j] += r[j];
  for (auto& m : mean) m /= n;
  for (const auto& r : rows)
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = r[j] - mean[j];
      var[j] += d * d;
    }
  for (auto& v : var) v /= n;

  std::vector<std::vector<double>> out(rows.size(), std::vector<double>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      const double sd = std::sqrt(var[j]);
      out[i][j] = sd > 1e-12 ? (rows[i][j] - mean[j]) / sd : 0.0;
    }
  return out;
}

}  // namespace parkcast
