#pragma once

#include <cstdint>
#include <vector>

namespace parkcast {

/// Minkowski distance of order p >= 1: (sum |a_i - b_i|^p)^(1/p).
/// Scaled internally so large p does not overflow.
double minkowski_distance(const std::vector<double>& a,
                          const std::vector<double>& b, double p);

struct KMeansResult {
  std::vector<int> assignments;               // one per point
  std::vector<std::vector<double>> centroids; // k rows
  double inertia = 0.0;                       // sum of squared distances
  std::vector<double> inertia_history;        // after each Lloyd iteration
  int iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding from a seeded RNG.
/// Iterates until the largest centroid shift falls below `tol` or
/// `max_iter` is reached. An emptied cluster is reseeded to the point
/// farthest from its assigned centroid, which keeps the run deterministic.
KMeansResult kmeans(const std::vector<std::vector<double>>& points, int k,
                    std::uint64_t seed, int max_iter = 100, double tol = 1e-6);

/// Column-wise z-score. Constant columns map to zero.
std::vector<std::vector<double>> zscore(const std::vector<std::vector<double>>& rows);

}  // namespace parkcast
