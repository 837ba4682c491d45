#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "projsel/errors.hpp"
#include "projsel/parallel.hpp"
#include "projsel/reference.hpp"

namespace projsel {

namespace {

double squared_distance(const Eigen::MatrixXd& points, Eigen::Index i,
                        const Eigen::MatrixXd& centroids, Eigen::Index c) {
  return (points.row(i) - centroids.row(c)).squaredNorm();
}

Eigen::MatrixXd kmeanspp_init(const Eigen::MatrixXd& points, int k, std::mt19937_64& rng) {
  const Eigen::Index n = points.rows();
  Eigen::MatrixXd centroids(k, points.cols());
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);

  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  Eigen::Index pick = first(rng);
  centroids.row(0) = points.row(pick);
  chosen[static_cast<std::size_t>(pick)] = 1;

  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i)
    d2[static_cast<std::size_t>(i)] = squared_distance(points, i, centroids, 0);

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    if (total > 0.0) {
      const double target = unit(rng) * total;
      double running = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        running += d2[static_cast<std::size_t>(i)];
        if (running >= target && d2[static_cast<std::size_t>(i)] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      // All remaining points coincide with a centroid: pick an unused one.
      std::vector<Eigen::Index> unused;
      for (Eigen::Index i = 0; i < n; ++i)
        if (!chosen[static_cast<std::size_t>(i)]) unused.push_back(i);
      std::uniform_int_distribution<std::size_t> any(0, unused.size() - 1);
      pick = unused[any(rng)];
    }
    centroids.row(c) = points.row(pick);
    chosen[static_cast<std::size_t>(pick)] = 1;
    for (Eigen::Index i = 0; i < n; ++i)
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], squared_distance(points, i, centroids, c));
  }
  return centroids;
}

KMeansResult lloyd(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                   const KMeansOptions& options) {
  const Eigen::Index n = points.rows();
  std::mt19937_64 rng(seed);
  KMeansResult result;
  result.centroids = kmeanspp_init(points, k, rng);
  result.assignment.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> dist(static_cast<std::size_t>(n));

  double previous = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter + 1;
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_d = squared_distance(points, i, result.centroids, 0);
      for (int c = 1; c < k; ++c) {
        const double d = squared_distance(points, i, result.centroids, c);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      result.assignment[static_cast<std::size_t>(i)] = best;
      dist[static_cast<std::size_t>(i)] = best_d;
      inertia += best_d;
    }

    std::vector<int> counts(static_cast<std::size_t>(k), 0);
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, points.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = result.assignment[static_cast<std::size_t>(i)];
      ++counts[static_cast<std::size_t>(c)];
      sums.row(c) += points.row(i);
    }

    bool reseeded = false;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        result.centroids.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
        continue;
      }
      // Empty cluster: move its centroid to the farthest point that does not
      // leave its own cluster empty.
      Eigen::Index far = -1;
      double far_d = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int owner = result.assignment[static_cast<std::size_t>(i)];
        if (counts[static_cast<std::size_t>(owner)] > 1 && dist[static_cast<std::size_t>(i)] > far_d) {
          far_d = dist[static_cast<std::size_t>(i)];
          far = i;
        }
      }
      if (far < 0) throw NumericalError("k-means could not fill an empty cluster", {}, 0.0);
      const int owner = result.assignment[static_cast<std::size_t>(far)];
      --counts[static_cast<std::size_t>(owner)];
      sums.row(owner) -= points.row(far);
      result.centroids.row(owner) = sums.row(owner) / counts[static_cast<std::size_t>(owner)];
      result.assignment[static_cast<std::size_t>(far)] = c;
      counts[static_cast<std::size_t>(c)] = 1;
      result.centroids.row(c) = points.row(far);
      dist[static_cast<std::size_t>(far)] = 0.0;
      reseeded = true;
    }

    result.inertia = inertia;
    if (!reseeded && std::isfinite(previous) &&
        std::abs(previous - inertia) <= options.relative_tolerance * std::max(previous, 1e-300))
      break;
    if (!reseeded && inertia == 0.0) break;
    previous = inertia;
  }

  // Final assignment against the final centroids; keep every cluster nonempty.
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  double inertia = 0.0;
  std::vector<int> assignment(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = squared_distance(points, i, result.centroids, 0);
    for (int c = 1; c < k; ++c) {
      const double d = squared_distance(points, i, result.centroids, c);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    assignment[static_cast<std::size_t>(i)] = best;
    ++counts[static_cast<std::size_t>(best)];
    inertia += best_d;
  }
  if (std::all_of(counts.begin(), counts.end(), [](int c) { return c > 0; })) {
    result.assignment = std::move(assignment);
    result.inertia = inertia;
  } else {
    result.inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      result.inertia += squared_distance(points, i, result.centroids,
                                         result.assignment[static_cast<std::size_t>(i)]);
  }
  return result;
}

}  // namespace

KMeansResult kmeans(const Eigen::MatrixXd& points, int k, std::uint64_t seed,
                    const KMeansOptions& options) {
  if (k < 1 || k > points.rows())
    throw InvalidParameter("k-means: cluster count must lie in 1.." +
                           std::to_string(points.rows()));
  const int restarts = std::max(options.restarts, 1);
  std::vector<KMeansResult> runs(static_cast<std::size_t>(restarts));
  parallel_for(runs.size(), [&](std::size_t r) {
    runs[r] = lloyd(points, k, derive_seed(seed, r), options);
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs.size(); ++r)
    if (runs[r].inertia < runs[best].inertia) best = r;
  KMeansResult out = std::move(runs[best]);

  // Canonical labels: clusters ordered by their smallest member.
  std::vector<int> relabel(static_cast<std::size_t>(k), -1);
  int next = 0;
  for (int label : out.assignment)
    if (relabel[static_cast<std::size_t>(label)] < 0) relabel[static_cast<std::size_t>(label)] = next++;
  Eigen::MatrixXd centroids(k, points.cols());
  for (int c = 0; c < k; ++c)
    if (relabel[static_cast<std::size_t>(c)] >= 0)
      centroids.row(relabel[static_cast<std::size_t>(c)]) = out.centroids.row(c);
  for (int& label : out.assignment) label = relabel[static_cast<std::size_t>(label)];
  out.centroids = std::move(centroids);
  return out;
}

}  // namespace projsel
