#include "projsel/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "projsel/errors.hpp"
#include "projsel/parallel.hpp"

namespace projsel {

ProbabilityTensor::ProbabilityTensor(int draws, int observations, int categories,
                                     double fill)
    : draws_(draws),
      observations_(observations),
      categories_(categories),
      data_(static_cast<std::size_t>(draws) * static_cast<std::size_t>(observations) *
                static_cast<std::size_t>(categories),
            fill) {}

Eigen::MatrixXd ProbabilityTensor::slice(int s) const {
  Eigen::MatrixXd out(observations_, categories_);
  for (int i = 0; i < observations_; ++i) out.row(i) = row(s, i).transpose();
  return out;
}

Eigen::MatrixXd ProbabilityTensor::mean() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(observations_, categories_);
  for (int s = 0; s < draws_; ++s)
    for (int i = 0; i < observations_; ++i) out.row(i) += row(s, i).transpose();
  if (draws_ > 0) out /= static_cast<double>(draws_);
  return out;
}

std::string_view to_string(DrawKind kind) {
  switch (kind) {
    case DrawKind::cumulative_params: return "cumulative-params";
    case DrawKind::categorical_params: return "categorical-params";
    case DrawKind::prob_tensor: return "prob-tensor";
  }
  return "";
}

DrawKind parse_draw_kind(std::string_view name) {
  if (name == "cumulative-params") return DrawKind::cumulative_params;
  if (name == "categorical-params") return DrawKind::categorical_params;
  if (name == "prob-tensor") return DrawKind::prob_tensor;
  throw DataError("unknown draws kind '" + std::string(name) + "'");
}

DrawKind DrawSet::kind() const { return static_cast<DrawKind>(content.index()); }

int DrawSet::size() const {
  return std::visit(
      [](const auto& c) -> int {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, ProbabilityTensor>)
          return c.draws();
        else
          return static_cast<int>(c.size());
      },
      content);
}

int DrawSet::categories() const {
  return std::visit(
      [](const auto& c) -> int {
        if constexpr (std::is_same_v<std::decay_t<decltype(c)>, ProbabilityTensor>)
          return c.categories();
        else
          return c.empty() ? 0 : c.front().categories();
      },
      content);
}

const std::vector<CumulativeParams>& DrawSet::cumulative() const {
  if (kind() != DrawKind::cumulative_params)
    throw DataError("draw set does not hold cumulative parameters");
  return std::get<0>(content);
}

const std::vector<CategoricalParams>& DrawSet::categorical() const {
  if (kind() != DrawKind::categorical_params)
    throw DataError("draw set does not hold categorical parameters");
  return std::get<1>(content);
}

const ProbabilityTensor& DrawSet::tensor() const {
  if (kind() != DrawKind::prob_tensor)
    throw DataError("draw set does not hold a probability tensor");
  return std::get<2>(content);
}

void DrawSet::validate() const {
  if (size() < 1) throw DataError("draw set is empty");
  const int J = categories();
  const auto P = static_cast<Eigen::Index>(predictor_names.size());
  switch (kind()) {
    case DrawKind::cumulative_params: {
      const auto& draws = cumulative();
      for (std::size_t s = 0; s < draws.size(); ++s) {
        const std::string where = "draw " + std::to_string(s + 1);
        if (draws[s].categories() != J)
          throw DataError(where + ": inconsistent number of thresholds");
        if (draws[s].coefficients.size() != P)
          throw DataError(where + ": coefficient count does not match predictor names");
        try {
          projsel::validate(draws[s]);
        } catch (const InvalidParameter& e) {
          throw DataError(where + ": " + e.what());
        }
      }
      break;
    }
    case DrawKind::categorical_params: {
      const auto& draws = categorical();
      for (std::size_t s = 0; s < draws.size(); ++s) {
        const std::string where = "draw " + std::to_string(s + 1);
        if (draws[s].categories() != J)
          throw DataError(where + ": inconsistent number of categories");
        if (draws[s].coefficients.cols() != P)
          throw DataError(where + ": coefficient count does not match predictor names");
        try {
          projsel::validate(draws[s]);
        } catch (const InvalidParameter& e) {
          throw DataError(where + ": " + e.what());
        }
      }
      break;
    }
    case DrawKind::prob_tensor: {
      const auto& t = tensor();
      if (t.categories() < 2) throw DataError("probability tensor needs >= 2 categories");
      for (int s = 0; s < t.draws(); ++s) {
        for (int i = 0; i < t.observations(); ++i) {
          const auto r = t.row(s, i);
          if ((r.array() < 0.0).any() || !r.allFinite() || std::abs(r.sum() - 1.0) > 1e-6)
            throw DataError("probability tensor row (draw " + std::to_string(s + 1) +
                            ", obs " + std::to_string(i + 1) +
                            ") is not a valid pmf (sum " + std::to_string(r.sum()) + ")");
        }
      }
      break;
    }
  }
}

std::vector<double> ClusteredReference::normalized_weights() const {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<double> out(weights.size());
  for (std::size_t c = 0; c < weights.size(); ++c) out[c] = weights[c] / total;
  return out;
}

namespace {

std::vector<int> mapped_columns(const DrawSet& draws, const Dataset& data) {
  std::vector<int> columns;
  columns.reserve(draws.predictor_names.size());
  for (const auto& name : draws.predictor_names) columns.push_back(data.column_index(name));
  return columns;
}

}  // namespace

ProbabilityTensor predictive_tensor(const DrawSet& draws, const Dataset& data,
                                    const Link& link) {
  draws.validate();
  const int S = draws.size();
  const int N = data.rows();
  const int J = draws.categories();
  if (J != data.categories())
    throw DataError("draws have " + std::to_string(J) + " categories, data has " +
                    std::to_string(data.categories()));

  if (draws.kind() == DrawKind::prob_tensor) {
    const auto& t = draws.tensor();
    if (t.observations() != N)
      throw DataError("probability tensor has " + std::to_string(t.observations()) +
                      " observations, data has " + std::to_string(N));
    return t;
  }

  const Eigen::MatrixXd X = data.columns(mapped_columns(draws, data));
  ProbabilityTensor out(S, N, J);
  parallel_for(static_cast<std::size_t>(S), [&](std::size_t su) {
    const int s = static_cast<int>(su);
    if (draws.kind() == DrawKind::cumulative_params) {
      const auto& p = draws.cumulative()[su];
      const Eigen::VectorXd eta = X * p.coefficients;
      for (int i = 0; i < N; ++i) out.row(s, i) = cumulative_pmf(p, link, eta[i]);
    } else {
      const auto& p = draws.categorical()[su];
      for (int i = 0; i < N; ++i)
        out.row(s, i) = categorical_pmf(p, X.row(i).transpose());
    }
  });
  return out;
}

Eigen::MatrixXd clustering_features(const DrawSet& draws, const Dataset& data,
                                    const Link& link) {
  const int S = draws.size();
  const int N = data.rows();
  if (draws.kind() == DrawKind::cumulative_params) {
    draws.validate();
    const Eigen::MatrixXd X = data.columns(mapped_columns(draws, data));
    Eigen::MatrixXd features(S, N);
    parallel_for(static_cast<std::size_t>(S), [&](std::size_t s) {
      features.row(static_cast<Eigen::Index>(s)) =
          (X * draws.cumulative()[s].coefficients).transpose();
    });
    return features;
  }

  const ProbabilityTensor tensor = predictive_tensor(draws, data, link);
  const int J = tensor.categories();
  Eigen::MatrixXd features(S, static_cast<Eigen::Index>(N) * (J - 1));
  parallel_for(static_cast<std::size_t>(S), [&](std::size_t su) {
    const int s = static_cast<int>(su);
    for (int i = 0; i < N; ++i) {
      const double base = std::log(std::max(tensor(s, i, 0), kProbabilityFloor));
      for (int j = 1; j < J; ++j)
        features(s, static_cast<Eigen::Index>(i) * (J - 1) + (j - 1)) =
            std::log(std::max(tensor(s, i, j), kProbabilityFloor)) - base;
    }
  });
  return features;
}

ClusteredReference aggregate_draws(const ProbabilityTensor& tensor,
                                   std::vector<std::vector<int>> members,
                                   ClusterMode mode) {
  const int S = tensor.draws();
  const int N = tensor.observations();
  const int J = tensor.categories();
  const int C = static_cast<int>(members.size());

  ClusteredReference out;
  out.mode = mode;
  out.draw_count = S;
  out.assignment.assign(static_cast<std::size_t>(S), -1);
  out.weights.resize(static_cast<std::size_t>(C));
  out.probs = ProbabilityTensor(C, N, J);
  for (int c = 0; c < C; ++c) {
    auto& m = members[static_cast<std::size_t>(c)];
    if (m.empty()) throw InvalidParameter("cluster " + std::to_string(c + 1) + " is empty");
    std::sort(m.begin(), m.end());
    for (int s : m) {
      if (s < 0 || s >= S) throw InvalidParameter("draw index out of range");
      if (out.assignment[static_cast<std::size_t>(s)] != -1)
        throw InvalidParameter("index sets are not disjoint");
      out.assignment[static_cast<std::size_t>(s)] = c;
    }
    out.weights[static_cast<std::size_t>(c)] = static_cast<double>(m.size());
    const double scale = 1.0 / static_cast<double>(m.size());
    for (int i = 0; i < N; ++i) {
      auto target = out.probs.row(c, i);
      for (int s : m) target += tensor.row(s, i);
      target *= scale;
    }
  }
  out.members = std::move(members);
  return out;
}

ClusteredReference cluster_draws(const ProbabilityTensor& tensor,
                                 const Eigen::MatrixXd& features, int clusters,
                                 std::uint64_t seed, const KMeansOptions& options) {
  const int S = tensor.draws();
  if (features.rows() != S)
    throw DataError("clustering features must have one row per draw");
  if (clusters < 1 || clusters > S)
    throw InvalidParameter("cluster count " + std::to_string(clusters) +
                           " must lie in 1.." + std::to_string(S));

  std::vector<std::vector<int>> members(static_cast<std::size_t>(clusters));
  if (clusters == S) {
    for (int s = 0; s < S; ++s) members[static_cast<std::size_t>(s)] = {s};
  } else {
    const KMeansResult km = kmeans(features, clusters, seed, options);
    for (int s = 0; s < S; ++s)
      members[static_cast<std::size_t>(km.assignment[static_cast<std::size_t>(s)])].push_back(s);
  }
  return aggregate_draws(tensor, std::move(members), ClusterMode::clustered);
}

ClusteredReference thin_draws(const ProbabilityTensor& tensor, int count) {
  const long S = tensor.draws();
  if (count < 1 || count > S)
    throw InvalidParameter("thinning count " + std::to_string(count) +
                           " must lie in 1.." + std::to_string(S));
  std::vector<std::vector<int>> members;
  members.reserve(static_cast<std::size_t>(count));
  for (long k = 0; k < count; ++k) {
    // ceil((2k + 1) S / 2C) as a 1-based position
    const long numerator = (2 * k + 1) * S;
    const long position = (numerator + 2 * count - 1) / (2 * count);
    members.push_back({static_cast<int>(position - 1)});
  }
  return aggregate_draws(tensor, std::move(members), ClusterMode::thinned);
}

}  // namespace projsel
