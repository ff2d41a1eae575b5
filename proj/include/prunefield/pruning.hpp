#pragma once

#include "prunefield/model.hpp"
#include "prunefield/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace prunefield {

enum class Strategy { edge, uniform, importance_in, importance_out, importance_product, coreset };

std::string_view to_string(Strategy s);
/// Accepts the names produced by to_string. Throws InvalidArgument.
Strategy parse_strategy(std::string_view name);

struct Histogram {
  std::vector<double> edges;          // lower bin edges; last one is the overflow bin start
  std::vector<std::size_t> counts;    // counts[i] covers [edges[i], edges[i] + bin_width)
  std::size_t overflow = 0;           // |w| >= max_mag
  double bin_width = 0.0;

  std::size_t total() const;
};

/// Histogram of |w| over every weight matrix of the model.
Histogram weight_histogram(const MlpModel& model, double bin_width, double max_mag);

struct PruneReport {
  Strategy strategy = Strategy::edge;
  std::optional<double> threshold;
  std::optional<std::size_t> target_width;
  std::size_t edges_before = 0;
  std::size_t edges_after = 0;
  std::size_t params_before = 0;
  std::size_t params_after = 0;

  double remaining_edge_pct() const;
};

struct EdgePruneResult {
  MlpModel model;
  PruneReport report;
};

/// Zeroes every weight with |w| < threshold. edges_after counts the
/// nonzero weights left.
EdgePruneResult prune_edges(const MlpModel& model, double threshold);

/// Mean absolute incoming / outgoing edge weight per neuron of one hidden
/// layer. The incoming mean runs over the full fan-in (skip inputs
/// included); the outgoing mean over every consumer row.
struct ImportanceScores {
  std::size_t layer_index = 0;
  std::vector<double> w_in;
  std::vector<double> w_out;
  std::vector<double> product;
};

ImportanceScores compute_importance(const MlpModel& model, std::size_t layer_index);

/// m distinct indices chosen uniformly without replacement, ascending.
std::vector<std::size_t> select_uniform(std::size_t layer_width, std::size_t m, RngStream& rng);

/// Indices of the m largest scores (lower index wins ties), ascending.
std::vector<std::size_t> select_topk(const std::vector<double>& scores, std::size_t m);

using Activation = std::function<double(double)>;

inline double relu(double x) { return x > 0.0 ? x : 0.0; }

/// Coreset sampling distribution: pr(i) proportional to
/// w_in(i) * phi(beta * w_out(i)). Throws DegenerateDistribution when every
/// numerator is zero.
std::vector<double> coreset_probabilities(const ImportanceScores& scores, double beta,
                                          const Activation& phi = relu);

struct CoresetSelection {
  std::size_t layer_index = 0;
  std::vector<std::size_t> sampled;  // every draw, in draw order
  std::vector<std::size_t> kept;     // distinct drawn indices, ascending
  std::vector<double> u;             // aligned with kept
  std::vector<double> pr;
};

/// m independent draws q ~ pr; each draw adds w_out(q) / (m pr(q)) to u(q).
CoresetSelection coreset_select(const ImportanceScores& scores, std::size_t m, double beta,
                                RngStream& rng, const Activation& phi = relu);

/// Keeps drawing from the coreset distribution until `distinct` different
/// neurons have been drawn; u then uses the realised number of draws as m.
/// Throws DegenerateDistribution if fewer than `distinct` neurons carry
/// probability mass, or if max_draws is exhausted.
CoresetSelection coreset_select_distinct(const ImportanceScores& scores, std::size_t distinct,
                                         double beta, RngStream& rng,
                                         const Activation& phi = relu,
                                         std::size_t max_draws = 10'000'000);

/// Removes every neuron of hidden layer `layer_index` not listed in `kept`:
/// drops the layer's weight rows and biases and the consumers' matching
/// columns (skip-input columns are never touched). With u, each kept
/// neuron's outgoing columns are multiplied by u(q) / w_out(q).
MlpModel shrink_layer(const MlpModel& model, std::size_t layer_index,
                      const std::vector<std::size_t>& kept,
                      const std::optional<std::vector<double>>& u = std::nullopt);

struct PruneOptions {
  Strategy strategy = Strategy::coreset;
  std::size_t target_width = 64;
  double beta = 3.0;
  /// Apply the coreset correction weights when shrinking.
  bool reweight = true;
  std::uint64_t seed = 0;
};

struct ModelPruneResult {
  MlpModel model;
  PruneReport report;
};

/// Selects neurons in every non-frozen hidden layer wider than the target,
/// each from the unmodified model with its own RNG substream keyed by the
/// layer index, then shrinks the layers.
ModelPruneResult prune_model(const MlpModel& model, const PruneOptions& options);

}  // namespace prunefield
