#include "prunefield/pruning.hpp"

#include "prunefield/errors.hpp"
#include "prunefield/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace prunefield {
namespace {

void check_hidden(const MlpModel& model, std::size_t layer_index) {
  if (layer_index >= model.arch.depth || layer_index >= model.layers.size()) {
    throw InvalidArgument("layer " + std::to_string(layer_index) + " is not a hidden layer (depth " +
                          std::to_string(model.arch.depth) + ")");
  }
}

bool is_importance(Strategy s) {
  return s == Strategy::importance_in || s == Strategy::importance_out ||
         s == Strategy::importance_product;
}

CoresetSelection finish_selection(const ImportanceScores& scores, std::vector<double> pr,
                                  std::vector<std::size_t> sampled) {
  CoresetSelection sel;
  sel.layer_index = scores.layer_index;
  sel.pr = std::move(pr);
  std::map<std::size_t, std::size_t> counts;
  for (std::size_t q : sampled) ++counts[q];
  const double m = static_cast<double>(sampled.size());
  for (const auto& [q, count] : counts) {
    sel.kept.push_back(q);
    // count(q) additions of w_out(q) / (m pr(q)).
    sel.u.push_back(static_cast<double>(count) * scores.w_out[q] / (m * sel.pr[q]));
  }
  sel.sampled = std::move(sampled);
  return sel;
}

std::size_t draw(const std::vector<double>& cdf, RngStream& rng) {
  const double x = rng.uniform01() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
  if (it == cdf.end()) it = std::lower_bound(cdf.begin(), cdf.end(), cdf.back());
  // Zero-probability entries share their predecessor's cdf value and are
  // skipped by upper_bound.
  return static_cast<std::size_t>(it - cdf.begin());
}

std::vector<double> cumulative(const std::vector<double>& pr) {
  std::vector<double> cdf(pr.size());
  std::partial_sum(pr.begin(), pr.end(), cdf.begin());
  return cdf;
}

}  // namespace

std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::edge: return "edge";
    case Strategy::uniform: return "uniform";
    case Strategy::importance_in: return "importance_in";
    case Strategy::importance_out: return "importance_out";
    case Strategy::importance_product: return "importance_product";
    case Strategy::coreset: return "coreset";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  for (Strategy s : {Strategy::edge, Strategy::uniform, Strategy::importance_in,
                     Strategy::importance_out, Strategy::importance_product, Strategy::coreset}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidArgument("unknown strategy '" + std::string(name) + "'");
}

std::size_t Histogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), overflow);
}

Histogram weight_histogram(const MlpModel& model, double bin_width, double max_mag) {
  if (!(bin_width > 0.0)) throw InvalidArgument("weight_histogram: bin_width must be positive");
  if (!(max_mag > 0.0)) throw InvalidArgument("weight_histogram: max_mag must be positive");
  Histogram h;
  h.bin_width = bin_width;
  const auto n_bins = static_cast<std::size_t>(std::ceil(max_mag / bin_width - 1e-12));
  h.counts.assign(n_bins, 0);
  for (std::size_t i = 0; i <= n_bins; ++i) h.edges.push_back(std::min(i * bin_width, max_mag));
  for (const DenseLayer& l : model.layers) {
    for (Eigen::Index i = 0; i < l.weights.size(); ++i) {
      const double a = std::abs(l.weights.data()[i]);
      if (a >= max_mag) {
        ++h.overflow;
        continue;
      }
      auto bin = static_cast<std::size_t>(a / bin_width);
      // Guard the floor against representation error at bin edges.
      if (bin >= n_bins) bin = n_bins - 1;
      if (bin + 1 < h.edges.size() && a >= h.edges[bin + 1]) ++bin;
      if (bin > 0 && a < h.edges[bin]) --bin;
      ++h.counts[bin];
    }
  }
  return h;
}

double PruneReport::remaining_edge_pct() const {
  if (edges_before == 0) return 100.0;
  return 100.0 * static_cast<double>(edges_after) / static_cast<double>(edges_before);
}

EdgePruneResult prune_edges(const MlpModel& model, double threshold) {
  if (!(threshold >= 0.0)) throw InvalidArgument("prune_edges: threshold must be >= 0");
  EdgePruneResult r{model, {}};
  std::size_t nonzero = 0;
  for (DenseLayer& l : r.model.layers) {
    for (Eigen::Index i = 0; i < l.weights.size(); ++i) {
      double& w = l.weights.data()[i];
      if (std::abs(w) < threshold) w = 0.0;
      if (w != 0.0) ++nonzero;
    }
  }
  r.report.strategy = Strategy::edge;
  r.report.threshold = threshold;
  r.report.edges_before = edge_count(model);
  r.report.edges_after = nonzero;
  r.report.params_before = param_count(model);
  r.report.params_after = param_count(r.model);
  r.model.provenance.push_back("edge threshold " + std::to_string(threshold));
  return r;
}

ImportanceScores compute_importance(const MlpModel& model, std::size_t layer_index) {
  check_hidden(model, layer_index);
  const Matrix& w = model.layers[layer_index].weights;
  ImportanceScores s;
  s.layer_index = layer_index;
  const auto n = static_cast<std::size_t>(w.rows());
  s.w_in.resize(n);
  s.w_out.assign(n, 0.0);
  s.product.resize(n);
  const auto fan_in = static_cast<double>(w.cols());
  for (std::size_t i = 0; i < n; ++i) {
    s.w_in[i] = w.row(static_cast<Eigen::Index>(i)).cwiseAbs().sum() / fan_in;
  }
  std::size_t fan_out = 0;
  for (const Consumer& c : model.arch.consumers(layer_index)) {
    const Matrix& next = model.layers[c.layer].weights;
    fan_out += static_cast<std::size_t>(next.rows());
    for (std::size_t i = 0; i < n; ++i) {
      s.w_out[i] += next.col(static_cast<Eigen::Index>(c.offset + i)).cwiseAbs().sum();
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    s.w_out[i] /= static_cast<double>(fan_out);
    s.product[i] = s.w_in[i] * s.w_out[i];
  }
  return s;
}

std::vector<std::size_t> select_uniform(std::size_t layer_width, std::size_t m, RngStream& rng) {
  if (m > layer_width) {
    throw InvalidArgument("select_uniform: cannot keep " + std::to_string(m) + " of " +
                          std::to_string(layer_width) + " neurons");
  }
  auto kept = rng_uniform_indices(rng, layer_width, m, false);
  std::sort(kept.begin(), kept.end());
  return kept;
}

std::vector<std::size_t> select_topk(const std::vector<double>& scores, std::size_t m) {
  if (m > scores.size()) {
    throw InvalidArgument("select_topk: m = " + std::to_string(m) + " exceeds " +
                          std::to_string(scores.size()) + " scores");
  }
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(m);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<double> coreset_probabilities(const ImportanceScores& scores, double beta,
                                          const Activation& phi) {
  if (!(beta > 0.0)) throw InvalidArgument("coreset: beta must be positive");
  if (scores.w_in.size() != scores.w_out.size()) throw ShapeError("coreset: w_in / w_out lengths differ");
  std::vector<double> pr(scores.w_in.size());
  double total = 0.0;
  for (std::size_t i = 0; i < pr.size(); ++i) {
    pr[i] = scores.w_in[i] * phi(beta * scores.w_out[i]);
    if (pr[i] < 0.0 || !std::isfinite(pr[i])) {
      throw InvalidArgument("coreset: negative or non-finite sampling weight");
    }
    total += pr[i];
  }
  if (!(total > 0.0)) {
    throw DegenerateDistribution("coreset: every neuron has zero sampling weight in layer " +
                                 std::to_string(scores.layer_index));
  }
  for (double& p : pr) p /= total;
  return pr;
}

CoresetSelection coreset_select(const ImportanceScores& scores, std::size_t m, double beta,
                                RngStream& rng, const Activation& phi) {
  if (m == 0) throw InvalidArgument("coreset_select: sample size must be >= 1");
  auto pr = coreset_probabilities(scores, beta, phi);
  const auto cdf = cumulative(pr);
  std::vector<std::size_t> sampled;
  sampled.reserve(m);
  for (std::size_t t = 0; t < m; ++t) sampled.push_back(draw(cdf, rng));
  return finish_selection(scores, std::move(pr), std::move(sampled));
}

CoresetSelection coreset_select_distinct(const ImportanceScores& scores, std::size_t distinct,
                                         double beta, RngStream& rng, const Activation& phi,
                                         std::size_t max_draws) {
  if (distinct == 0) throw InvalidArgument("coreset_select_distinct: need at least one neuron");
  auto pr = coreset_probabilities(scores, beta, phi);
  const auto support = static_cast<std::size_t>(
      std::count_if(pr.begin(), pr.end(), [](double p) { return p > 0.0; }));
  if (support < distinct) {
    throw DegenerateDistribution("coreset: only " + std::to_string(support) +
                                 " neurons have sampling mass, " + std::to_string(distinct) +
                                 " requested");
  }
  const auto cdf = cumulative(pr);
  std::vector<bool> seen(pr.size(), false);
  std::size_t n_seen = 0;
  std::vector<std::size_t> sampled;
  while (n_seen < distinct) {
    if (sampled.size() >= max_draws) {
      throw DegenerateDistribution("coreset: draw budget exhausted before reaching " +
                                   std::to_string(distinct) + " distinct neurons");
    }
    const std::size_t q = draw(cdf, rng);
    if (!seen[q]) {
      seen[q] = true;
      ++n_seen;
    }
    sampled.push_back(q);
  }
  return finish_selection(scores, std::move(pr), std::move(sampled));
}

MlpModel shrink_layer(const MlpModel& model, std::size_t layer_index,
                      const std::vector<std::size_t>& kept,
                      const std::optional<std::vector<double>>& u) {
  check_hidden(model, layer_index);
  const Matrix& w = model.layers[layer_index].weights;
  const auto width = static_cast<std::size_t>(w.rows());
  if (kept.empty()) throw InvalidArgument("shrink_layer: must keep at least one neuron");
  std::vector<bool> used(width, false);
  for (std::size_t q : kept) {
    if (q >= width) {
      throw InvalidArgument("shrink_layer: index " + std::to_string(q) + " out of range for width " +
                            std::to_string(width));
    }
    if (used[q]) throw InvalidArgument("shrink_layer: duplicate index " + std::to_string(q));
    used[q] = true;
  }
  if (u && u->size() != kept.size()) throw InvalidArgument("shrink_layer: u is not aligned with kept");

  std::vector<double> scale(kept.size(), 1.0);
  if (u) {
    const ImportanceScores scores = compute_importance(model, layer_index);
    for (std::size_t j = 0; j < kept.size(); ++j) {
      const double w_out = scores.w_out[kept[j]];
      if (!(w_out > 0.0)) {
        throw InvalidArgument("shrink_layer: correction weight for neuron " +
                              std::to_string(kept[j]) + " with zero outgoing weight");
      }
      scale[j] = (*u)[j] / w_out;
    }
  }

  MlpModel out = model;
  const auto k = static_cast<Eigen::Index>(kept.size());
  DenseLayer& layer = out.layers[layer_index];
  Matrix rows(k, w.cols());
  Vector bias(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    rows.row(j) = w.row(static_cast<Eigen::Index>(kept[j]));
    bias[j] = model.layers[layer_index].biases[static_cast<Eigen::Index>(kept[j])];
  }
  layer.weights = std::move(rows);
  layer.biases = std::move(bias);

  for (const Consumer& c : model.arch.consumers(layer_index)) {
    const Matrix& src = model.layers[c.layer].weights;
    const auto off = static_cast<Eigen::Index>(c.offset);
    const Eigen::Index tail = src.cols() - off - static_cast<Eigen::Index>(width);
    Matrix next(src.rows(), src.cols() - static_cast<Eigen::Index>(width) + k);
    next.leftCols(off) = src.leftCols(off);
    for (Eigen::Index j = 0; j < k; ++j) {
      next.col(off + j) = src.col(off + static_cast<Eigen::Index>(kept[j])) * scale[j];
    }
    next.rightCols(tail) = src.rightCols(tail);
    out.layers[c.layer].weights = std::move(next);
  }
  out.arch.widths[layer_index] = kept.size();
  out.provenance.push_back("shrink layer " + std::to_string(layer_index) + " " +
                           std::to_string(width) + "->" + std::to_string(kept.size()) +
                           (u ? " reweighted" : ""));
  return out;
}

ModelPruneResult prune_model(const MlpModel& model, const PruneOptions& options) {
  check_model(model);
  if (options.strategy == Strategy::edge) {
    throw InvalidArgument("prune_model: edge pruning is prune_edges, not a structured strategy");
  }
  if (options.target_width == 0) throw InvalidArgument("prune_model: target width must be >= 1");
  const ArchSpec& arch = model.arch;
  for (std::size_t k = 0; k < arch.depth; ++k) {
    if (!arch.is_frozen(k) && options.target_width > arch.widths[k]) {
      throw InvalidArgument("prune_model: target width " + std::to_string(options.target_width) +
                            " exceeds layer " + std::to_string(k) + " width " +
                            std::to_string(arch.widths[k]));
    }
  }

  const RngStream base(options.seed);
  struct Plan {
    std::size_t layer;
    std::vector<std::size_t> kept;
    std::optional<std::vector<double>> u;
  };
  std::vector<Plan> plans;
  for (std::size_t k = 0; k < arch.depth; ++k) {
    if (arch.is_frozen(k) || arch.widths[k] == options.target_width) continue;
    RngStream rng = base.substream(k);
    Plan p{k, {}, std::nullopt};
    if (options.strategy == Strategy::uniform) {
      p.kept = select_uniform(arch.widths[k], options.target_width, rng);
    } else if (is_importance(options.strategy)) {
      const auto s = compute_importance(model, k);
      const auto& crit = options.strategy == Strategy::importance_in    ? s.w_in
                         : options.strategy == Strategy::importance_out ? s.w_out
                                                                        : s.product;
      p.kept = select_topk(crit, options.target_width);
    } else {
      const auto s = compute_importance(model, k);
      auto sel = coreset_select_distinct(s, options.target_width, options.beta, rng);
      p.kept = std::move(sel.kept);
      if (options.reweight) p.u = std::move(sel.u);
    }
    plans.push_back(std::move(p));
  }

  // Shrinking layer k rewrites only its own rows and its consumers' columns,
  // so applying the plans in order reproduces independent per-layer pruning.
  // w_out(k) is read from layer k+1 rows, which are still untouched here.
  MlpModel out = model;
  for (const Plan& p : plans) out = shrink_layer(out, p.layer, p.kept, p.u);
  out.provenance.push_back("prune_model " + std::string(to_string(options.strategy)) + " width " +
                           std::to_string(options.target_width));

  ModelPruneResult r{std::move(out), {}};
  r.report.strategy = options.strategy;
  r.report.target_width = options.target_width;
  r.report.edges_before = edge_count(model);
  r.report.edges_after = edge_count(r.model);
  r.report.params_before = param_count(model);
  r.report.params_after = param_count(r.model);
  return r;
}

}  // namespace prunefield
