#include "ruinkit/cascade.hpp"

#include "ruinkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <string>

namespace ruinkit {

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

bool same_partition(const std::vector<int>& partition, std::size_t a, std::size_t b) {
  return partition.empty() || partition[a] == partition[b];
}

}  // namespace

std::string_view to_string(CascadeModel m) noexcept { return m == CascadeModel::branching ? "branching" : "network"; }

std::string_view to_string(EdgeModel m) noexcept {
  switch (m) {
    case EdgeModel::ring:
      return "ring";
    case EdgeModel::lattice:
      return "lattice";
    case EdgeModel::complete:
      return "complete";
    case EdgeModel::random:
      return "random";
    case EdgeModel::explicit_edges:
      return "explicit";
  }
  return "unknown";
}

EdgeModel edge_model_from_string(std::string_view name) {
  if (name == "ring") return EdgeModel::ring;
  if (name == "lattice") return EdgeModel::lattice;
  if (name == "complete") return EdgeModel::complete;
  if (name == "random") return EdgeModel::random;
  if (name == "explicit") return EdgeModel::explicit_edges;
  throw ConfigError("unknown edge model '" + std::string(name) + "'");
}

void CascadeConfig::validate() const {
  if (replicates < 1) throw ConfigError("replicates must be at least 1");
  if (model == CascadeModel::branching) {
    if (!(offspring_mean >= 0.0) || !std::isfinite(offspring_mean)) {
      throw ConfigError("offspring mean m must be finite and >= 0");
    }
    if (node_cap < 1) throw ConfigError("node cap must be at least 1");
    return;
  }
  const auto& net = network;
  if (net.nodes == 0) throw ConfigError("network has no nodes");
  if (!(net.transmission >= 0.0 && net.transmission <= 1.0)) {
    throw ConfigError("transmission probability must lie in [0,1]");
  }
  if (!net.partition.empty() && net.partition.size() != net.nodes) {
    throw ConfigError("barrier partition must label every node");
  }
  if (net.edges == EdgeModel::lattice) {
    const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(net.nodes))));
    if (side * side != net.nodes) throw ConfigError("lattice needs a square node count");
  }
  if (net.edges == EdgeModel::random && !(net.edge_probability >= 0.0 && net.edge_probability <= 1.0)) {
    throw ConfigError("edge probability must lie in [0,1]");
  }
  for (const auto& [a, b] : net.edge_list) {
    if (a >= net.nodes || b >= net.nodes || a == b) throw ConfigError("explicit edge out of range or self-loop");
  }
}

double borel_pmf(double m, std::uint64_t n) {
  if (!(m > 0.0 && m <= 1.0)) throw DomainError("borel_pmf needs 0 < m <= 1");
  if (n < 1) throw DomainError("borel_pmf needs n >= 1");
  const auto nn = static_cast<double>(n);
  return std::exp(-m * nn + (nn - 1.0) * std::log(m * nn) - std::lgamma(nn + 1.0));
}

std::vector<int> block_partition(std::size_t nodes, int blocks) {
  if (blocks < 1) throw ConfigError("barrier block count must be at least 1");
  std::vector<int> labels(nodes);
  for (std::size_t i = 0; i < nodes; ++i) {
    labels[i] = static_cast<int>(i * static_cast<std::size_t>(blocks) / nodes);
  }
  return labels;
}

Graph build_graph(const NetworkConfig& c, std::uint64_t seed) {
  Graph g;
  g.nodes = c.nodes;
  auto& e = g.edges;
  switch (c.edges) {
    case EdgeModel::ring:
      if (c.nodes == 2) e.emplace_back(0, 1);
      if (c.nodes >= 3) {
        for (std::size_t i = 0; i < c.nodes; ++i) e.emplace_back(i, (i + 1) % c.nodes);
      }
      break;
    case EdgeModel::lattice: {
      const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(c.nodes))));
      for (std::size_t r = 0; r < side; ++r) {
        for (std::size_t col = 0; col < side; ++col) {
          const std::size_t v = r * side + col;
          if (col + 1 < side) e.emplace_back(v, v + 1);
          if (r + 1 < side) e.emplace_back(v, v + side);
        }
      }
      break;
    }
    case EdgeModel::complete:
      for (std::size_t a = 0; a < c.nodes; ++a) {
        for (std::size_t b = a + 1; b < c.nodes; ++b) e.emplace_back(a, b);
      }
      break;
    case EdgeModel::random: {
      Stream st = Stream(seed).child("graph");
      for (std::size_t a = 0; a < c.nodes; ++a) {
        for (std::size_t b = a + 1; b < c.nodes; ++b) {
          if (st.uniform() < c.edge_probability) e.emplace_back(a, b);
        }
      }
      break;
    }
    case EdgeModel::explicit_edges:
      e = c.edge_list;
      break;
  }
  g.adjacency.resize(c.nodes);
  for (std::size_t id = 0; id < e.size(); ++id) {
    g.adjacency[e[id].first].emplace_back(e[id].second, id);
    g.adjacency[e[id].second].emplace_back(e[id].first, id);
  }
  return g;
}

CascadeSample run_branching(const CascadeConfig& config, unsigned threads) {
  config.validate();
  if (config.model != CascadeModel::branching) throw ConfigError("run_branching needs model=branching");
  CascadeSample out{.sizes = std::vector<std::uint64_t>(config.replicates), .capped = 0, .config = config,
                    .seed = config.seed};
  const Stream root = Stream(config.seed).child("branching");
  const auto capped = reduce_blocks<std::uint64_t>(config.replicates, threads, [&](std::uint64_t b, std::uint64_t e) {
    std::uint64_t local_capped = 0;
    for (std::uint64_t r = b; r < e; ++r) {
      Stream st = root.child(r);
      // Generation sizes: Z_{t+1} ~ Poisson(m * Z_t).
      std::uint64_t total = 1;
      std::uint64_t current = 1;
      while (current > 0 && total < config.node_cap) {
        current = st.poisson(config.offspring_mean * static_cast<double>(current));
        total += current;
      }
      if (total >= config.node_cap && current > 0) {
        total = config.node_cap;
        ++local_capped;
      }
      out.sizes[r] = total;
    }
    return local_capped;
  });
  out.capped = std::accumulate(capped.begin(), capped.end(), std::uint64_t{0});
  return out;
}

CascadeSample run_network_contagion(const CascadeConfig& config, unsigned threads) {
  config.validate();
  if (config.model != CascadeModel::network) throw ConfigError("run_network_contagion needs model=network");
  const auto& net = config.network;
  const Graph g = build_graph(net, config.seed);
  CascadeSample out{.sizes = std::vector<std::uint64_t>(config.replicates), .capped = 0, .config = config,
                    .seed = config.seed};
  const Stream root = Stream(config.seed).child("network");
  parallel_blocks(config.replicates, threads, [&](std::uint64_t b, std::uint64_t e, unsigned) {
    std::vector<char> hit(g.nodes, 0);
    std::deque<std::size_t> queue;
    for (std::uint64_t r = b; r < e; ++r) {
      Stream rep = root.child(r);
      // One coin per edge, shared by both directions; the seed node comes from its own child stream.
      const Stream coins = rep.child("edges");
      Stream picker = rep.child("seed");
      std::fill(hit.begin(), hit.end(), 0);
      const auto start = static_cast<std::size_t>(picker.below(g.nodes));
      hit[start] = 1;
      queue.assign(1, start);
      std::uint64_t size = 1;
      while (!queue.empty()) {
        const std::size_t u = queue.front();
        queue.pop_front();
        for (const auto& [v, id] : g.adjacency[u]) {
          if (hit[v] || !same_partition(net.partition, u, v)) continue;
          if (coins.uniform_at(id) < net.transmission) {
            hit[v] = 1;
            ++size;
            queue.push_back(v);
          }
        }
      }
      out.sizes[r] = size;
    }
  });
  return out;
}

CascadeSample run_cascade(const CascadeConfig& config, unsigned threads) {
  return config.model == CascadeModel::branching ? run_branching(config, threads)
                                                 : run_network_contagion(config, threads);
}

std::size_t largest_barrier_component(const NetworkConfig& config, std::uint64_t seed) {
  const Graph g = build_graph(config, seed);
  std::vector<std::size_t> parent(g.nodes);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (const auto& [a, b] : g.edges) {
    if (same_partition(config.partition, a, b)) parent[find_root(parent, a)] = find_root(parent, b);
  }
  std::vector<std::size_t> counts(g.nodes, 0);
  std::size_t best = 0;
  for (std::size_t v = 0; v < g.nodes; ++v) best = std::max(best, ++counts[find_root(parent, v)]);
  return best;
}

TailDiagnosticsReport aggregate_tail_report(const CascadeSample& sample) {
  if (sample.sizes.size() < 1000) throw DomainError("aggregate_tail_report needs at least 1000 cascade sizes");
  std::vector<double> values(sample.sizes.begin(), sample.sizes.end());
  TailDiagnosticsReport report;
  report.moment_order = 1.0;
  report.max_to_sum_path = max_to_sum(values, 1.0);
  report.hill = hill_estimator(values);
  report.tail_class = classify_tail(classification_inputs(report));
  return report;
}

}  // namespace ruinkit
