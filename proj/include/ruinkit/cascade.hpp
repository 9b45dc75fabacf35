#pragma once

#include "ruinkit/tail_diagnostics.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace ruinkit {

enum class CascadeModel { branching, network };
enum class EdgeModel { ring, lattice, complete, random, explicit_edges };

std::string_view to_string(CascadeModel m) noexcept;
std::string_view to_string(EdgeModel m) noexcept;
EdgeModel edge_model_from_string(std::string_view name);

struct NetworkConfig {
  std::size_t nodes = 100;
  EdgeModel edges = EdgeModel::ring;
  double edge_probability = 0.05;  // random graphs only
  std::vector<std::pair<std::size_t, std::size_t>> edge_list;  // explicit_edges only
  double transmission = 0.5;
  // Node -> partition label; edges between different labels never transmit.
  // Empty means a single partition.
  std::vector<int> partition;
};

struct CascadeConfig {
  CascadeModel model = CascadeModel::branching;
  double offspring_mean = 0.5;  // m, Poisson offspring
  std::uint64_t node_cap = 10'000'000;
  NetworkConfig network;
  std::uint64_t replicates = 1000;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CascadeSample {
  std::vector<std::uint64_t> sizes;  // replicate order
  std::uint64_t capped = 0;          // branching runs stopped at node_cap
  CascadeConfig config;
  std::uint64_t seed = 0;
};

// Borel pmf e^{-mn} (mn)^{n-1} / n!, the total-progeny law of a Poisson(m) tree.
double borel_pmf(double m, std::uint64_t n);

// Undirected simple graph as adjacency lists; edge ids index `edges`.
struct Graph {
  std::size_t nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adjacency;  // (neighbour, edge id)
};

Graph build_graph(const NetworkConfig& config, std::uint64_t seed);
// Contiguous equal blocks: node i gets label i * blocks / nodes.
std::vector<int> block_partition(std::size_t nodes, int blocks);

CascadeSample run_branching(const CascadeConfig& config, unsigned threads = 0);
CascadeSample run_network_contagion(const CascadeConfig& config, unsigned threads = 0);
CascadeSample run_cascade(const CascadeConfig& config, unsigned threads = 0);

// Largest component of the graph after removing every edge that crosses partitions.
std::size_t largest_barrier_component(const NetworkConfig& config, std::uint64_t seed);

// max_to_sum (p = 1) and Hill on the sizes, then classification.
TailDiagnosticsReport aggregate_tail_report(const CascadeSample& sample);

}  // namespace ruinkit
