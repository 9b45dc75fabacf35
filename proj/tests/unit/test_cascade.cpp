#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ruinkit/cascade.hpp"
#include "ruinkit/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

using namespace ruinkit;

namespace {

CascadeConfig branching(double m, std::uint64_t reps, std::uint64_t seed) {
  CascadeConfig c;
  c.model = CascadeModel::branching;
  c.offspring_mean = m;
  c.replicates = reps;
  c.seed = seed;
  return c;
}

double mean_of(const std::vector<std::uint64_t>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Component sizes of the graph with cross-partition edges removed, by depth-first search.
std::multiset<std::size_t> component_sizes(const Graph& g, const std::vector<int>& part) {
  std::vector<int> seen(g.nodes, 0);
  std::multiset<std::size_t> sizes;
  for (std::size_t s = 0; s < g.nodes; ++s) {
    if (seen[s]) continue;
    std::vector<std::size_t> stack = {s};
    seen[s] = 1;
    std::size_t count = 0;
    while (!stack.empty()) {
      const auto u = stack.back();
      stack.pop_back();
      ++count;
      for (const auto& [v, id] : g.adjacency[u]) {
        if (!seen[v] && (part.empty() || part[u] == part[v])) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    sizes.insert(count);
  }
  return sizes;
}

}  // namespace

TEST_CASE("borel pmf normalises") {
  CHECK(borel_pmf(0.5, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(borel_pmf(0.5, 2) == doctest::Approx(std::exp(-1.0) * 1.0 / 2.0).epsilon(1e-14));
  for (int i = 1; i <= 9; ++i) {
    const double m = i / 10.0;
    double sum = 0.0;
    for (std::uint64_t n = 1; n <= 200000; ++n) sum += borel_pmf(m, n);
    CHECK(std::fabs(sum - 1.0) < 1e-9);
  }
  // Critical case: the mass beyond the cap N is about sqrt(2 / (pi N)).
  const std::uint64_t cap = 1'000'000;
  double sum = 0.0;
  for (std::uint64_t n = 1; n <= cap; ++n) sum += borel_pmf(1.0, n);
  CHECK((1.0 - sum) == doctest::Approx(std::sqrt(2.0 / (3.14159265358979 * cap))).epsilon(0.01));
  CHECK_THROWS_AS(borel_pmf(1.5, 3), DomainError);
}

TEST_CASE("branching sizes follow the Borel law") {
  const auto s = run_branching(branching(0.5, 100000, 12));
  std::map<std::uint64_t, std::uint64_t> counts;
  for (auto v : s.sizes) ++counts[v];
  double tv = 0.0, covered = 0.0;
  for (std::uint64_t n = 1; n <= 200; ++n) {
    const double p = borel_pmf(0.5, n);
    covered += p;
    tv += std::fabs(static_cast<double>(counts[n]) / 1e5 - p);
  }
  std::uint64_t beyond = 0;
  for (const auto& [n, c] : counts) beyond += n > 200 ? c : 0;
  tv += std::fabs(static_cast<double>(beyond) / 1e5 - (1.0 - covered));
  CHECK(0.5 * tv < 0.01);
}

TEST_CASE("branching mean is 1/(1-m) within 3 standard errors") {
  for (double m : {0.2, 0.5, 0.8}) {
    const auto s = run_branching(branching(m, 100000, 3));
    const double var = m / std::pow(1.0 - m, 3);  // Borel variance
    CHECK(std::fabs(mean_of(s.sizes) - 1.0 / (1.0 - m)) < 3.0 * std::sqrt(var / 1e5));
  }
}

TEST_CASE("mean size is nondecreasing in m") {
  double prev = 0.0;
  for (double m : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double mean = mean_of(run_branching(branching(m, 20000, 5)).sizes);
    CHECK(mean >= prev);
    prev = mean;
  }
}

TEST_CASE("supercritical runs stop at the node cap") {
  auto c = branching(1.5, 2000, 1);
  c.node_cap = 5000;
  const auto s = run_branching(c);
  CHECK(s.capped > 0);
  for (auto v : s.sizes) CHECK(v <= 5000);
  CHECK(static_cast<std::uint64_t>(std::count(s.sizes.begin(), s.sizes.end(), 5000)) == s.capped);
}

TEST_CASE("branching results do not depend on the thread count") {
  const auto c = branching(0.9, 20000, 8);
  CHECK(run_branching(c, 1).sizes == run_branching(c, 4).sizes);
}

TEST_CASE("network contagion basics") {
  CascadeConfig c;
  c.model = CascadeModel::network;
  c.replicates = 200;
  c.network.nodes = 30;
  c.network.edges = EdgeModel::complete;
  c.network.transmission = 1.0;
  for (auto v : run_network_contagion(c).sizes) CHECK(v == 30);
  c.network.transmission = 0.0;
  for (auto v : run_network_contagion(c).sizes) CHECK(v == 1);
  c.network.edges = EdgeModel::lattice;
  c.network.nodes = 30;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("network size is pathwise nondecreasing in transmission (matched seeds)") {
  CascadeConfig c;
  c.model = CascadeModel::network;
  c.replicates = 2000;
  c.seed = 4;
  c.network.nodes = 400;
  c.network.edges = EdgeModel::random;
  c.network.edge_probability = 0.01;
  std::vector<std::uint64_t> prev(c.replicates, 0);
  for (double t : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
    c.network.transmission = t;
    const auto s = run_network_contagion(c);
    for (std::size_t i = 0; i < prev.size(); ++i) CHECK(s.sizes[i] >= prev[i]);
    prev = s.sizes;
  }
}

TEST_CASE("barrier soundness on every graph with five nodes") {
  const std::size_t n = 5;
  std::vector<std::pair<std::size_t, std::size_t>> all_edges;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) all_edges.emplace_back(a, b);
  }
  const std::vector<std::vector<int>> partitions = {{}, block_partition(n, 2), {0, 1, 0, 1, 0}, {0, 0, 1, 2, 2}};
  for (std::uint32_t mask = 0; mask < (1u << all_edges.size()); ++mask) {
    CascadeConfig c;
    c.model = CascadeModel::network;
    c.replicates = 12;
    c.seed = mask;
    c.network.nodes = n;
    c.network.edges = EdgeModel::explicit_edges;
    for (std::size_t e = 0; e < all_edges.size(); ++e) {
      if ((mask >> e) & 1u) c.network.edge_list.push_back(all_edges[e]);
    }
    for (const auto& part : partitions) {
      c.network.partition = part;
      const auto g = build_graph(c.network, c.seed);
      const auto comps = component_sizes(g, part);
      const std::size_t largest = largest_barrier_component(c.network, c.seed);
      CHECK(largest == *comps.rbegin());
      c.network.transmission = 1.0;
      for (auto v : run_network_contagion(c).sizes) CHECK(comps.count(v) > 0);
      c.network.transmission = 0.6;
      for (auto v : run_network_contagion(c).sizes) CHECK(v <= largest);
    }
  }
}

TEST_CASE("aggregate tail report") {
  auto c = branching(1.0, 20000, 2);
  const auto fat = aggregate_tail_report(run_branching(c));
  REQUIRE(fat.tail_class);
  CHECK(is_fat(*fat.tail_class));
  c.replicates = 10;
  CHECK_THROWS_AS(aggregate_tail_report(run_branching(c)), DomainError);
}
