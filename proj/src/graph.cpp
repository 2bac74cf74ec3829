#include "netgrad/graph.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>
#include <string>

namespace netgrad {

std::size_t Graph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& nb : adjacency_) twice += nb.size();
  return twice / 2;
}

std::size_t Graph::max_degree() const {
  std::size_t m = 0;
  for (const auto& nb : adjacency_) m = std::max(m, nb.size());
  return m;
}

std::vector<std::pair<std::size_t, std::size_t>> Graph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t v = 0; v < adjacency_.size(); ++v)
    for (std::size_t u : adjacency_[v])
      if (v < u) out.emplace_back(v, u);
  return out;
}

Graph make_from_edges(std::size_t n,
                      std::span<const std::pair<std::size_t, std::size_t>> edges) {
  if (n == 0) throw std::invalid_argument("graph must have at least one vertex");
  Graph g;
  g.adjacency_.assign(n, {});
  for (const auto& [i, j] : edges) {
    if (i >= n || j >= n) {
      throw std::invalid_argument("edge (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ") has an endpoint outside [0, " +
                                  std::to_string(n) + ")");
    }
    if (i == j)
      throw std::invalid_argument("self-loop at vertex " + std::to_string(i));
    g.adjacency_[i].push_back(j);
    g.adjacency_[j].push_back(i);
  }
  for (auto& nb : g.adjacency_) {
    std::sort(nb.begin(), nb.end());
    nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
  }
  return g;
}

Graph make_cycle(std::size_t n) {
  if (n < 3) throw std::invalid_argument("cycle needs at least 3 vertices");
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return make_from_edges(n, e);
}

Graph make_petersen() {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);            // outer cycle
    e.emplace_back(i, i + 5);                  // spoke
    e.emplace_back(i + 5, 5 + (i + 2) % 5);    // pentagram
  }
  return make_from_edges(10, e);
}

Graph make_complete(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return make_from_edges(n, e);
}

bool is_connected(const Graph& g) {
  if (g.size() == 0) return false;
  std::vector<char> seen(g.size(), 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t v = stack.back();
    stack.pop_back();
    for (std::size_t u : g.neighbors(v)) {
      if (!seen[u]) {
        seen[u] = 1;
        ++reached;
        stack.push_back(u);
      }
    }
  }
  return reached == g.size();
}

Eigen::VectorXd laplacian_spectrum(const Graph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(laplacian(g), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double algebraic_connectivity(const Graph& g) {
  if (g.size() < 2) return 0.0;
  return laplacian_spectrum(g)(1);
}

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool blank(const std::string& s) {
  return s.find_first_not_of(" \t\r\n") == std::string::npos;
}

}  // namespace

Graph parse_edge_list(std::istream& in) {
  std::string raw;
  std::size_t line_no = 0;
  std::size_t n = 0;
  bool have_n = false;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = strip_comment(raw);
    if (blank(line)) continue;
    std::istringstream ss(line);
    auto fail = [&](const std::string& what) {
      throw std::invalid_argument("edge list line " + std::to_string(line_no) + ": " + what);
    };
    if (!have_n) {
      long long v = 0;
      if (!(ss >> v) || v <= 0) fail("expected a positive vertex count");
      std::string rest;
      if (ss >> rest) fail("unexpected token '" + rest + "' after vertex count");
      n = static_cast<std::size_t>(v);
      have_n = true;
      continue;
    }
    long long i = 0, j = 0;
    if (!(ss >> i >> j)) fail("expected two vertex indices");
    std::string rest;
    if (ss >> rest) fail("unexpected token '" + rest + "'");
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= n || static_cast<std::size_t>(j) >= n)
      fail("vertex index out of range [0, " + std::to_string(n) + ")");
    if (i == j) fail("self-loop at vertex " + std::to_string(i));
    edges.emplace_back(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  }
  if (!have_n) throw std::invalid_argument("edge list is empty (missing vertex count)");
  return make_from_edges(n, edges);
}

}  // namespace netgrad
