#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "netgrad/graph.hpp"

using namespace netgrad;
using Edge = std::pair<std::size_t, std::size_t>;

namespace {

std::vector<double> sorted(const Eigen::VectorXd& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("cycle structure and spectrum") {
  for (std::size_t n : {3u, 4u, 7u, 10u}) {
    const Graph g = make_cycle(n);
    CHECK(g.size() == n);
    CHECK(g.edge_count() == n);
    CHECK(g.max_degree() == 2);
    CHECK(is_connected(g));
    // eigenvalues 2 - 2 cos(2 pi j / n)
    std::vector<double> expect;
    for (std::size_t j = 0; j < n; ++j)
      expect.push_back(2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(j) /
                                            static_cast<double>(n)));
    std::sort(expect.begin(), expect.end());
    const auto got = sorted(laplacian_spectrum(g));
    for (std::size_t j = 0; j < n; ++j) CHECK(got[j] == doctest::Approx(expect[j]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(make_cycle(2), std::invalid_argument);
}

TEST_CASE("four-cycle neighbors") {
  const Graph g = make_cycle(4);
  const auto nb = g.neighbors(0);
  CHECK(std::vector<std::size_t>(nb.begin(), nb.end()) == std::vector<std::size_t>{1, 3});
  CHECK(algebraic_connectivity(g) == doctest::Approx(2.0));
}

TEST_CASE("petersen graph") {
  const Graph g = make_petersen();
  CHECK(g.size() == 10);
  CHECK(g.edge_count() == 15);
  for (std::size_t v = 0; v < 10; ++v) CHECK(g.degree(v) == 3);
  // girth 5: no two adjacent vertices share a neighbor, no two non-adjacent share two
  for (std::size_t u = 0; u < 10; ++u) {
    for (std::size_t v = u + 1; v < 10; ++v) {
      int common = 0;
      for (auto a : g.neighbors(u))
        for (auto b : g.neighbors(v)) common += a == b;
      const auto nu = g.neighbors(u);
      const bool adjacent = std::find(nu.begin(), nu.end(), v) != nu.end();
      CHECK(common == (adjacent ? 0 : 1));
    }
  }
  // strongly regular (10,3,0,1): spectrum {0, 2^5, 5^4}
  const auto spec = sorted(laplacian_spectrum(g));
  CHECK(spec[0] == doctest::Approx(0.0).epsilon(1e-12));
  for (int i = 1; i <= 5; ++i) CHECK(spec[i] == doctest::Approx(2.0));
  for (int i = 6; i <= 9; ++i) CHECK(spec[i] == doctest::Approx(5.0));
}

TEST_CASE("complete graph") {
  const Graph g = make_complete(5);
  CHECK(g.edge_count() == 10);
  const auto spec = sorted(laplacian_spectrum(g));
  CHECK(spec[0] == doctest::Approx(0.0));
  for (int i = 1; i < 5; ++i) CHECK(spec[i] == doctest::Approx(5.0));
}

TEST_CASE("edge construction") {
  const std::vector<Edge> e{{0, 1}, {1, 0}, {1, 2}, {1, 2}};
  const Graph g = make_from_edges(3, e);
  CHECK(g.edge_count() == 2);
  CHECK(g.edges() == std::vector<Edge>{{0, 1}, {1, 2}});
  CHECK_THROWS_AS(make_from_edges(3, std::vector<Edge>{{0, 3}}), std::invalid_argument);
  CHECK_THROWS_AS(make_from_edges(3, std::vector<Edge>{{1, 1}}), std::invalid_argument);

  const Graph split = make_from_edges(4, std::vector<Edge>{{0, 1}, {2, 3}});
  CHECK_FALSE(is_connected(split));
  CHECK(algebraic_connectivity(split) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("laplacian rows sum to zero and match degrees") {
  const Graph g = make_petersen();
  const Eigen::MatrixXd L = laplacian(g);
  CHECK(L.rowwise().sum().cwiseAbs().maxCoeff() == 0.0);
  CHECK((L - L.transpose()).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXf Lf = laplacian<float>(g);
  CHECK(Lf(0, 0) == 3.0f);
}

TEST_CASE("edge list parsing") {
  std::istringstream ok("# square\n4\n0 1\n1 2 # inline\n2 3\n\n3 0\n");
  CHECK(parse_edge_list(ok) == make_cycle(4));

  std::istringstream bad("3\n0 1\n1 x\n");
  try {
    parse_edge_list(bad);
    FAIL("expected a parse error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream range("3\n0 5\n");
  CHECK_THROWS_AS(parse_edge_list(range), std::invalid_argument);
}
