#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "oracles.hpp"
#include "scsc/error.hpp"
#include "scsc/spectral.hpp"
#include "scsc/tree.hpp"

using namespace scsc;

namespace {

AdjacencyMatrix adjacency(const oracle::Dense& d) {
  Matrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    for (std::size_t j = 0; j < d.size(); ++j) m(i, j) = d[i][j];
  return validate_adjacency(m);
}

SpectralBasis basis_from(const std::vector<std::vector<double>>& vecs) {
  const std::size_t n = vecs.front().size();
  Matrix m(vecs.size(), n);
  std::vector<double> values;
  for (std::size_t k = 0; k < vecs.size(); ++k) {
    for (std::size_t i = 0; i < n; ++i) m(k, i) = vecs[k][i];
    values.push_back(1.0 - 0.1 * static_cast<double>(k));
  }
  return SpectralBasis(values, m, std::vector<double>(n, 1.0));
}

std::vector<int> as_int(const std::vector<std::uint8_t>& v) { return {v.begin(), v.end()}; }

// Member sets present at one depth, independent of labels.
std::set<std::vector<std::size_t>> partition_at(const ColoringTree& t, std::size_t depth) {
  std::set<std::vector<std::size_t>> out;
  for (auto i : t.level(depth)) out.insert(t.node(i).members);
  return out;
}

ColoringTree two_leaf_tree(double z) {
  TreeNode root, c0, c1;
  root.members = {0, 1};
  c0.code = {"0"};
  c0.members = {0};
  c0.z_length = z;
  c1.code = {"1"};
  c1.members = {1};
  c1.z_length = z;
  return ColoringTree(1, {root, c0, c1}, {BitCode{"0"}, BitCode{"1"}});
}

}  // namespace

TEST_CASE("bifurcation on hand examples") {
  CHECK(as_int(bifurcate_coordinate(std::vector<double>{0, 0.1, 10, 10.1})) == std::vector<int>{0, 0, 1, 1});
  CHECK(as_int(bifurcate_coordinate(std::vector<double>{1, -1})) == std::vector<int>{1, 0});
  CHECK(as_int(bifurcate_coordinate(std::vector<double>{5, 5})) == std::vector<int>{0, 1});
  CHECK(as_int(bifurcate_coordinate(std::vector<double>{3, 0, 0.2, 2.9, 3.1})) == std::vector<int>{1, 0, 0, 1, 1});
  CHECK_THROWS_AS(bifurcate_coordinate(std::vector<double>{1}), ValidationError);
  CHECK_THROWS_AS(bifurcate_coordinate(std::vector<double>{1, std::nan("")}), ValidationError);
}

TEST_CASE("bifurcation matches a textbook average-linkage implementation") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-1, 1);
  for (int rep = 0; rep < 150; ++rep) {
    const std::size_t n = 2 + rep % 45;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rep % 3 == 0 ? u(rng) : g(rng) + (i % 3 == 0 ? 3.0 : 0.0);
    CHECK(as_int(bifurcate_coordinate(x)) == oracle::naive_upgma_bisect(x));
  }
}

TEST_CASE("block matrix first bifurcation") {
  const auto a = adjacency(oracle::block4());
  const SpectralBasis b = solve_generalized(a, 4);
  CHECK(as_int(bifurcate_coordinate(b.eigenvector(0))) == std::vector<int>{1, 1, 0, 0});
  const ColoringTree t = build_tree(b, a, {1, 1, 0.0});
  REQUIRE(t.level(1).size() == 2);
  CHECK(t.node(t.level(1)[0]).members == std::vector<std::size_t>{2, 3});
  CHECK(t.node(t.level(1)[1]).members == std::vector<std::size_t>{0, 1});
  CHECK(t.leaves().size() == 2);
  CHECK(t.root().split);
}

TEST_CASE("crossing and aligned splits") {
  const auto a = adjacency(oracle::block4());
  const SpectralBasis crossing = basis_from({{-1, -1, 1, 1}, {-1, 1, -1, 1}});
  const auto codes = assign_codes(crossing, 2);
  CHECK(codes[0].str() == "00");
  CHECK(codes[1].str() == "01");
  CHECK(codes[2].str() == "10");
  CHECK(codes[3].str() == "11");

  const SpectralBasis aligned = basis_from({{-1, -1, 1, 1}, {-2, -2, 2, 2}});
  const ColoringTree t = build_tree(aligned, a, {2, 1, 0.0});
  std::vector<std::string> level2;
  for (auto i : t.level(2)) level2.push_back(t.node(i).code.str());
  CHECK(level2 == std::vector<std::string>{"00", "11"});
  const auto leaves = t.leaves();
  REQUIRE(leaves.size() == 2);
  CHECK(t.node(leaves[0]).code.str() == "0");
  CHECK(t.node(leaves[1]).code.str() == "1");
  CHECK(t.node(leaves[0]).converged);
  CHECK(!t.node(leaves[0]).split);
  CHECK(!t.root().converged);
  CHECK_THROWS_AS(assign_codes(aligned, 3), ValidationError);
}

TEST_CASE("tree invariants on a random adjacency") {
  std::mt19937_64 rng(6);
  const auto d = oracle::random_adjacency(60, rng);
  const auto a = adjacency(d);
  const SpectralBasis b = solve_generalized(a, 6);
  const ColoringTree t = build_tree(b, a, {6, 1, 0.0});
  for (std::size_t depth = 0; depth <= 6; ++depth) {
    std::vector<int> seen(60, 0);
    for (auto i : t.level(depth))
      for (auto m : t.node(i).members) ++seen[m];
    for (int s : seen) CHECK(s == 1);
  }
  for (std::size_t depth = 1; depth <= 6; ++depth) {
    std::set<std::string> truncated, above;
    for (auto i : t.level(depth)) truncated.insert(t.node(i).code.prefix(depth - 1).str());
    for (auto i : t.level(depth - 1)) above.insert(t.node(i).code.str());
    CHECK(truncated == above);
  }
  for (std::size_t k = 0; k < 6; ++k) {
    const auto x = b.eigenvector(k);
    double s[2] = {0, 0};
    std::size_t c[2] = {0, 0};
    for (std::size_t i = 0; i < 60; ++i) {
      const int bit = t.codes()[i].bits[k] == '1';
      s[bit] += x[i];
      ++c[bit];
    }
    if (c[0] && c[1]) CHECK(s[0] / c[0] <= s[1] / c[1]);
  }
  for (const auto& node : t.nodes()) {
    if (!node.parent) continue;
    const auto& parent = t.node(*node.parent);
    const auto x = b.eigenvector(node.depth - 1);
    std::vector<double> xv(x.begin(), x.end());
    CHECK(node.z_length == doctest::Approx(oracle::naive_z(xv, d, parent.members)).epsilon(1e-10));
  }
  CHECK(build_tree(b, a, {6, 1, 0.0}) == t);
}

TEST_CASE("flipping an eigenvector sign keeps every partition") {
  std::mt19937_64 rng(31);
  const auto a = adjacency(oracle::random_adjacency(40, rng));
  const SpectralBasis b = solve_generalized(a, 4);
  for (std::size_t flip = 0; flip < 4; ++flip) {
    Matrix v(4, 40);
    for (std::size_t k = 0; k < 4; ++k)
      for (std::size_t i = 0; i < 40; ++i) v(k, i) = (k == flip ? -1.0 : 1.0) * b.value(i, k);
    const SpectralBasis flipped(b.eigenvalues(), v, b.degrees());
    const ColoringTree t1 = build_tree(b, a, {4, 1, 0.0});
    const ColoringTree t2 = build_tree(flipped, a, {4, 1, 0.0});
    for (std::size_t depth = 1; depth <= 4; ++depth) CHECK(partition_at(t1, depth) == partition_at(t2, depth));
  }
}

TEST_CASE("min_population and z_min stop splitting") {
  std::mt19937_64 rng(12);
  const auto a = adjacency(oracle::random_adjacency(30, rng));
  const SpectralBasis b = solve_generalized(a, 3);
  const ColoringTree whole = build_tree(b, a, {3, 31, 0.0});
  CHECK(whole.nodes().size() == 1);
  CHECK(whole.root().converged);
  CHECK(whole.leaves() == std::vector<std::size_t>{0});

  const ColoringTree full = build_tree(b, a, {3, 1, 0.0});
  const double first_z = full.node(full.level(1)[0]).z_length;
  const ColoringTree stopped = build_tree(b, a, {3, 1, first_z * 1.0001});
  CHECK(stopped.nodes().size() == 1);

  const ColoringTree capped = build_tree(b, a, {3, 10, 0.0});
  for (const auto& node : capped.nodes()) {
    if (!node.children.empty()) CHECK(node.population() >= 10);
  }
}

TEST_CASE("tree constructor rejects inconsistent input") {
  std::vector<BitCode> codes{{"0"}, {"1"}};
  TreeNode root;
  root.members = {0, 1};
  TreeNode c0;
  c0.code = {"0"};
  c0.members = {0};
  TreeNode c1;
  c1.code = {"1"};
  c1.members = {1};
  CHECK_NOTHROW(ColoringTree(1, {root, c0, c1}, codes));
  TreeNode wrong = c1;
  wrong.members = {0};
  CHECK_THROWS_AS(ColoringTree(1, {root, c0, wrong}, codes), ValidationError);
  TreeNode orphan;
  orphan.code = {"10"};
  orphan.members = {1};
  CHECK_THROWS_AS(ColoringTree(1, {root, c0, c1, orphan}, codes), ValidationError);
  CHECK_THROWS_AS(ColoringTree(1, {c0}, codes), ValidationError);
}

TEST_CASE("dendrogram geometry") {
  // Hand-built two-leaf tree with z_length 4, the z of x = (1, -1) on the
  // 2-state graph. The solver's D-normalised vector gives z = lambda = 2.
  const auto a = adjacency({{0, 1}, {1, 0}});
  const ColoringTree solved = build_tree(solve_generalized(a, 1), a, {1, 1, 0.0});
  CHECK(solved.node(1).z_length == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(solved.node(2).z_length == solved.node(1).z_length);
  const ColoringTree t = two_leaf_tree(4.0);
  const auto layout = dendrogram_geometry(t);
  REQUIRE(layout.segments.size() == 3);
  const auto& s0 = layout.segments[1];
  const auto& s1 = layout.segments[2];
  CHECK(s0.label == "0");
  CHECK(s0.from == Point{0, 0});
  CHECK(s0.to.x == doctest::Approx(-4.0));
  CHECK(s0.to.y == doctest::Approx(-4.0));
  CHECK(s1.to.x == doctest::Approx(4.0));
  CHECK(s1.to.y == doctest::Approx(-4.0));
  CHECK(s0.width == 0.5);
  CHECK(layout.min_corner.x == doctest::Approx(-4.0));
  CHECK(layout.max_corner.x == doctest::Approx(4.0));

  // Aligned splits: level 2 is a straight vertical drop.
  const auto a4 = adjacency(oracle::block4());
  const ColoringTree aligned = build_tree(basis_from({{-1, -1, 1, 1}, {-2, -2, 2, 2}}), a4, {2, 1, 0.0});
  const auto lay = dendrogram_geometry(aligned);
  for (const auto& seg : lay.segments) {
    if (seg.label.size() == 2) {
      CHECK(seg.to.x == seg.from.x);
      CHECK(seg.from.y - seg.to.y == doctest::Approx(aligned.node(seg.node).z_length));
    }
    if (seg.label.size() == 1) CHECK(std::abs(seg.to.x - seg.from.x) == doctest::Approx(seg.from.y - seg.to.y));
  }

  // No split at all: everything on the vertical axis, full width.
  std::mt19937_64 rng(1);
  const auto ar = adjacency(oracle::random_adjacency(10, rng));
  const ColoringTree single = build_tree(solve_generalized(ar, 1), ar, {1, 11, 0.0});
  const auto sl = dendrogram_geometry(single);
  CHECK(sl.segments.size() == 1);
  CHECK(sl.segments[0].width == 1.0);
}
