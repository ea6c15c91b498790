#include "scsc/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "scsc/error.hpp"

namespace scsc {
namespace {

// Exact greedy UPGMA down to two clusters. Each cluster lives in the slot of
// its smallest member; nn/nnd cache every slot's nearest active neighbour so a
// merge costs O(n) plus a rescan of slots whose neighbour disappeared. The
// globally closest pair is taken with ties going to the lexicographically
// smallest (slot, slot) pair.
std::vector<std::size_t> upgma_two_clusters(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> dist(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = std::abs(x[i] - x[j]);
  }
  std::vector<std::size_t> size(n, 1);
  std::vector<char> active(n, 1);
  std::vector<std::size_t> merged_into(n, n);
  std::vector<std::size_t> nn(n, n);
  std::vector<double> nnd(n, std::numeric_limits<double>::infinity());

  auto rescan = [&](std::size_t i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = n;
    const double* row = &dist[i * n];
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && active[j] && row[j] < best) {
        best = row[j];
        best_j = j;
      }
    }
    nn[i] = best_j;
    nnd[i] = best;
  };
  for (std::size_t i = 0; i < n; ++i) rescan(i);

  for (std::size_t remaining = n; remaining > 2; --remaining) {
    std::size_t a = n;
    std::size_t b = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i]) continue;
      const std::size_t lo = std::min(i, nn[i]);
      const std::size_t hi = std::max(i, nn[i]);
      if (nnd[i] < best || (nnd[i] == best && (lo < a || (lo == a && hi < b)))) {
        best = nnd[i];
        a = lo;
        b = hi;
      }
    }
    const double wa = static_cast<double>(size[a]);
    const double wb = static_cast<double>(size[b]);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a || k == b) continue;
      const double d = (wa * dist[a * n + k] + wb * dist[b * n + k]) / (wa + wb);
      dist[a * n + k] = d;
      dist[k * n + a] = d;
    }
    size[a] += size[b];
    active[b] = 0;
    merged_into[b] = a;
    rescan(a);
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == a) continue;
      if (nn[k] == a || nn[k] == b) {
        rescan(k);
      } else {
        const double d = dist[k * n + a];
        if (d < nnd[k] || (d == nnd[k] && a < nn[k])) {
          nn[k] = a;
          nnd[k] = d;
        }
      }
    }
  }

  std::vector<std::size_t> slot(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t s = i;
    while (!active[s]) s = merged_into[s];
    slot[i] = s;
  }
  return slot;
}

}  // namespace

std::vector<std::uint8_t> bifurcate_coordinate(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw ValidationError("bifurcation needs at least two states");
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i])) {
      std::ostringstream msg;
      msg << "coordinate " << i << " is not finite";
      throw ValidationError(msg.str());
    }
  }
  const auto slot = upgma_two_clusters(x);
  // slot[0] == 0 is the cluster holding the lowest index.
  double sum_first = 0.0;
  double sum_second = 0.0;
  std::size_t count_first = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (slot[i] == slot[0]) {
      sum_first += x[i];
      ++count_first;
    } else {
      sum_second += x[i];
    }
  }
  const double mean_first = sum_first / static_cast<double>(count_first);
  const double mean_second = sum_second / static_cast<double>(n - count_first);
  const bool first_is_zero = mean_first <= mean_second;
  std::vector<std::uint8_t> labels(n);
  for (std::size_t i = 0; i < n; ++i) {
    const bool in_first = slot[i] == slot[0];
    labels[i] = (in_first == first_is_zero) ? 0 : 1;
  }
  return labels;
}

std::vector<BitCode> assign_codes(const SpectralBasis& basis, std::size_t depth) {
  if (depth > basis.m()) {
    std::ostringstream msg;
    msg << "code depth " << depth << " exceeds the " << basis.m() << " available eigenvectors";
    throw ValidationError(msg.str());
  }
  std::vector<BitCode> codes(basis.n());
  for (auto& c : codes) c.bits.reserve(depth);
  for (std::size_t k = 0; k < depth; ++k) {
    const auto labels = bifurcate_coordinate(basis.eigenvector(k));
    for (std::size_t i = 0; i < codes.size(); ++i) codes[i].bits.push_back(labels[i] ? '1' : '0');
  }
  return codes;
}

ColoringTree::ColoringTree(std::size_t depth, std::vector<TreeNode> nodes, std::vector<BitCode> codes)
    : depth_(depth), nodes_(std::move(nodes)), codes_(std::move(codes)) {
  if (nodes_.empty() || !nodes_.front().code.bits.empty()) throw ValidationError("tree must start with the root node");
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    auto& node = nodes_[i];
    node.depth = node.code.size();
    node.children.clear();
    node.parent.reset();
    if (node.members.empty()) throw ValidationError("tree node '" + node.code.str() + "' has no members");
    if (node.depth > depth_) throw ValidationError("tree node '" + node.code.str() + "' is deeper than the tree");
    if (!index.emplace(node.code.str(), i).second) throw ValidationError("duplicate tree node '" + node.code.str() + "'");
    if (i == 0) continue;
    const auto parent = index.find(node.code.prefix(node.depth - 1).str());
    if (parent == index.end()) throw ValidationError("tree node '" + node.code.str() + "' has no parent before it");
    node.parent = parent->second;
    nodes_[parent->second].children.push_back(i);
  }
  if (nodes_.front().population() != codes_.size()) throw ValidationError("root must contain every state");
  for (auto& node : nodes_) {
    std::sort(node.children.begin(), node.children.end(),
              [&](std::size_t a, std::size_t b) { return nodes_[a].code < nodes_[b].code; });
    std::size_t total = 0;
    for (std::size_t c : node.children) total += nodes_[c].population();
    if (!node.children.empty() && total != node.population()) {
      throw ValidationError("children of '" + node.code.str() + "' do not partition its members");
    }
    for (std::size_t m : node.members) {
      if (m >= codes_.size() || !codes_[m].starts_with(node.code)) {
        throw ValidationError("member " + std::to_string(m) + " does not carry the code of node '" + node.code.str() + "'");
      }
    }
    node.split = node.children.size() == 2;
  }
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    auto& node = nodes_[i];
    node.converged = !node.split;
    for (std::size_t c : node.children) node.converged = node.converged && nodes_[c].converged;
  }
}

std::optional<std::size_t> ColoringTree::find(const BitCode& code) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].code == code) return i;
  }
  return std::nullopt;
}

std::vector<std::size_t> ColoringTree::level(std::size_t depth) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].depth == depth) out.push_back(i);
  }
  return out;
}

std::vector<std::size_t> ColoringTree::leaves() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& node = nodes_[i];
    if (node.converged && (!node.parent || !nodes_[*node.parent].converged)) out.push_back(i);
  }
  return out;
}

ColoringTree build_tree(const SpectralBasis& basis, const AdjacencyMatrix& a, const TreeOptions& options) {
  if (options.depth < 1) throw ValidationError("tree depth must be at least 1");
  if (basis.n() != a.n()) throw ValidationError("spectral basis and adjacency describe different state counts");
  auto codes = assign_codes(basis, options.depth);
  const std::size_t n = codes.size();

  std::vector<TreeNode> nodes;
  TreeNode root;
  root.members.resize(n);
  for (std::size_t i = 0; i < n; ++i) root.members[i] = i;
  nodes.push_back(std::move(root));

  std::vector<std::size_t> frontier{0};
  for (std::size_t k = 0; k < options.depth; ++k) {
    const auto x = basis.eigenvector(k);
    std::vector<std::size_t> next;
    for (std::size_t idx : frontier) {
      if (nodes[idx].population() < options.min_population) continue;
      const double z = z_value(x, a, nodes[idx].members);
      if (z < options.z_min) continue;
      TreeNode child[2];
      for (std::size_t m : nodes[idx].members) child[codes[m].bits[k] == '1'].members.push_back(m);
      for (std::uint8_t bit = 0; bit < 2; ++bit) {
        if (child[bit].members.empty()) continue;
        child[bit].code = nodes[idx].code.extended(bit);
        child[bit].z_length = z;
        next.push_back(nodes.size());
        nodes.push_back(std::move(child[bit]));
      }
    }
    frontier = std::move(next);
  }
  return ColoringTree(options.depth, std::move(nodes), std::move(codes));
}

DendrogramLayout dendrogram_geometry(const ColoringTree& tree) {
  DendrogramLayout layout;
  const auto& nodes = tree.nodes();
  const double n = static_cast<double>(tree.n());
  layout.segments.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& node = nodes[i];
    BranchSegment seg;
    seg.node = i;
    seg.label = node.code.str();
    seg.population = node.population();
    seg.width = static_cast<double>(node.population()) / n;
    if (node.parent) {
      const auto& parent = nodes[*node.parent];
      seg.from = layout.segments[*node.parent].to;
      const double dx = parent.split ? (node.code.bits.back() == '0' ? -node.z_length : node.z_length) : 0.0;
      seg.to = {seg.from.x + dx, seg.from.y - node.z_length};
    }
    layout.min_corner = {std::min({layout.min_corner.x, seg.to.x}), std::min({layout.min_corner.y, seg.to.y})};
    layout.max_corner = {std::max({layout.max_corner.x, seg.to.x}), std::max({layout.max_corner.y, seg.to.y})};
    layout.segments.push_back(std::move(seg));
  }
  return layout;
}

}  // namespace scsc
