#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scsc/adjacency.hpp"
#include "scsc/spectral.hpp"

namespace scsc {

/// Binary code of a state or branch; character k is the bit from eigenvector
/// k (leading bit from the largest eigenvalue).
struct BitCode {
  std::string bits;

  std::size_t size() const noexcept { return bits.size(); }
  bool starts_with(const BitCode& prefix) const { return bits.starts_with(prefix.bits); }
  BitCode prefix(std::size_t length) const { return {bits.substr(0, length)}; }
  BitCode extended(std::uint8_t bit) const { return {bits + (bit ? '1' : '0')}; }
  const std::string& str() const noexcept { return bits; }

  friend auto operator<=>(const BitCode&, const BitCode&) = default;
};

struct TreeNode {
  BitCode code;
  std::vector<std::size_t> members;  // ascending state indices, never empty
  double z_length = 0.0;             // branch length from the parent split
  std::size_t depth = 0;
  bool converged = false;  // no deeper level splits this node's states
  bool split = false;      // both children occupied
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;  // 0-child first

  std::size_t population() const noexcept { return members.size(); }

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

class ColoringTree {
 public:
  ColoringTree() = default;
  /// `nodes` must be in breadth-first order with the root first. Depth,
  /// parent/child links and the split/converged flags are rebuilt from the
  /// codes; member sets are checked to partition each parent.
  ColoringTree(std::size_t depth, std::vector<TreeNode> nodes, std::vector<BitCode> codes);

  std::size_t depth() const noexcept { return depth_; }
  std::size_t n() const noexcept { return codes_.size(); }
  const TreeNode& root() const { return nodes_.front(); }
  const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
  const TreeNode& node(std::size_t index) const { return nodes_.at(index); }
  const std::vector<BitCode>& codes() const noexcept { return codes_; }

  /// Index of the node with this code, if materialized.
  std::optional<std::size_t> find(const BitCode& code) const;
  /// Materialized nodes at one depth, in code order.
  std::vector<std::size_t> level(std::size_t depth) const;
  /// Converged branches: converged nodes whose parent still splits. These are
  /// the clusters read off the dendrogram.
  std::vector<std::size_t> leaves() const;

  friend bool operator==(const ColoringTree&, const ColoringTree&) = default;

 private:
  std::size_t depth_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<BitCode> codes_;
};

/// Two-cluster cut of an exact average-linkage (UPGMA) dendrogram over the
/// 1-D distances |x_i - x_j|. Label 0 goes to the cluster with the smaller
/// mean coordinate.
std::vector<std::uint8_t> bifurcate_coordinate(std::span<const double> x);

/// Per-state codes for the first `depth` eigenvectors; each bit is a global
/// bifurcation over all states.
std::vector<BitCode> assign_codes(const SpectralBasis& basis, std::size_t depth);

struct TreeOptions {
  std::size_t depth = 7;
  std::size_t min_population = 1;
  double z_min = 0.0;
};

ColoringTree build_tree(const SpectralBasis& basis, const AdjacencyMatrix& a, const TreeOptions& options = {});

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// One dendrogram branch: the segment from the parent junction to this node.
struct BranchSegment {
  std::size_t node = 0;
  std::string label;
  Point from;
  Point to;
  double width = 0.0;  // population / n
  std::size_t population = 0;
};

struct DendrogramLayout {
  std::vector<BranchSegment> segments;  // breadth-first, root first (zero length)
  Point min_corner;
  Point max_corner;
};

/// Splits draw 45-degree branches whose horizontal and vertical extent both
/// equal the child's z length (child 0 toward -x); single-child levels drop
/// straight down by their z length.
DendrogramLayout dendrogram_geometry(const ColoringTree& tree);

}  // namespace scsc
