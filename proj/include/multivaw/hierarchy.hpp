#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "multivaw/linalg.hpp"

namespace multivaw {

/// A forest of aggregation constraints: every internal node is the sum of
/// its children.
struct HierarchySpec {
  std::vector<std::string> nodes;                            // declared order
  std::map<std::string, std::vector<std::string>> children;  // ordered child lists
  std::vector<std::string> bottom;                           // childless nodes, declared order

  /// Validates and builds a spec. Throws DuplicateNode, CyclicHierarchy, or
  /// HierarchyError (unknown node, node with two parents).
  static HierarchySpec from_edges(std::vector<std::string> nodes,
                                  const std::vector<std::pair<std::string, std::string>>& edges);

  /// Row order of the summing matrix: aggregated nodes breadth-first from the
  /// roots (roots in declared order), then the bottom nodes.
  std::vector<std::string> ordered_nodes() const;
};

/// Parses {"nodes": [...], "edges": [[parent, child], ...]}.
HierarchySpec parse_hierarchy_json(std::string_view text);
HierarchySpec load_hierarchy(const std::string& path);
std::string hierarchy_to_json(const HierarchySpec& spec);

struct SummingMatrix {
  std::vector<std::string> node_ids;    // one per row
  std::vector<std::string> bottom_ids;  // one per column
  Matrix s;

  Index n() const noexcept { return s.rows(); }
  Index d() const noexcept { return s.cols(); }
  Index row_of(std::string_view id) const;  // -1 when absent
};

/// Row i has a 1 in column j iff bottom node j is node i or one of its
/// descendants.
SummingMatrix build_summing_matrix(const HierarchySpec& spec);

/// Wraps an explicit matrix (grouped or crossed structures). Requires full
/// column rank; throws RankDeficient otherwise.
SummingMatrix summing_matrix_from(Matrix s, std::vector<std::string> node_ids = {},
                                  std::vector<std::string> bottom_ids = {});

struct CoherenceResult {
  bool coherent = false;
  double residual = 0.0;  // |y - P_S y|_2
};

/// tol defaults to 1e-8 * (1 + |y|_2).
CoherenceResult coherence_check(const Matrix& s, const Vector& y, std::optional<double> tol = std::nullopt);

/// Same check with a precomputed projection P_S.
CoherenceResult coherence_check_projected(const Matrix& projection, const Vector& y,
                                          std::optional<double> tol = std::nullopt);

/// The 8-node, 5-leaf two-level tree used throughout the examples and tests:
/// 1 -> {2, 3}, 2 -> {4, 5, 6}, 3 -> {7, 8}.
HierarchySpec two_level_tree();

}  // namespace multivaw
