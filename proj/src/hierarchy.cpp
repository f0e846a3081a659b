#include "multivaw/hierarchy.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace multivaw {

HierarchySpec HierarchySpec::from_edges(std::vector<std::string> nodes,
                                        const std::vector<std::pair<std::string, std::string>>& edges) {
  if (nodes.empty()) throw HierarchyError("hierarchy: no nodes");
  std::set<std::string> known;
  for (const auto& id : nodes) {
    if (id.empty()) throw HierarchyError("hierarchy: empty node id");
    if (!known.insert(id).second) throw DuplicateNode("hierarchy: duplicate node '" + id + "'");
  }

  HierarchySpec spec;
  std::map<std::string, std::string> parent;
  for (const auto& [p, c] : edges) {
    if (!known.count(p)) throw HierarchyError("hierarchy: edge references unknown node '" + p + "'");
    if (!known.count(c)) throw HierarchyError("hierarchy: edge references unknown node '" + c + "'");
    if (p == c) throw CyclicHierarchy("hierarchy: node '" + p + "' is its own child");
    if (parent.count(c)) {
      throw HierarchyError("hierarchy: node '" + c + "' has two parents ('" + parent[c] + "' and '" + p + "')");
    }
    parent[c] = p;
    spec.children[p].push_back(c);
  }

  // With at most one parent per node, any node unreachable from a root lies
  // on a cycle.
  std::set<std::string> reached;
  std::deque<std::string> queue;
  for (const auto& id : nodes) {
    if (!parent.count(id)) {
      queue.push_back(id);
      reached.insert(id);
    }
  }
  while (!queue.empty()) {
    const std::string id = queue.front();
    queue.pop_front();
    auto it = spec.children.find(id);
    if (it == spec.children.end()) continue;
    for (const auto& c : it->second) {
      if (reached.insert(c).second) queue.push_back(c);
    }
  }
  if (reached.size() != nodes.size()) {
    for (const auto& id : nodes) {
      if (!reached.count(id)) throw CyclicHierarchy("hierarchy: node '" + id + "' lies on a cycle");
    }
  }

  for (const auto& id : nodes) {
    if (!spec.children.count(id)) spec.bottom.push_back(id);
  }
  spec.nodes = std::move(nodes);
  return spec;
}

std::vector<std::string> HierarchySpec::ordered_nodes() const {
  std::set<std::string> has_parent;
  for (const auto& [p, kids] : children) {
    for (const auto& c : kids) has_parent.insert(c);
  }
  std::vector<std::string> order;
  std::deque<std::string> queue;
  for (const auto& id : nodes) {
    if (!has_parent.count(id)) queue.push_back(id);
  }
  while (!queue.empty()) {
    const std::string id = queue.front();
    queue.pop_front();
    auto it = children.find(id);
    if (it == children.end()) continue;
    order.push_back(id);
    for (const auto& c : it->second) queue.push_back(c);
  }
  order.insert(order.end(), bottom.begin(), bottom.end());
  return order;
}

HierarchySpec parse_hierarchy_json(std::string_view text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw HierarchyError(std::string("hierarchy: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
    throw HierarchyError("hierarchy: expected an object with a 'nodes' array");
  }
  std::vector<std::string> nodes;
  for (const auto& n : doc["nodes"]) {
    if (!n.is_string()) throw HierarchyError("hierarchy: node ids must be strings");
    nodes.push_back(n.get<std::string>());
  }
  std::vector<std::pair<std::string, std::string>> edges;
  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) throw HierarchyError("hierarchy: 'edges' must be an array");
    for (const auto& e : doc["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
        throw HierarchyError("hierarchy: each edge must be a [parent, child] pair of strings");
      }
      edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
  }
  return HierarchySpec::from_edges(std::move(nodes), edges);
}

HierarchySpec load_hierarchy(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw HierarchyError("hierarchy: cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_hierarchy_json(buffer.str());
}

std::string hierarchy_to_json(const HierarchySpec& spec) {
  nlohmann::ordered_json doc;
  doc["nodes"] = spec.nodes;
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const auto& id : spec.nodes) {
    auto it = spec.children.find(id);
    if (it == spec.children.end()) continue;
    for (const auto& c : it->second) edges.push_back({id, c});
  }
  doc["edges"] = edges;
  return doc.dump(2) + "\n";
}

Index SummingMatrix::row_of(std::string_view id) const {
  auto it = std::find(node_ids.begin(), node_ids.end(), id);
  return it == node_ids.end() ? -1 : static_cast<Index>(it - node_ids.begin());
}

SummingMatrix build_summing_matrix(const HierarchySpec& spec) {
  SummingMatrix out;
  out.node_ids = spec.ordered_nodes();
  out.bottom_ids = spec.bottom;
  const auto n = static_cast<Index>(out.node_ids.size());
  const auto d = static_cast<Index>(out.bottom_ids.size());
  out.s = Matrix::Zero(n, d);

  std::map<std::string, Index> column;
  for (Index j = 0; j < d; ++j) column[out.bottom_ids[static_cast<std::size_t>(j)]] = j;

  for (Index i = 0; i < n; ++i) {
    std::vector<std::string> stack{out.node_ids[static_cast<std::size_t>(i)]};
    while (!stack.empty()) {
      const std::string id = stack.back();
      stack.pop_back();
      auto it = spec.children.find(id);
      if (it == spec.children.end()) {
        out.s(i, column.at(id)) = 1.0;
      } else {
        stack.insert(stack.end(), it->second.begin(), it->second.end());
      }
    }
  }
  return out;
}

SummingMatrix summing_matrix_from(Matrix s, std::vector<std::string> node_ids, std::vector<std::string> bottom_ids) {
  if (!s.allFinite()) throw DimensionMismatch("summing matrix: non-finite entries");
  if (node_ids.empty()) {
    for (Index i = 0; i < s.rows(); ++i) node_ids.push_back(std::to_string(i + 1));
  }
  if (bottom_ids.empty()) {
    for (Index j = 0; j < s.cols(); ++j) bottom_ids.push_back(node_ids[static_cast<std::size_t>(s.rows() - s.cols() + j)]);
  }
  if (static_cast<Index>(node_ids.size()) != s.rows() || static_cast<Index>(bottom_ids.size()) != s.cols()) {
    throw DimensionMismatch("summing matrix: id lists do not match the matrix shape");
  }
  left_pseudo_inverse(s);  // throws RankDeficient
  return SummingMatrix{std::move(node_ids), std::move(bottom_ids), std::move(s)};
}

CoherenceResult coherence_check_projected(const Matrix& projection, const Vector& y, std::optional<double> tol) {
  if (y.size() != projection.rows()) {
    throw DimensionMismatch("coherence_check: response has length " + std::to_string(y.size()) + ", expected " +
                            std::to_string(projection.rows()));
  }
  CoherenceResult out;
  out.residual = (y - projection * y).norm();
  out.coherent = out.residual <= tol.value_or(1e-8 * (1.0 + y.norm()));
  return out;
}

CoherenceResult coherence_check(const Matrix& s, const Vector& y, std::optional<double> tol) {
  if (y.size() != s.rows()) {
    throw DimensionMismatch("coherence_check: response has length " + std::to_string(y.size()) + ", expected " +
                            std::to_string(s.rows()));
  }
  return coherence_check_projected(projection_onto_image(s), y, tol);
}

HierarchySpec two_level_tree() {
  return HierarchySpec::from_edges({"1", "2", "3", "4", "5", "6", "7", "8"},
                                   {{"1", "2"}, {"1", "3"}, {"2", "4"}, {"2", "5"}, {"2", "6"}, {"3", "7"}, {"3", "8"}});
}

}  // namespace multivaw
