#include <algorithm>
#include <ostream>

#include "wfc/formula.hpp"

namespace wfc {

namespace {

const char* shape_of(NodeKind kind) {
  switch (kind) {
    case NodeKind::True:
    case NodeKind::False:
      return "box";
    case NodeKind::Var:
      return "ellipse";
    case NodeKind::Not:
      return "invtriangle";
    case NodeKind::And:
      return "trapezium";
    case NodeKind::Or:
      return "invtrapezium";
  }
  return "ellipse";
}

std::string label_of(const FormulaNode& n, const Alphabet& alphabet) {
  switch (n.kind) {
    case NodeKind::True:
      return "true";
    case NodeKind::False:
      return "false";
    case NodeKind::Var:
      return alphabet.name(n.var);
    case NodeKind::Not:
      return "NOT";
    case NodeKind::And:
      return "AND";
    case NodeKind::Or:
      return "OR";
  }
  return "?";
}

}  // namespace

// One DOT node per unique-table entry. Gates are grouped into one cluster per
// layer watermark so refinement steps show up as horizontal bands; variables
// and constants stay outside the clusters.
void FormulaStore::write_dot(std::ostream& os, const FormulaDotOptions& options) const {
  std::vector<char> seen(nodes_.size(), 0);
  std::vector<std::uint32_t> stack;
  for (const auto& [label, root] : options.roots) {
    if (root.valid() && !seen[root.index()]) {
      seen[root.index()] = 1;
      stack.push_back(root.index());
    }
  }
  std::vector<std::uint32_t> reachable;
  while (!stack.empty()) {
    const std::uint32_t i = stack.back();
    stack.pop_back();
    reachable.push_back(i);
    for (auto c : nodes_[i].children)
      if (!seen[c.index()]) {
        seen[c.index()] = 1;
        stack.push_back(c.index());
      }
  }
  std::sort(reachable.begin(), reachable.end());

  auto layer_of = [&](std::uint32_t index) -> std::size_t {
    for (std::size_t l = 0; l < options.layer_bounds.size(); ++l)
      if (index < options.layer_bounds[l]) return l;
    return options.layer_bounds.size();
  };

  os << "digraph " << options.graph_name << " {\n";
  os << "  rankdir=BT;\n";
  os << "  node [fontname=\"Helvetica\"];\n";

  // leaves first
  for (auto i : reachable) {
    const FormulaNode& n = nodes_[i];
    if (n.kind == NodeKind::And || n.kind == NodeKind::Or || n.kind == NodeKind::Not) continue;
    os << "  n" << i << " [shape=" << shape_of(n.kind) << ", label=\"" << label_of(n, alphabet_)
       << "\"];\n";
  }

  const std::size_t num_layers = options.layer_bounds.empty() ? 1 : options.layer_bounds.size() + 1;
  for (std::size_t layer = 0; layer < num_layers; ++layer) {
    const bool clustered = !options.layer_bounds.empty();
    if (clustered) {
      os << "  subgraph cluster_layer" << layer << " {\n";
      os << "    style=dashed;\n";
      if (layer < options.layer_labels.size())
        os << "    label=\"" << options.layer_labels[layer] << "\";\n";
    }
    for (auto i : reachable) {
      const FormulaNode& n = nodes_[i];
      if (n.kind != NodeKind::And && n.kind != NodeKind::Or && n.kind != NodeKind::Not) continue;
      if (clustered && layer_of(i) != layer) continue;
      const char* indent = clustered ? "    " : "  ";
      os << indent << "n" << i << " [shape=" << shape_of(n.kind) << ", label=\""
         << label_of(n, alphabet_) << "\"];\n";
    }
    if (clustered) os << "  }\n";
  }

  for (auto i : reachable)
    for (auto c : nodes_[i].children) os << "  n" << c.index() << " -> n" << i << ";\n";

  for (const auto& [label, root] : options.roots) {
    os << "  \"" << label << "\" [shape=plaintext];\n";
    if (root.valid()) os << "  n" << root.index() << " -> \"" << label << "\";\n";
  }
  os << "}\n";
}

}  // namespace wfc
