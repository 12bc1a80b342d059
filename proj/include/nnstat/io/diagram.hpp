#pragma once

// Graphviz rendering of a fitted network. Input nodes are drawn black when
// the covariate's MP test rejects at alpha, edges are black when the weight's
// SP test rejects at alpha and gray otherwise. Intercepts are not drawn.

#include <string>
#include <vector>

#include "nnstat/inference.hpp"

namespace nnstat::io {

struct DiagramNode {
  std::string id;     // "x1", "h1", "y"
  std::string label;
  bool significant = false;
};

struct DiagramEdge {
  std::string from;
  std::string to;
  std::string weight_label;  // "omega[j,k]" or "gamma[k]"
  double estimate = 0.0;
  bool significant = false;
};

struct Diagram {
  std::vector<DiagramNode> inputs;
  std::vector<DiagramNode> hidden;
  DiagramNode output;
  std::vector<DiagramEdge> edges;
};

// Untestable nodes and edges (NA p-values) are not significant.
Diagram make_diagram(const InferenceReport& report,
                     const std::string& response_name = "y",
                     double alpha = 0.05);

std::string emit_dot(const Diagram& diagram);

inline std::string emit_diagram(const InferenceReport& report,
                                const std::string& response_name = "y",
                                double alpha = 0.05) {
  return emit_dot(make_diagram(report, response_name, alpha));
}

}  // namespace nnstat::io
