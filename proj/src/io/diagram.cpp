#include "nnstat/io/diagram.hpp"

#include <cstdio>

namespace nnstat::io {

namespace {

bool rejects(const std::optional<WaldResult>& w, double alpha) {
  return w && w->p_value < alpha;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

const char* color(bool significant) {
  return significant ? "black" : "gray";
}

std::string node_line(const DiagramNode& n) {
  return "    " + n.id + " [label=" + quote(n.label) + ", color=" +
         color(n.significant) + ", fontcolor=" + color(n.significant) +
         "];\n";
}

}  // namespace

Diagram make_diagram(const InferenceReport& report,
                     const std::string& response_name, double alpha) {
  const Architecture& a = report.arch;
  Diagram d;
  for (const auto& c : report.covariates) {
    d.inputs.push_back({"x" + std::to_string(c.j), c.name,
                        rejects(c.wald, alpha)});
  }
  for (int k = 1; k <= a.q; ++k) {
    const bool sig = rejects(report.gamma_test(k).wald, alpha);
    d.hidden.push_back({"h" + std::to_string(k), "H" + std::to_string(k), sig});
  }
  d.output = {"y", response_name, true};
  for (int j = 1; j <= a.p; ++j) {
    for (int k = 1; k <= a.q; ++k) {
      const WeightTest& t = report.omega_test(j, k);
      d.edges.push_back({"x" + std::to_string(j), "h" + std::to_string(k),
                         t.label, t.estimate, rejects(t.wald, alpha)});
    }
  }
  for (int k = 1; k <= a.q; ++k) {
    const WeightTest& t = report.gamma_test(k);
    d.edges.push_back({"h" + std::to_string(k), "y", t.label, t.estimate,
                       rejects(t.wald, alpha)});
  }
  return d;
}

std::string emit_dot(const Diagram& d) {
  std::string out = "digraph network {\n";
  out += "  graph [rankdir=LR, splines=line, nodesep=0.3, ranksep=1.5];\n";
  out += "  node [shape=circle, fontname=\"Helvetica\", fontsize=10];\n";
  out += "  edge [arrowsize=0.5];\n";
  out += "  subgraph inputs {\n    rank=same;\n";
  for (const auto& n : d.inputs) out += node_line(n);
  out += "  }\n  subgraph hidden {\n    rank=same;\n";
  for (const auto& n : d.hidden) out += node_line(n);
  out += "  }\n";
  out += "  y [label=" + quote(d.output.label) +
         ", shape=doublecircle, color=black, fontcolor=black];\n";
  for (const auto& e : d.edges) {
    char est[32];
    std::snprintf(est, sizeof(est), "%.2f", e.estimate);
    out += "  " + e.from + " -> " + e.to + " [color=" + color(e.significant) +
           ", tooltip=" + quote(e.weight_label + " = " + est) + "];\n";
  }
  out += "}\n";
  return out;
}

}  // namespace nnstat::io
