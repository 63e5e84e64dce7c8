#pragma once

#include <sstream>
#include <string>

#include "nnefx/coloured.hpp"
#include "nnefx/petri.hpp"

namespace nnefx {

namespace detail {

inline std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

inline const char* item_colour(int index) {
  static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                  "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
  return palette[index % 8];
}

}  // namespace detail

// Places are circles annotated with their initial tokens, transitions are
// bars; arc labels show weights above 1.
inline std::string export_dot(const PetriNet& net) {
  std::ostringstream out;
  out << "digraph \"" << detail::dot_escape(net.name) << "\" {\n";
  out << "  rankdir=LR;\n";
  for (size_t p = 0; p < net.places.size(); ++p) {
    out << "  \"p_" << detail::dot_escape(net.places[p]) << "\" [shape=circle, label=\""
        << detail::dot_escape(net.places[p]);
    if (net.initial[p] > 0) out << "\\n" << net.initial[p];
    out << "\"];\n";
  }
  for (const auto& t : net.transitions) {
    out << "  \"t_" << detail::dot_escape(t.name) << "\" [shape=box, style=filled, fillcolor=black, "
        << "fontcolor=white, height=0.15, label=\"" << detail::dot_escape(t.name) << "\"];\n";
  }
  for (const auto& t : net.transitions) {
    for (int p : t.inputs) {
      out << "  \"p_" << detail::dot_escape(net.places[static_cast<size_t>(p)]) << "\" -> \"t_"
          << detail::dot_escape(t.name) << "\";\n";
    }
    for (auto [p, w] : t.outputs) {
      out << "  \"t_" << detail::dot_escape(t.name) << "\" -> \"p_"
          << detail::dot_escape(net.places[static_cast<size_t>(p)]) << "\"";
      if (w > 1) out << " [label=\"" << w << "\"]";
      out << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

// Coloured variant: transitions and arcs carry their item's colour; sync
// transitions are dashed; arc labels name the colour (and weight when > 1).
inline std::string export_dot(const ColouredPetriNet& net) {
  std::ostringstream out;
  out << "digraph \"" << detail::dot_escape(net.name) << "\" {\n";
  out << "  rankdir=LR;\n";
  for (size_t p = 0; p < net.places.size(); ++p) {
    out << "  \"p_" << detail::dot_escape(net.places[p]) << "\" [shape=circle, label=\""
        << detail::dot_escape(net.places[p]);
    for (int c = 0; c < net.n_colours(); ++c) {
      uint32_t tokens = net.initial[net.slot(static_cast<int>(p), c)];
      if (tokens > 0) out << "\\n" << detail::dot_escape(net.colours[static_cast<size_t>(c)]) << ":" << tokens;
    }
    out << "\"];\n";
  }
  for (const auto& t : net.transitions) {
    out << "  \"t_" << detail::dot_escape(t.name) << "\" [shape=box, height=0.15, style=\""
        << (t.is_sync ? "dashed,filled" : "filled") << "\", fillcolor=\"" << detail::item_colour(t.colour)
        << "\", fontcolor=white, label=\"" << detail::dot_escape(t.name) << "\\n("
        << detail::dot_escape(net.colours[static_cast<size_t>(t.colour)]) << ")\"];\n";
  }
  for (const auto& t : net.transitions) {
    for (auto [p, c] : t.inputs) {
      out << "  \"p_" << detail::dot_escape(net.places[static_cast<size_t>(p)]) << "\" -> \"t_"
          << detail::dot_escape(t.name) << "\" [color=\"" << detail::item_colour(c) << "\", label=\""
          << detail::dot_escape(net.colours[static_cast<size_t>(c)]) << "\"];\n";
    }
    for (auto [p, c, w] : t.outputs) {
      out << "  \"t_" << detail::dot_escape(t.name) << "\" -> \"p_"
          << detail::dot_escape(net.places[static_cast<size_t>(p)]) << "\" [color=\""
          << detail::item_colour(c) << "\", label=\"" << detail::dot_escape(net.colours[static_cast<size_t>(c)]);
      if (w > 1) out << " x" << w;
      out << "\"];\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace nnefx
