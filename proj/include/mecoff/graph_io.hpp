#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "mecoff/error.hpp"
#include "mecoff/graph.hpp"

namespace mecoff {

inline nlohmann::ordered_json graph_to_json(const TaskGraph& g) {
  nlohmann::ordered_json j;
  if (!g.description().empty()) j["description"] = g.description();
  auto& nodes = j["nodes"] = nlohmann::ordered_json::array();
  for (const auto& m : g.modules()) {
    nlohmann::ordered_json node{{"id", m.id}, {"workload_cycles", m.workload_cycles}};
    if (!m.name.empty()) node["name"] = m.name;
    nodes.push_back(std::move(node));
  }
  auto& edges = j["edges"] = nlohmann::ordered_json::array();
  for (const auto& e : g.edges()) edges.push_back({{"from", e.from}, {"to", e.to}, {"bits", e.bits}});
  return j;
}

namespace detail {

template <class Json>
std::int64_t require_int(const Json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ParseError(where + ": missing key '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ParseError(where + ": key '" + key + "' must be an integer");
  return v.template get<std::int64_t>();
}

inline std::string format_report(const ValidationReport& report) {
  std::ostringstream os;
  for (std::size_t i = 0; i < report.size(); ++i) {
    if (i) os << "; ";
    os << report[i].code << " (" << report[i].detail << ")";
  }
  return os.str();
}

}  // namespace detail

/// Parses and validates a graph document. Throws ParseError on schema or
/// validation failures.
inline TaskGraph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("graph: document must be an object");
  if (!j.contains("nodes") || !j.at("nodes").is_array()) throw ParseError("graph: 'nodes' must be an array");
  if (j.at("nodes").empty()) throw ParseError("graph: 'nodes' must not be empty");
  if (j.contains("edges") && !j.at("edges").is_array()) throw ParseError("graph: 'edges' must be an array");

  std::vector<TaskModule> modules;
  for (const auto& n : j.at("nodes")) {
    TaskModule m;
    m.id = static_cast<NodeId>(detail::require_int(n, "id", "graph node"));
    m.workload_cycles = detail::require_int(n, "workload_cycles", "graph node " + std::to_string(m.id));
    if (n.contains("name")) {
      if (!n.at("name").is_string()) throw ParseError("graph node: 'name' must be a string");
      m.name = n.at("name").get<std::string>();
    }
    modules.push_back(std::move(m));
  }
  std::vector<DataEdge> edges;
  if (j.contains("edges")) {
    for (const auto& e : j.at("edges")) {
      DataEdge d;
      d.from = static_cast<NodeId>(detail::require_int(e, "from", "graph edge"));
      d.to = static_cast<NodeId>(detail::require_int(e, "to", "graph edge"));
      d.bits = detail::require_int(e, "bits", "graph edge");
      edges.push_back(d);
    }
  }
  std::string description;
  if (j.contains("description") && j.at("description").is_string()) description = j.at("description").get<std::string>();

  TaskGraph g(std::move(modules), std::move(edges), std::move(description));
  if (auto report = validate_graph(g); !report.empty()) {
    throw ParseError("graph: invalid DAG: " + detail::format_report(report));
  }
  return g;
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError("'" + path + "': malformed JSON: " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("failed writing '" + path + "'");
}

inline TaskGraph load_graph(const std::string& path) { return graph_from_json(read_json_file(path)); }

inline void save_graph(const TaskGraph& g, const std::string& path) {
  write_text_file(path, graph_to_json(g).dump(2) + "\n");
}

}  // namespace mecoff
