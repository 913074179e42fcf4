#pragma once

#include <cstdint>
#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace gathering {

using Node = std::uint32_t;
using Port = std::uint32_t;

class GraphError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct PortEdge {
  Node u;
  Port pu;
  Node v;
  Port pv;
};

// Anonymous port-labeled graph. Node indices are simulator-side only.
class PortGraph {
public:
  struct Half {
    Node to;
    Port back;
    bool operator==(const Half&) const = default;
  };

  PortGraph() = default;

  std::size_t node_count() const { return adj_.size(); }
  std::size_t edge_count() const;
  Port degree(Node v) const;
  Node succ(Node v, Port p) const;
  Port port(Node u, Node v) const;
  // Port at succ(v,p) leading back to v.
  Port back_port(Node v, Port p) const;

  std::vector<PortEdge> edges() const;
  bool operator==(const PortGraph&) const = default;

  friend PortGraph build_from_edge_list(std::size_t n, const std::vector<PortEdge>& edges);

private:
  std::vector<std::vector<Half>> adj_;
};

PortGraph build_from_edge_list(std::size_t n, const std::vector<PortEdge>& edges);
PortGraph build_ring(std::size_t size, bool clockwise_port_zero = true);
PortGraph build_k2();
PortGraph build_path(std::size_t n);
PortGraph build_star(std::size_t leaves);
PortGraph build_complete(std::size_t n);
PortGraph random_connected(std::size_t n, std::size_t m, std::uint64_t seed);

struct PathError : GraphError {
  enum class Condition { ExitPortMissing, EntryPortMismatch, OddLength };
  PathError(std::size_t position, Condition c);
  std::size_t position;  // 1-based index into the path
  Condition condition;
};

// Ports y_1..y_2k, alternately taken and expected on arrival.
Node follow_path(const PortGraph& g, Node u, const std::vector<Port>& path);

std::vector<std::size_t> bfs_distances(const PortGraph& g, Node source);

PortGraph parse_graph(std::istream& in);
PortGraph load_graph(const std::string& path);
std::string serialize_graph(const PortGraph& g);

}  // namespace gathering
