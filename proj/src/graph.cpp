#include "gathering/graph.hpp"

#include <algorithm>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <deque>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace gathering {

namespace {

constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

template <class T>
void shuffle(std::vector<T>& xs, boost::random::mt19937_64& rng) {
  for (std::size_t i = xs.size(); i > 1; --i) {
    boost::random::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(xs[i - 1], xs[pick(rng)]);
  }
}

}  // namespace

std::size_t PortGraph::edge_count() const {
  std::size_t s = 0;
  for (const auto& a : adj_) s += a.size();
  return s / 2;
}

Port PortGraph::degree(Node v) const {
  if (v >= adj_.size()) throw GraphError("node index " + std::to_string(v) + " out of range");
  return static_cast<Port>(adj_[v].size());
}

Node PortGraph::succ(Node v, Port p) const {
  if (p >= degree(v))
    throw GraphError("invalid port " + std::to_string(p) + " at node " + std::to_string(v));
  return adj_[v][p].to;
}

Port PortGraph::back_port(Node v, Port p) const {
  if (p >= degree(v))
    throw GraphError("invalid port " + std::to_string(p) + " at node " + std::to_string(v));
  return adj_[v][p].back;
}

Port PortGraph::port(Node u, Node v) const {
  degree(v);
  for (Port p = 0; p < degree(u); ++p)
    if (adj_[u][p].to == v) return p;
  throw GraphError("nodes " + std::to_string(u) + " and " + std::to_string(v) + " are not adjacent");
}

std::vector<PortEdge> PortGraph::edges() const {
  std::vector<PortEdge> out;
  for (Node u = 0; u < adj_.size(); ++u)
    for (Port p = 0; p < adj_[u].size(); ++p)
      if (u < adj_[u][p].to) out.push_back({u, p, adj_[u][p].to, adj_[u][p].back});
  return out;
}

PortGraph build_from_edge_list(std::size_t n, const std::vector<PortEdge>& edges) {
  if (n == 0) throw GraphError("graph must have at least one node");
  std::vector<std::vector<std::pair<Port, PortGraph::Half>>> raw(n);
  std::set<std::pair<Node, Node>> seen;
  for (const auto& e : edges) {
    if (e.u >= n || e.v >= n) throw GraphError("edge endpoint out of range");
    if (e.u == e.v) throw GraphError("self-loop at node " + std::to_string(e.u));
    if (!seen.insert(std::minmax(e.u, e.v)).second)
      throw GraphError("multi-edge between " + std::to_string(e.u) + " and " + std::to_string(e.v));
    raw[e.u].push_back({e.pu, {e.v, e.pv}});
    raw[e.v].push_back({e.pv, {e.u, e.pu}});
  }
  PortGraph g;
  g.adj_.resize(n);
  for (Node v = 0; v < n; ++v) {
    auto& r = raw[v];
    std::sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i > 0 && r[i].first == r[i - 1].first)
        throw GraphError("duplicate port " + std::to_string(r[i].first) + " at node " + std::to_string(v));
      if (r[i].first != i)
        throw GraphError("non-contiguous ports at node " + std::to_string(v));
      g.adj_[v].push_back(r[i].second);
    }
  }
  if (n > 1 || !edges.empty()) {
    auto d = bfs_distances(g, 0);
    if (std::find(d.begin(), d.end(), kUnreached) != d.end()) throw GraphError("graph is disconnected");
  }
  return g;
}

PortGraph build_ring(std::size_t size, bool clockwise_port_zero) {
  if (size < 3) throw GraphError("ring size must be at least 3");
  std::vector<PortEdge> es;
  for (Node i = 0; i < size; ++i) {
    Node j = static_cast<Node>((i + 1) % size);
    if (clockwise_port_zero) es.push_back({i, 0, j, 1});
    else es.push_back({i, 1, j, 0});
  }
  return build_from_edge_list(size, es);
}

PortGraph build_k2() { return build_from_edge_list(2, {{0, 0, 1, 0}}); }

PortGraph build_path(std::size_t n) {
  if (n < 2) throw GraphError("path needs at least two nodes");
  std::vector<PortEdge> es;
  for (Node i = 0; i + 1 < n; ++i) es.push_back({i, i == 0 ? 0u : 1u, i + 1, 0});
  return build_from_edge_list(n, es);
}

PortGraph build_star(std::size_t leaves) {
  if (leaves < 1) throw GraphError("star needs at least one leaf");
  std::vector<PortEdge> es;
  for (Node i = 0; i < leaves; ++i) es.push_back({0, i, i + 1, 0});
  return build_from_edge_list(leaves + 1, es);
}

PortGraph build_complete(std::size_t n) {
  if (n < 2) throw GraphError("complete graph needs at least two nodes");
  std::vector<PortEdge> es;
  for (Node u = 0; u < n; ++u)
    for (Node v = u + 1; v < n; ++v) es.push_back({u, v - 1, v, u});
  return build_from_edge_list(n, es);
}

PortGraph random_connected(std::size_t n, std::size_t m, std::uint64_t seed) {
  if (n < 2) throw GraphError("random graph needs at least two nodes");
  if (m < n - 1) throw GraphError("m below n-1: cannot be connected");
  if (m > n * (n - 1) / 2) throw GraphError("m exceeds simple-graph maximum n(n-1)/2");
  boost::random::mt19937_64 rng(seed);

  std::vector<Node> order(n);
  for (Node i = 0; i < n; ++i) order[i] = i;
  shuffle(order, rng);
  std::set<std::pair<Node, Node>> present;
  std::vector<std::pair<Node, Node>> chosen;
  for (std::size_t i = 1; i < n; ++i) {
    boost::random::uniform_int_distribution<std::size_t> pick(0, i - 1);
    auto e = std::minmax(order[i], order[pick(rng)]);
    present.insert(e);
    chosen.push_back(e);
  }
  std::vector<std::pair<Node, Node>> rest;
  for (Node u = 0; u < n; ++u)
    for (Node v = u + 1; v < n; ++v)
      if (!present.count({u, v})) rest.push_back({u, v});
  shuffle(rest, rng);
  chosen.insert(chosen.end(), rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(m - (n - 1)));

  std::vector<std::vector<std::size_t>> incident(n);
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    incident[chosen[i].first].push_back(i);
    incident[chosen[i].second].push_back(i);
  }
  std::vector<PortEdge> es(chosen.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) es[i] = {chosen[i].first, 0, chosen[i].second, 0};
  for (Node v = 0; v < n; ++v) {
    shuffle(incident[v], rng);
    for (Port p = 0; p < incident[v].size(); ++p) {
      auto& e = es[incident[v][p]];
      (e.u == v ? e.pu : e.pv) = p;
    }
  }
  return build_from_edge_list(n, es);
}

PathError::PathError(std::size_t pos, Condition c)
    : GraphError("path invalid at position " + std::to_string(pos) + ": " +
                 (c == Condition::ExitPortMissing    ? "exit port does not exist"
                  : c == Condition::EntryPortMismatch ? "entry port does not match"
                                                      : "odd path length")),
      position(pos),
      condition(c) {}

Node follow_path(const PortGraph& g, Node u, const std::vector<Port>& path) {
  if (path.size() % 2 != 0) throw PathError(path.size(), PathError::Condition::OddLength);
  g.degree(u);
  for (std::size_t i = 0; i < path.size(); i += 2) {
    if (path[i] >= g.degree(u)) throw PathError(i + 1, PathError::Condition::ExitPortMissing);
    Port back = g.back_port(u, path[i]);
    u = g.succ(u, path[i]);
    if (back != path[i + 1]) throw PathError(i + 2, PathError::Condition::EntryPortMismatch);
  }
  return u;
}

std::vector<std::size_t> bfs_distances(const PortGraph& g, Node source) {
  std::vector<std::size_t> d(g.node_count(), kUnreached);
  std::deque<Node> q{source};
  d[source] = 0;
  while (!q.empty()) {
    Node v = q.front();
    q.pop_front();
    for (Port p = 0; p < g.degree(v); ++p) {
      Node w = g.succ(v, p);
      if (d[w] == kUnreached) {
        d[w] = d[v] + 1;
        q.push_back(w);
      }
    }
  }
  return d;
}

PortGraph parse_graph(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  auto next = [&](std::istringstream& ss) {
    while (std::getline(in, line)) {
      ++lineno;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      ss = std::istringstream(line);
      return true;
    }
    return false;
  };
  auto fail = [&](const std::string& why) {
    throw GraphError("line " + std::to_string(lineno) + ": " + why);
  };
  std::istringstream ss;
  if (!next(ss)) throw GraphError("empty graph file");
  long long n = -1, m = -1;
  std::string extra;
  if (!(ss >> n >> m) || (ss >> extra)) fail("expected `n m`");
  if (n < 1 || m < 0) fail("n must be positive and m non-negative");
  std::vector<PortEdge> es;
  for (long long i = 0; i < m; ++i) {
    if (!next(ss)) throw GraphError("expected " + std::to_string(m) + " edge lines, got " + std::to_string(i));
    long long u, pu, v, pv;
    if (!(ss >> u >> pu >> v >> pv) || (ss >> extra)) fail("expected `u p_u v p_v`");
    if (u < 0 || v < 0 || pu < 0 || pv < 0) fail("negative value");
    if (u >= n || v >= n) fail("node index out of range");
    es.push_back({static_cast<Node>(u), static_cast<Port>(pu), static_cast<Node>(v), static_cast<Port>(pv)});
  }
  if (next(ss)) fail("trailing content after edge list");
  try {
    return build_from_edge_list(static_cast<std::size_t>(n), es);
  } catch (const GraphError& e) {
    throw GraphError(std::string("invalid graph: ") + e.what());
  }
}

PortGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open graph file " + path);
  return parse_graph(in);
}

std::string serialize_graph(const PortGraph& g) {
  std::ostringstream out;
  auto es = g.edges();
  out << g.node_count() << ' ' << es.size() << '\n';
  for (const auto& e : es) out << e.u << ' ' << e.pu << ' ' << e.v << ' ' << e.pv << '\n';
  return out.str();
}

}  // namespace gathering
