#include <gtest/gtest.h>

#include <boost/random/mersenne_twister.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <sstream>

#include "gathering/graph.hpp"

using namespace gathering;

namespace {

std::vector<PortGraph> sample_graphs() {
  std::vector<PortGraph> gs{build_k2(), build_ring(3), build_ring(7), build_star(4), build_path(5), build_complete(5)};
  for (std::uint64_t seed = 1; seed <= 5; ++seed) gs.push_back(random_connected(8, 7 + seed * 2, seed));
  return gs;
}

void expect_round_trip(const PortGraph& g) {
  for (Node v = 0; v < g.node_count(); ++v)
    for (Port p = 0; p < g.degree(v); ++p) {
      Node u = g.succ(v, p);
      EXPECT_EQ(g.succ(u, g.port(u, v)), v);
      EXPECT_EQ(g.port(u, v), g.back_port(v, p));
    }
}

}  // namespace

TEST(Graph, Degrees) {
  EXPECT_EQ(build_ring(6).degree(3), 2u);
  EXPECT_EQ(build_k2().degree(0), 1u);
  EXPECT_EQ(build_star(4).degree(0), 4u);
  EXPECT_THROW(build_k2().degree(2), GraphError);
}

TEST(Graph, RingPortZeroIsClockwise) {
  auto g = build_ring(9);
  for (Node i = 0; i < 9; ++i) {
    EXPECT_EQ(g.succ(i, 0), (i + 1) % 9);
    EXPECT_EQ(g.succ(i, 1), (i + 8) % 9);
  }
  auto h = build_ring(5, false);
  EXPECT_EQ(h.succ(0, 1), 1u);
  EXPECT_THROW(build_ring(2), GraphError);
}

TEST(Graph, RingsValidate) {
  for (std::size_t s = 3; s <= 64; ++s) expect_round_trip(build_ring(s));
}

TEST(Graph, K2Ports) {
  auto g = build_k2();
  EXPECT_EQ(g.port(0, 1), 0u);
  EXPECT_EQ(g.port(1, 0), 0u);
  EXPECT_THROW(g.succ(0, 1), GraphError);
}

TEST(Graph, RoundTripOnGenerated) {
  for (const auto& g : sample_graphs()) expect_round_trip(g);
}

TEST(Graph, EdgeListErrors) {
  EXPECT_NO_THROW(build_from_edge_list(2, {{0, 0, 1, 0}}));
  EXPECT_THROW(build_from_edge_list(4, {{0, 0, 1, 0}, {2, 0, 3, 0}}), GraphError);
  EXPECT_THROW(build_from_edge_list(3, {{0, 0, 1, 0}, {0, 2, 2, 0}}), GraphError);
  EXPECT_THROW(build_from_edge_list(3, {{0, 0, 1, 0}, {0, 0, 2, 0}}), GraphError);
  EXPECT_THROW(build_from_edge_list(2, {{0, 0, 0, 1}}), GraphError);
  EXPECT_THROW(build_from_edge_list(2, {{0, 0, 1, 0}, {1, 1, 0, 1}}), GraphError);
}

TEST(Graph, RandomConnected) {
  EXPECT_EQ(random_connected(8, 10, 1), random_connected(8, 10, 1));
  auto t = random_connected(5, 4, 7);
  EXPECT_EQ(t.edge_count(), 4u);
  for (auto d : bfs_distances(t, 0)) EXPECT_LT(d, 5u);
  EXPECT_THROW(random_connected(4, 7, 1), GraphError);
  EXPECT_THROW(random_connected(4, 2, 1), GraphError);
  for (std::size_t m = 5; m <= 10; ++m) EXPECT_EQ(random_connected(5, m, m).edge_count(), m);
}

TEST(Graph, FollowPath) {
  auto ring = build_ring(4);
  EXPECT_EQ(follow_path(ring, 3, {}), 3u);
  EXPECT_EQ(follow_path(ring, 0, {0, 1, 0, 1}), 2u);
  try {
    follow_path(ring, 0, {2, 1});
    FAIL();
  } catch (const PathError& e) {
    EXPECT_EQ(e.position, 1u);
    EXPECT_EQ(e.condition, PathError::Condition::ExitPortMissing);
  }
  try {
    follow_path(ring, 0, {0, 1, 0, 0});
    FAIL();
  } catch (const PathError& e) {
    EXPECT_EQ(e.position, 4u);
    EXPECT_EQ(e.condition, PathError::Condition::EntryPortMismatch);
  }
}

// Naive walker: move one port at a time and compare against follow_path.
TEST(Graph, FollowPathAgreesWithWalker) {
  boost::random::mt19937_64 rng(42);
  for (const auto& g : sample_graphs()) {
    for (int trial = 0; trial < 1000; ++trial) {
      boost::random::uniform_int_distribution<Node> start(0, static_cast<Node>(g.node_count() - 1));
      boost::random::uniform_int_distribution<int> len(0, 12);
      Node u = start(rng);
      Node v = u;
      std::vector<Port> path;
      for (int i = len(rng); i > 0; --i) {
        boost::random::uniform_int_distribution<Port> p(0, g.degree(v) - 1);
        Port x = p(rng);
        Node w = g.succ(v, x);
        path.push_back(x);
        path.push_back(g.port(w, v));
        v = w;
      }
      EXPECT_EQ(follow_path(g, u, path), v);
    }
  }
}

TEST(Graph, FileFormat) {
  auto g = random_connected(7, 11, 3);
  std::istringstream in(serialize_graph(g));
  EXPECT_EQ(parse_graph(in), g);

  std::istringstream bad("2 1\n0 0 1\n");
  try {
    parse_graph(bad);
    FAIL();
  } catch (const GraphError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  }
  std::istringstream disconnected("4 2\n0 0 1 0\n2 0 3 0\n");
  EXPECT_THROW(parse_graph(disconnected), GraphError);
}
