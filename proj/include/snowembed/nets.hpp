#pragma once

#include <string>
#include <vector>

#include "snowembed/metric_space.hpp"
#include "snowembed/params.hpp"

namespace snowembed {

enum class NetOrder { input, farthest_point };

const char* net_order_name(NetOrder o);
NetOrder net_order_from_name(const std::string& name);

/// Point enumeration used to seed the greedy nets; the order is part of the
/// construction and is stamped into output metadata.
std::vector<int> enumeration_order(const FiniteMetricSpace& space, NetOrder order);

struct Net {
  int level = 0;
  double radius = 0.0;
  std::vector<int> members;  // enumeration of J_k, in admission order
};

/// Greedy scan admitting a point iff it is >= r from everything admitted:
/// the result is r-separated and maximal.
Net build_net(const FiniteMetricSpace& space, double r, const std::vector<int>& order,
              int level = 0);

struct Coloring {
  std::vector<int> color;  // per net member, colors start at 1
  int max_color = 0;
  double separation = 0.0;   // r_k^theta
  bool budget_grown = false; // practical mode exceeded the budget
};

/// First-fit coloring: the smallest color unused among earlier members within
/// the separation radius. Strict mode throws BudgetExceeded with the witness
/// member; otherwise the budget grows and the coloring is flagged.
Coloring color_net(const FiniteMetricSpace& space, const Net& net, double sep, long long budget,
                   bool strict);

/// Number of net members within the given radius of x.
int neighbor_count(const FiniteMetricSpace& space, const Net& net, int x, double radius);

struct NetHierarchy {
  std::vector<Net> nets;            // levels n0..n in order
  std::vector<Coloring> colorings;
  int n0 = 0;
  int n = 0;
  NetOrder order = NetOrder::input;
  int max_color_used = 0;

  const Net& net_at(int k) const { return nets[static_cast<std::size_t>(k - n0)]; }
  const Coloring& coloring_at(int k) const { return colorings[static_cast<std::size_t>(k - n0)]; }
};

/// Nets and colorings for every level k in [n0, n] at radii r_k = tau^(2k).
NetHierarchy build_hierarchy(const FiniteMetricSpace& space, const EmbeddingParams& params,
                             NetOrder order);

}  // namespace snowembed
