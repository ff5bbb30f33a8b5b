#pragma once

#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "snowembed/metric_space.hpp"
#include "snowembed/nets.hpp"
#include "snowembed/params.hpp"

namespace snowembed {

/// Tent function phi_j(x) = max{0, 1 - dist(x, B_j)/r_k}: 1 on B_j, 0 outside
/// 2B_j, Lipschitz with constant 1/r_k.
double bump(const FiniteMetricSpace& space, const Net& net, int member_pos, int x);

/// Per-level bump values, member_pos x point; shared across all color maps.
using BumpTable = Eigen::MatrixXd;
std::vector<BumpTable> make_bump_tables(const FiniteMetricSpace& space, const NetHierarchy& h);

/// Lazy enumeration of the cubic lattice with spacing 7 tau^3 inside the ball
/// of radius tau^2, ordered by (norm, lexicographic). Only the consumed
/// prefix is ever materialized; the full lattice is usually astronomical.
class CandidateStream {
 public:
  CandidateStream(int dim, double tau);

  /// i-th candidate, or nullptr once the lattice is exhausted.
  const Eigen::VectorXd* get(std::size_t i);

  /// True when the lattice holds at least n points. A closed-form inscribed
  /// cube count answers the large cases without enumerating.
  bool has_at_least(std::size_t n);

  std::size_t enumerated() const { return emitted_.size(); }
  bool exhausted() const { return exhausted_; }
  double spacing() const { return spacing_; }

 private:
  bool advance();

  int dim_;
  double tau_;
  double spacing_;
  double limit_sq_;  // (tau^2)^2, membership bound on squared norms
  std::vector<Eigen::VectorXd> emitted_;
  using Key = std::pair<long long, std::vector<int>>;  // (integer norm^2, coords)
  std::priority_queue<Key, std::vector<Key>, std::greater<Key>> heap_;
  std::set<std::vector<int>> seen_;
  bool exhausted_ = false;
};

/// Materializes needed+1 candidates or throws LatticeExhausted with the count.
std::vector<Eigen::VectorXd> candidate_vectors(int dim, double tau, std::size_t needed);

struct DenseSubsets {
  std::vector<int> E1;  // all points of B_j
  std::vector<int> E2;  // all points of B(x_j, 10 tau^-2 r_k) minus 2B_j
};
DenseSubsets dense_subsets(const FiniteMetricSpace& space, const Net& net, int member_pos,
                           double tau);

struct SelectionResult {
  Eigen::VectorXd v;
  std::size_t candidate_index = 0;
  std::size_t killed = 0;  // candidates eliminated before the accepted one
};

/// First candidate v with |F_prev(x') + rk_eps * v - G(y')| >= threshold for
/// every pair; f_prev/g are aligned with E1/E2. Throws SelectionFailed (or
/// LatticeExhausted when the stream runs dry too early).
SelectionResult select_vector(const std::vector<Eigen::VectorXd>& f_prev,
                              const std::vector<Eigen::VectorXd>& g, CandidateStream& candidates,
                              double rk_eps, double threshold);

/// Same selection over an explicit candidate list.
SelectionResult select_vector(const std::vector<Eigen::VectorXd>& f_prev,
                              const std::vector<Eigen::VectorXd>& g,
                              const std::vector<Eigen::VectorXd>& candidates, double rk_eps,
                              double threshold);

enum class MapOrder { forward, reverse };
const char* map_order_name(MapOrder o);

/// One coordinate map F^xi (or its reversed-order variant): the vectors
/// v_j^k chosen per level for the members of one color class.
struct CoordinateMap {
  int color = 0;
  MapOrder order = MapOrder::forward;
  // Per level (index k - n0): (member_pos, vector), sorted by member_pos so
  // evaluation always sums in one fixed order.
  std::vector<std::vector<std::pair<int, Eigen::VectorXd>>> selected;
};

/// F^xi_k(x): sum over levels n0..k of r_l^eps sum_j v_j phi_j(x). Pass
/// tables from make_bump_tables to avoid recomputing bumps.
Eigen::VectorXd evaluate_partial(const FiniteMetricSpace& space, const NetHierarchy& h,
                                 const EmbeddingParams& params, const CoordinateMap& map, int x,
                                 int k, const std::vector<BumpTable>* tables = nullptr);

/// G^xi_{k,j}(y): the level-k partial sum over members processed before
/// member_pos in the map's order, on top of F^xi_{k-1}(y).
Eigen::VectorXd evaluate_G(const FiniteMetricSpace& space, const NetHierarchy& h,
                           const EmbeddingParams& params, const CoordinateMap& map, int k,
                           int member_pos, int y, const std::vector<BumpTable>* tables = nullptr);

struct SelectionRecord {
  int color = 0;
  MapOrder order = MapOrder::forward;
  int level = 0;
  int member_pos = 0;   // position within the net at this level
  std::size_t pairs = 0;
  std::size_t killed = 0;
  std::size_t candidate_index = 0;
  bool lattice_checked = false;  // strict precheck |V| > |E1||E2| ran and held
};

struct BuildOptions {
  NetOrder net_order = NetOrder::input;
  bool surrogate_threshold = false;  // use 3 tau^3 r_k^eps instead of tau^3 r_k^eps
  int threads = 1;
  std::uint64_t seed = 0;            // provenance only; construction is deterministic
  double normalization_scale = 1.0;
};

struct EmbeddingMetadata {
  std::string net_order;
  std::string mode;
  std::uint64_t seed = 0;
  std::uint64_t space_hash = 0;
  double normalization_scale = 1.0;
  bool surrogate_threshold = false;
  bool budget_grown = false;
  std::string rng;
};

struct Embedding {
  Eigen::MatrixXd coords;  // one row per point, 2 * N_colors * M columns
  EmbeddingParams params;
  EmbeddingMetadata metadata;
};

struct EmbeddingBuild {
  Embedding embedding;
  NetHierarchy hierarchy;
  std::vector<BumpTable> bump_tables;
  std::vector<CoordinateMap> maps;          // built colors only, forward then reverse
  std::vector<SelectionRecord> selections;  // in construction order
};

/// Builds one coordinate map by running the inductive vector selection.
CoordinateMap build_color_map(const FiniteMetricSpace& space, const NetHierarchy& h,
                              const EmbeddingParams& params, int color, MapOrder order,
                              bool surrogate_threshold = false,
                              const std::vector<BumpTable>* tables = nullptr,
                              std::vector<SelectionRecord>* log = nullptr);

/// Full construction: hierarchy, both map orders per color, direct product.
/// Expects a normalized space (diameter exactly 1/2) unless it is a single point.
EmbeddingBuild build_embedding(const FiniteMetricSpace& space, const EmbeddingParams& params,
                               const BuildOptions& opts = {});

}  // namespace snowembed
