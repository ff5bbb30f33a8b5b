#include "snowembed/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "snowembed/errors.hpp"
#include "snowembed/generators.hpp"

namespace snowembed {

double bump(const FiniteMetricSpace& space, const Net& net, int member_pos, int x) {
  const double r = net.radius;
  const auto Bj = ball_members(space, net.members[static_cast<std::size_t>(member_pos)], r);
  const double d = set_distance(space, x, Bj);
  return std::max(0.0, 1.0 - d / r);
}

std::vector<BumpTable> make_bump_tables(const FiniteMetricSpace& space, const NetHierarchy& h) {
  std::vector<BumpTable> tables;
  tables.reserve(h.nets.size());
  for (const auto& net : h.nets) {
    BumpTable t(static_cast<Eigen::Index>(net.members.size()), space.size());
    for (int pos = 0; pos < static_cast<int>(net.members.size()); ++pos) {
      const auto Bj = ball_members(space, net.members[static_cast<std::size_t>(pos)], net.radius);
      for (int x = 0; x < space.size(); ++x) {
        t(pos, x) = std::max(0.0, 1.0 - set_distance(space, x, Bj) / net.radius);
      }
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

CandidateStream::CandidateStream(int dim, double tau) : dim_(dim), tau_(tau) {
  if (dim < 1) throw BadParameters("lattice dimension must be >= 1", {{"M", dim}});
  if (!(tau > 0.0 && tau < 2.0 / 7.0)) {
    throw BadParameters("candidate lattice needs tau in (0, 2/7)", {{"tau", tau}});
  }
  spacing_ = 7.0 * tau * tau * tau;
  const double rad = tau * tau;
  limit_sq_ = rad * rad;
  heap_.push({0, std::vector<int>(static_cast<std::size_t>(dim), 0)});
  seen_.insert(std::vector<int>(static_cast<std::size_t>(dim), 0));
}

bool CandidateStream::advance() {
  if (heap_.empty()) {
    exhausted_ = true;
    return false;
  }
  auto [norm2, c] = heap_.top();
  heap_.pop();
  Eigen::VectorXd v(dim_);
  for (int i = 0; i < dim_; ++i) v[i] = spacing_ * c[static_cast<std::size_t>(i)];
  emitted_.push_back(std::move(v));
  // Expand lattice neighbors; stepping toward the origin always stays inside
  // the ball, so best-first search reaches every member.
  for (int i = 0; i < dim_; ++i) {
    for (int step : {-1, 1}) {
      std::vector<int> cc = c;
      cc[static_cast<std::size_t>(i)] += step;
      const long long ci = cc[static_cast<std::size_t>(i)];
      const long long old = c[static_cast<std::size_t>(i)];
      const long long n2 = norm2 - old * old + ci * ci;
      double sq = 0.0;
      for (int t = 0; t < dim_; ++t) {
        const double vt = spacing_ * cc[static_cast<std::size_t>(t)];
        sq += vt * vt;
      }
      if (sq > limit_sq_) continue;
      if (seen_.insert(cc).second) heap_.push({n2, std::move(cc)});
    }
  }
  return true;
}

const Eigen::VectorXd* CandidateStream::get(std::size_t i) {
  while (emitted_.size() <= i) {
    if (!advance()) return nullptr;
  }
  return &emitted_[i];
}

bool CandidateStream::has_at_least(std::size_t n) {
  if (emitted_.size() >= n) return true;
  // Inscribed cube: integer points with every coordinate in [-m, m] lie in
  // the ball when m <= (1/(7 tau)) / sqrt(dim); shaved slightly for rounding.
  const double rho = 1.0 / (7.0 * tau_);
  const double m = std::floor(rho / std::sqrt(static_cast<double>(dim_)) * (1.0 - 1e-12));
  if (m >= 1.0) {
    const double log_count = dim_ * std::log(2.0 * m + 1.0);
    if (log_count >= std::log(static_cast<double>(n))) return true;
  }
  while (emitted_.size() < n) {
    if (!advance()) return false;
  }
  return true;
}

std::vector<Eigen::VectorXd> candidate_vectors(int dim, double tau, std::size_t needed) {
  CandidateStream stream(dim, tau);
  std::vector<Eigen::VectorXd> out;
  out.reserve(needed + 1);
  for (std::size_t i = 0; i <= needed; ++i) {
    const auto* v = stream.get(i);
    if (v == nullptr) {
      throw LatticeExhausted("candidate lattice has too few points; raise M",
                             {{"available", stream.enumerated()},
                              {"needed", needed + 1},
                              {"M", dim},
                              {"tau", tau}});
    }
    out.push_back(*v);
  }
  return out;
}

DenseSubsets dense_subsets(const FiniteMetricSpace& space, const Net& net, int member_pos,
                           double tau) {
  const int xj = net.members[static_cast<std::size_t>(member_pos)];
  const double r = net.radius;
  DenseSubsets out;
  out.E1 = ball_members(space, xj, r);
  const double big = 10.0 * r / (tau * tau);
  const double inner = 2.0 * r;
  for (int y : ball_members(space, xj, big)) {
    if (space.distance(xj, y) > inner) out.E2.push_back(y);
  }
  return out;
}

namespace {

struct CandidateProvider {
  CandidateStream* stream = nullptr;
  const std::vector<Eigen::VectorXd>* list = nullptr;

  const Eigen::VectorXd* get(std::size_t i) const {
    if (stream != nullptr) return stream->get(i);
    return i < list->size() ? &(*list)[i] : nullptr;
  }
  std::size_t supplied() const {
    return stream != nullptr ? stream->enumerated() : list->size();
  }
  bool from_stream() const { return stream != nullptr; }
};

SelectionResult select_impl(const std::vector<Eigen::VectorXd>& f_prev,
                            const std::vector<Eigen::VectorXd>& g,
                            const CandidateProvider& provider, double rk_eps, double threshold) {
  const std::size_t pairs = f_prev.size() * g.size();
  std::size_t killed = 0;
  for (std::size_t i = 0;; ++i) {
    const Eigen::VectorXd* v = provider.get(i);
    if (v == nullptr) {
      Json diag{{"candidates_supplied", provider.supplied()},
                {"pairs", pairs},
                {"killed", killed}};
      if (provider.supplied() <= pairs && provider.from_stream()) {
        throw LatticeExhausted("candidate lattice exhausted during selection; raise M", diag);
      }
      throw SelectionFailed("no candidate satisfies the selection inequality", diag);
    }
    bool ok = true;
    for (std::size_t a = 0; ok && a < f_prev.size(); ++a) {
      const Eigen::VectorXd fx = f_prev[a] + rk_eps * (*v);
      for (std::size_t b = 0; b < g.size(); ++b) {
        if ((fx - g[b]).norm() < threshold) {
          ok = false;
          break;
        }
      }
    }
    if (ok) return SelectionResult{*v, i, killed};
    ++killed;
  }
}

}  // namespace

SelectionResult select_vector(const std::vector<Eigen::VectorXd>& f_prev,
                              const std::vector<Eigen::VectorXd>& g, CandidateStream& candidates,
                              double rk_eps, double threshold) {
  return select_impl(f_prev, g, CandidateProvider{&candidates, nullptr}, rk_eps, threshold);
}

SelectionResult select_vector(const std::vector<Eigen::VectorXd>& f_prev,
                              const std::vector<Eigen::VectorXd>& g,
                              const std::vector<Eigen::VectorXd>& candidates, double rk_eps,
                              double threshold) {
  return select_impl(f_prev, g, CandidateProvider{nullptr, &candidates}, rk_eps, threshold);
}

const char* map_order_name(MapOrder o) { return o == MapOrder::forward ? "forward" : "reverse"; }

namespace {

double bump_value(const FiniteMetricSpace& space, const NetHierarchy& h, int k, int pos, int x,
                  const std::vector<BumpTable>* tables) {
  if (tables != nullptr) return (*tables)[static_cast<std::size_t>(k - h.n0)](pos, x);
  return bump(space, h.net_at(k), pos, x);
}

// Level-k contribution summed over the stored (pos, v) pairs in ascending pos
// order; the fixed order keeps re-evaluation bit-identical.
Eigen::VectorXd level_sum(const FiniteMetricSpace& space, const NetHierarchy& h,
                          const CoordinateMap& map, int k, int x,
                          const std::vector<BumpTable>* tables, int M) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(M);
  for (const auto& [pos, v] : map.selected[static_cast<std::size_t>(k - h.n0)]) {
    const double phi = bump_value(space, h, k, pos, x, tables);
    if (phi != 0.0) acc += v * phi;
  }
  return acc;
}

}  // namespace

Eigen::VectorXd evaluate_partial(const FiniteMetricSpace& space, const NetHierarchy& h,
                                 const EmbeddingParams& params, const CoordinateMap& map, int x,
                                 int k, const std::vector<BumpTable>* tables) {
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(params.M);
  for (int l = h.n0; l <= k; ++l) {
    const double rl_eps = std::pow(scale_radius(params.tau, l).value, params.epsilon);
    acc += rl_eps * level_sum(space, h, map, l, x, tables, params.M);
  }
  return acc;
}

Eigen::VectorXd evaluate_G(const FiniteMetricSpace& space, const NetHierarchy& h,
                           const EmbeddingParams& params, const CoordinateMap& map, int k,
                           int member_pos, int y, const std::vector<BumpTable>* tables) {
  Eigen::VectorXd acc = evaluate_partial(space, h, params, map, y, k - 1, tables);
  const double rk_eps = std::pow(scale_radius(params.tau, k).value, params.epsilon);
  Eigen::VectorXd lvl = Eigen::VectorXd::Zero(params.M);
  for (const auto& [pos, v] : map.selected[static_cast<std::size_t>(k - h.n0)]) {
    const bool earlier =
        map.order == MapOrder::forward ? pos < member_pos : pos > member_pos;
    if (!earlier) continue;
    const double phi = bump_value(space, h, k, pos, y, tables);
    if (phi != 0.0) lvl += v * phi;
  }
  acc += rk_eps * lvl;
  return acc;
}

CoordinateMap build_color_map(const FiniteMetricSpace& space, const NetHierarchy& h,
                              const EmbeddingParams& params, int color, MapOrder order,
                              bool surrogate_threshold, const std::vector<BumpTable>* tables,
                              std::vector<SelectionRecord>* log) {
  CoordinateMap map;
  map.color = color;
  map.order = order;
  map.selected.resize(h.nets.size());
  const bool strict = params.mode == Mode::strict;
  const double tau3 = params.tau * params.tau * params.tau;

  for (int k = h.n0; k <= h.n; ++k) {
    const auto& net = h.net_at(k);
    const auto& coloring = h.coloring_at(k);
    std::vector<int> fiber;
    for (int pos = 0; pos < static_cast<int>(net.members.size()); ++pos) {
      if (coloring.color[static_cast<std::size_t>(pos)] == color) fiber.push_back(pos);
    }
    if (order == MapOrder::reverse) std::reverse(fiber.begin(), fiber.end());

    const double rk_eps = std::pow(scale_radius(params.tau, k).value, params.epsilon);
    const double threshold = (surrogate_threshold ? 3.0 : 1.0) * tau3 * rk_eps;
    auto& chosen = map.selected[static_cast<std::size_t>(k - h.n0)];

    for (int pos : fiber) {
      const auto subsets = dense_subsets(space, net, pos, params.tau);
      SelectionRecord rec;
      rec.color = color;
      rec.order = order;
      rec.level = k;
      rec.member_pos = pos;
      rec.pairs = subsets.E1.size() * subsets.E2.size();

      Eigen::VectorXd v;
      if (subsets.E2.empty()) {
        // Unconstrained member: the zero vector (the first candidate).
        v = Eigen::VectorXd::Zero(params.M);
      } else {
        std::vector<Eigen::VectorXd> f_prev;
        f_prev.reserve(subsets.E1.size());
        for (int x : subsets.E1) f_prev.push_back(evaluate_partial(space, h, params, map, x, k - 1, tables));
        std::vector<Eigen::VectorXd> g;
        g.reserve(subsets.E2.size());
        for (int y : subsets.E2) g.push_back(evaluate_G(space, h, params, map, k, pos, y, tables));

        CandidateStream stream(params.M, params.tau);
        if (strict) {
          // Selection succeeds whenever the lattice holds more candidates
          // than constraint pairs; assert that before selecting.
          if (!stream.has_at_least(rec.pairs + 1)) {
            throw LatticeExhausted("lattice count precheck failed in strict mode",
                                   {{"available", stream.enumerated()},
                                    {"pairs", rec.pairs},
                                    {"level", k},
                                    {"color", color}});
          }
          rec.lattice_checked = true;
        }
        SelectionResult sel;
        try {
          sel = select_vector(f_prev, g, stream, rk_eps, threshold);
        } catch (MathError& e) {
          Json d = e.details();
          d["level"] = k;
          d["color"] = color;
          d["order"] = map_order_name(order);
          d["member"] = net.members[static_cast<std::size_t>(pos)];
          if (e.code() == "LatticeExhausted") throw LatticeExhausted(std::string(e.what()), d);
          throw SelectionFailed(std::string(e.what()), d);
        }
        v = sel.v;
        rec.killed = sel.killed;
        rec.candidate_index = sel.candidate_index;
      }

      // Keep the storage sorted by member position so evaluation order is
      // identical for both map orders.
      auto it = std::lower_bound(chosen.begin(), chosen.end(), pos,
                                 [](const auto& e, int p) { return e.first < p; });
      chosen.insert(it, {pos, std::move(v)});
      if (log != nullptr) log->push_back(rec);
    }
  }
  return map;
}

namespace {

void run_chunks(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const int workers = static_cast<int>(std::min<std::size_t>(count, static_cast<std::size_t>(threads)));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = static_cast<std::size_t>(w); i < count; i += static_cast<std::size_t>(workers)) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace

EmbeddingBuild build_embedding(const FiniteMetricSpace& space, const EmbeddingParams& params,
                               const BuildOptions& opts) {
  if (space.size() > 1 && std::abs(space.diameter() - 0.5) > 1e-12) {
    throw BadParameters("build_embedding expects a normalized space (diameter 1/2)",
                        {{"diameter", space.diameter()}});
  }
  if (params.n <= params.n0) throw BadParameters("need n > n0");
  if (space.size() > 1) {
    // The level range must bracket the diameter: r_{n0} >= diam > r_{n0+1}.
    if (scale_radius(params.tau, params.n0).value < space.diameter() ||
        scale_radius(params.tau, params.n0 + 1).value >= space.diameter()) {
      throw BadParameters("params.n0 does not match the space diameter",
                          {{"n0", params.n0}, {"diameter", space.diameter()}});
    }
  }
  if (params.mode == Mode::strict) {
    if (!check_tau(params.tau, params.epsilon, params.theta, params.delta, params.C,
                   params.log_base)
             .ok) {
      throw BadParameters("strict mode requires tau satisfying all five conditions",
                          {{"tau", params.tau}});
    }
    if (params.M != vector_dimension(params.theta, params.delta, params.n)) {
      throw BadParameters("strict mode requires M from the formula", {{"M", params.M}});
    }
    const auto budget = color_budget(params.theta, params.delta, params.C, params.tau, params.n,
                                     params.budget_cap);
    if (budget.overflow || params.N_colors != budget.value) {
      throw BadParameters("strict mode requires N_colors from the formula",
                          {{"N_colors", params.N_colors}, {"expected", budget.value}});
    }
  }

  EmbeddingBuild build;
  build.hierarchy = build_hierarchy(space, params, opts.net_order);
  build.bump_tables = make_bump_tables(space, build.hierarchy);

  EmbeddingParams resolved = params;
  if (params.colors_deferred) {
    resolved.N_colors = std::max(1, build.hierarchy.max_color_used);
    resolved.colors_deferred = false;
  }
  bool budget_grown = false;
  for (const auto& c : build.hierarchy.colorings) budget_grown = budget_grown || c.budget_grown;
  if (budget_grown) resolved.N_colors = std::max<long long>(resolved.N_colors, build.hierarchy.max_color_used);

  std::vector<int> used_colors;
  for (const auto& coloring : build.hierarchy.colorings) {
    for (int c : coloring.color) used_colors.push_back(c);
  }
  std::sort(used_colors.begin(), used_colors.end());
  used_colors.erase(std::unique(used_colors.begin(), used_colors.end()), used_colors.end());

  const Eigen::Index width = 2 * static_cast<Eigen::Index>(resolved.N_colors) * resolved.M;
  Eigen::MatrixXd coords = Eigen::MatrixXd::Zero(space.size(), width);

  // Distinct (color, order) maps are independent; build them in parallel and
  // write into disjoint column blocks.
  std::vector<std::vector<CoordinateMap>> maps_per_color(used_colors.size());
  std::vector<std::vector<SelectionRecord>> logs_per_color(used_colors.size());
  run_chunks(used_colors.size(), opts.threads, [&](std::size_t ci) {
    const int color = used_colors[ci];
    auto& log = logs_per_color[ci];
    for (MapOrder order : {MapOrder::forward, MapOrder::reverse}) {
      auto map = build_color_map(space, build.hierarchy, resolved, color, order,
                                 opts.surrogate_threshold, &build.bump_tables, &log);
      const Eigen::Index block =
          (2 * static_cast<Eigen::Index>(color - 1) + (order == MapOrder::reverse ? 1 : 0)) *
          resolved.M;
      for (int x = 0; x < space.size(); ++x) {
        coords.block(x, block, 1, resolved.M) =
            evaluate_partial(space, build.hierarchy, resolved, map, x, resolved.n,
                             &build.bump_tables)
                .transpose();
      }
      maps_per_color[ci].push_back(std::move(map));
    }
  });
  for (auto& per_color : maps_per_color) {
    for (auto& m : per_color) build.maps.push_back(std::move(m));
  }
  for (auto& log : logs_per_color) {
    for (auto& rec : log) build.selections.push_back(rec);
  }

  build.embedding.coords = std::move(coords);
  build.embedding.params = resolved;
  build.embedding.metadata.net_order = net_order_name(opts.net_order);
  build.embedding.metadata.mode = mode_name(resolved.mode);
  build.embedding.metadata.seed = opts.seed;
  build.embedding.metadata.space_hash = space.content_hash();
  build.embedding.metadata.normalization_scale = opts.normalization_scale;
  build.embedding.metadata.surrogate_threshold = opts.surrogate_threshold;
  build.embedding.metadata.budget_grown = budget_grown;
  build.embedding.metadata.rng = kRngAlgorithm;
  return build;
}

}  // namespace snowembed
