#include "snowembed/serialization.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace snowembed {

namespace {

void check_kind(const Json& j, const char* kind) {
  if (j.contains("schema") && j["schema"] != kSchemaVersion) {
    throw IoError("unsupported schema version", {{"schema", j["schema"]}});
  }
  if (j.contains("kind") && j["kind"] != kind) {
    throw IoError(std::string("expected artifact kind '") + kind + "'", {{"kind", j["kind"]}});
  }
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw IoError("failed to format a double");
  return std::string(buf, ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw IoError("failed to parse a number from CSV", {{"token", std::string(s)}});
  }
  return v;
}

std::string log_base_name(LogBase b) { return b == LogBase::natural ? "e" : "10"; }

LogBase log_base_from_name(const std::string& s) {
  if (s == "e") return LogBase::natural;
  if (s == "10") return LogBase::base10;
  throw BadParameters("log base must be 'e' or '10'", {{"log_base", s}});
}

}  // namespace

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path.string(), {{"path", path.string()}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path.string(), {{"path", path.string()}});
  out << content;
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

Json parse_json_file(const std::filesystem::path& path) {
  const auto text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("invalid JSON in " + path.string(), {{"path", path.string()}, {"what", e.what()}});
  }
}

Json space_to_json(const FiniteMetricSpace& space, Json metadata) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "space";
  j["labels"] = space.labels();
  Json::array_t flat;
  flat.reserve(static_cast<std::size_t>(space.size()) * space.size());
  for (int i = 0; i < space.size(); ++i) {
    for (int k = 0; k < space.size(); ++k) flat.push_back(space.distance(i, k));
  }
  j["distances"] = std::move(flat);
  if (!metadata.is_null() && !metadata.empty()) j["metadata"] = std::move(metadata);
  return j;
}

FiniteMetricSpace space_from_json(const Json& j, const ValidateOptions& opts) {
  check_kind(j, "space");
  if (!j.contains("labels") || !j.contains("distances")) {
    throw IoError("space file needs 'labels' and 'distances'");
  }
  const auto labels = j["labels"].get<std::vector<std::string>>();
  const auto flat = j["distances"].get<std::vector<double>>();
  const auto n = labels.size();
  if (flat.size() != n * n) {
    throw IoError("distance list length must be labels^2",
                  {{"labels", n}, {"entries", flat.size()}});
  }
  Eigen::MatrixXd d(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = flat[i * n + k];
  }
  return FiniteMetricSpace::validate(std::move(d), labels, opts);
}

std::string space_to_csv(const FiniteMetricSpace& space) {
  std::ostringstream out;
  for (int i = 0; i < space.size(); ++i) {
    if (i) out << ',';
    out << space.labels()[static_cast<std::size_t>(i)];
  }
  out << '\n';
  for (int i = 0; i < space.size(); ++i) {
    for (int k = 0; k < space.size(); ++k) {
      if (k) out << ',';
      out << format_double(space.distance(i, k));
    }
    out << '\n';
  }
  return out.str();
}

FiniteMetricSpace space_from_csv(const std::string& text, const ValidateOptions& opts) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) throw IoError("empty CSV space file");
  const auto labels = rows[0];
  const auto n = labels.size();
  if (rows.size() != n + 1) {
    throw IoError("CSV must have a header row of labels plus a square matrix",
                  {{"labels", n}, {"rows", rows.size() - 1}});
  }
  Eigen::MatrixXd d(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (rows[i + 1].size() != n) {
      throw IoError("CSV row width mismatch", {{"row", i}, {"cells", rows[i + 1].size()}});
    }
    for (std::size_t k = 0; k < n; ++k) {
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = parse_double(rows[i + 1][k]);
    }
  }
  return FiniteMetricSpace::validate(std::move(d), labels, opts);
}

FiniteMetricSpace read_space_file(const std::filesystem::path& path, const ValidateOptions& opts) {
  if (path.extension() == ".csv") return space_from_csv(read_text_file(path), opts);
  return space_from_json(parse_json_file(path), opts);
}

Json params_to_json(const EmbeddingParams& p) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "params";
  j["mode"] = mode_name(p.mode);
  j["epsilon"] = p.epsilon;
  j["theta"] = p.theta;
  j["delta"] = p.delta;
  j["C"] = p.C;
  j["tau"] = p.tau;
  j["n0"] = p.n0;
  j["n"] = p.n;
  if (p.colors_deferred) {
    j["N_colors"] = nullptr;
  } else {
    j["N_colors"] = p.N_colors;
    j["N_colors_log10"] = std::log10(static_cast<double>(p.N_colors));
  }
  j["M"] = p.M;
  j["diameter"] = p.diameter;
  j["grid_step"] = p.grid_step;
  j["budget_cap"] = p.budget_cap;
  j["log_base"] = log_base_name(p.log_base);
  return j;
}

EmbeddingParams params_from_json(const Json& j) {
  check_kind(j, "params");
  EmbeddingParams p;
  p.mode = mode_from_name(j.at("mode").get<std::string>());
  p.epsilon = j.at("epsilon").get<double>();
  p.theta = j.at("theta").get<double>();
  p.delta = j.at("delta").get<double>();
  p.C = j.at("C").get<double>();
  p.tau = j.at("tau").get<double>();
  p.n0 = j.at("n0").get<int>();
  p.n = j.at("n").get<int>();
  if (j.at("N_colors").is_null()) {
    p.colors_deferred = true;
    p.N_colors = 0;
  } else {
    p.N_colors = j.at("N_colors").get<long long>();
  }
  p.M = j.at("M").get<int>();
  p.diameter = j.value("diameter", 0.5);
  p.grid_step = j.value("grid_step", 0.001);
  p.budget_cap = j.value("budget_cap", (1ll << 20));
  p.log_base = log_base_from_name(j.value("log_base", std::string("e")));
  return p;
}

Json dimension_estimate_to_json(const std::string& what, const DimensionEstimate& est) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "dims";
  j["what"] = what;
  j["value"] = est.value;
  j["residual"] = est.fit_residual;
  Json::array_t scales;
  for (const auto& [r, count] : est.scales_used) scales.push_back(Json::array_t{r, count});
  j["scales"] = std::move(scales);
  j["method"] = est.method == CoverMethod::greedy ? "greedy_cover" : "exact_cover";
  // ball centers are restricted to points of the space
  j["covers"] = "intrinsic";
  return j;
}

Json quasidoubling_to_json(const QuasidoublingEstimate& est) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "dims";
  j["what"] = "quasidoubling";
  j["value"] = est.C;
  j["residual"] = 0.0;
  j["theta"] = est.theta;
  j["delta"] = est.delta;
  Json::array_t scales;
  Json::array_t witnesses;
  for (const auto& w : est.witnesses) {
    scales.push_back(Json::array_t{w.R, w.cover});
    witnesses.push_back(Json{{"x", w.x}, {"R", w.R}, {"lambda", w.lambda}, {"cover", w.cover}});
  }
  j["scales"] = std::move(scales);
  j["witnesses"] = std::move(witnesses);
  j["covers"] = "intrinsic";
  return j;
}

double quasidoubling_C_from_json(const Json& j) {
  check_kind(j, "dims");
  if (j.at("what") != "quasidoubling") {
    throw IoError("expected a quasidoubling dims record", {{"what", j.at("what")}});
  }
  return j.at("value").get<double>();
}

Json nets_to_json(const NetHierarchy& h, const EmbeddingParams& p, std::uint64_t space_hash) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "nets";
  j["tau"] = p.tau;
  j["theta"] = p.theta;
  j["n0"] = h.n0;
  j["n"] = h.n;
  j["net_order"] = net_order_name(h.order);
  j["space_hash"] = space_hash;
  Json::array_t levels;
  for (std::size_t idx = 0; idx < h.nets.size(); ++idx) {
    const auto& net = h.nets[idx];
    const auto& coloring = h.colorings[idx];
    Json lvl;
    lvl["k"] = net.level;
    lvl["r"] = net.radius;
    lvl["members"] = net.members;
    lvl["colors"] = coloring.color;
    levels.push_back(std::move(lvl));
  }
  j["levels"] = std::move(levels);
  return j;
}

Json embedding_to_json(const Embedding& embedding, const std::vector<CoordinateMap>* dump_vectors) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "embedding";
  j["params"] = params_to_json(embedding.params);
  Json meta;
  meta["net_order"] = embedding.metadata.net_order;
  meta["mode"] = embedding.metadata.mode;
  meta["seed"] = embedding.metadata.seed;
  meta["space_hash"] = embedding.metadata.space_hash;
  meta["normalization_scale"] = embedding.metadata.normalization_scale;
  meta["surrogate_threshold"] = embedding.metadata.surrogate_threshold;
  meta["budget_grown"] = embedding.metadata.budget_grown;
  meta["rng"] = embedding.metadata.rng;
  j["metadata"] = std::move(meta);
  j["dimension"] = embedding.coords.cols();
  j["points"] = embedding.coords.rows();
  Json::array_t coords;
  coords.reserve(static_cast<std::size_t>(embedding.coords.rows()));
  for (Eigen::Index i = 0; i < embedding.coords.rows(); ++i) {
    Json::array_t row;
    row.reserve(static_cast<std::size_t>(embedding.coords.cols()));
    for (Eigen::Index c = 0; c < embedding.coords.cols(); ++c) row.push_back(embedding.coords(i, c));
    coords.push_back(std::move(row));
  }
  j["coords"] = std::move(coords);
  if (dump_vectors != nullptr) {
    Json::array_t maps;
    for (const auto& map : *dump_vectors) {
      Json m;
      m["color"] = map.color;
      m["order"] = map_order_name(map.order);
      Json::array_t levels;
      for (std::size_t li = 0; li < map.selected.size(); ++li) {
        Json::array_t entries;
        for (const auto& [pos, v] : map.selected[li]) {
          Json::array_t vec(v.data(), v.data() + v.size());
          entries.push_back(Json::array_t{pos, std::move(vec)});
        }
        levels.push_back(std::move(entries));
      }
      m["vectors"] = std::move(levels);
      maps.push_back(std::move(m));
    }
    j["vectors"] = std::move(maps);
  }
  return j;
}

Embedding embedding_from_json(const Json& j) {
  check_kind(j, "embedding");
  Embedding e;
  e.params = params_from_json(j.at("params"));
  const auto& meta = j.at("metadata");
  e.metadata.net_order = meta.at("net_order").get<std::string>();
  e.metadata.mode = meta.at("mode").get<std::string>();
  e.metadata.seed = meta.at("seed").get<std::uint64_t>();
  e.metadata.space_hash = meta.at("space_hash").get<std::uint64_t>();
  e.metadata.normalization_scale = meta.at("normalization_scale").get<double>();
  e.metadata.surrogate_threshold = meta.value("surrogate_threshold", false);
  e.metadata.budget_grown = meta.value("budget_grown", false);
  e.metadata.rng = meta.value("rng", std::string());
  const auto& coords = j.at("coords");
  const auto rows = coords.size();
  const auto cols = j.at("dimension").get<std::size_t>();
  e.coords.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    const auto& row = coords[i];
    if (row.size() != cols) throw IoError("coordinate row width mismatch", {{"row", i}});
    for (std::size_t c = 0; c < cols; ++c) {
      e.coords(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = row[c].get<double>();
    }
  }
  return e;
}

Json report_to_json(const DistortionReport& r) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "report";
  j["mode"] = r.mode;
  j["epsilon"] = r.epsilon;
  j["tau"] = r.tau;
  j["n0"] = r.n0;
  j["n"] = r.n;
  j["threshold"] = r.threshold;
  j["upper_constant"] = r.upper_constant;
  j["lower_constant"] = r.lower_constant;
  j["slack"] = r.slack;
  j["space_hash"] = r.space_hash;
  j["pass"] = r.pass;
  j["num_pairs"] = r.pairs.size();
  j["num_in_scope"] = r.in_scope_pairs;
  j["worst_upper"] = r.worst_upper;
  if (r.in_scope_pairs > 0) {
    j["worst_lower"] = r.worst_lower;
  } else {
    j["worst_lower"] = nullptr;
  }
  Json::array_t pairs;
  pairs.reserve(r.pairs.size());
  for (const auto& p : r.pairs) {
    Json row;
    row["i"] = p.i;
    row["j"] = p.j;
    row["d"] = p.d;
    row["embedded"] = p.embedded;
    row["ratio"] = p.ratio;
    row["level"] = p.level;
    row["clamped"] = p.clamped;
    row["in_scope"] = p.in_scope;
    pairs.push_back(std::move(row));
  }
  j["pairs"] = std::move(pairs);
  return j;
}

std::string report_to_csv(const DistortionReport& r) {
  std::ostringstream out;
  out << "i,j,d,embedded,ratio,level,in_scope\n";
  for (const auto& p : r.pairs) {
    out << p.i << ',' << p.j << ',' << format_double(p.d) << ',' << format_double(p.embedded)
        << ',' << format_double(p.ratio) << ',' << p.level << ',' << (p.in_scope ? 1 : 0) << '\n';
  }
  return out.str();
}

}  // namespace snowembed
