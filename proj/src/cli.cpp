#include "snowembed/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "snowembed/dimension.hpp"
#include "snowembed/embedding.hpp"
#include "snowembed/generators.hpp"
#include "snowembed/metric_space.hpp"
#include "snowembed/nets.hpp"
#include "snowembed/params.hpp"
#include "snowembed/serialization.hpp"
#include "snowembed/verification.hpp"

namespace snowembed::cli {

namespace fs = std::filesystem;

namespace {

int log_rank(const std::string& level) {
  if (level == "quiet") return 0;
  if (level == "warn") return 1;
  if (level == "info") return 2;
  throw BadParameters("log level must be quiet|warn|info", {{"log_level", level}});
}

void log_warn(const RunConfig& cfg, const std::string& msg) {
  if (log_rank(cfg.log_level) >= 1) std::cerr << "[snowembed] warning: " << msg << "\n";
}

void log_info(const RunConfig& cfg, const std::string& msg) {
  if (log_rank(cfg.log_level) >= 2) std::cerr << "[snowembed] " << msg << "\n";
}

fs::path artifact_path(const RunConfig& cfg, const char* name) {
  if (!cfg.out.empty()) return cfg.out;
  return fs::path(cfg.out_dir) / name;
}

void write_manifest(const RunConfig& cfg) {
  Json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = "manifest";
  j["subcommand"] = cfg.subcommand;
  j["config"] = config_to_json(cfg);
  write_json_file(fs::path(cfg.out_dir) / "manifest.json", j);
}

GeneratorSpec generator_spec(const RunConfig& cfg) {
  GeneratorSpec spec;
  spec.family = family_from_name(cfg.family);
  spec.size = cfg.size;
  spec.depth = cfg.depth;
  spec.arms = cfg.arms;
  spec.alpha = cfg.alpha;
  spec.seed = cfg.seed;
  return spec;
}

Json generator_metadata(const RunConfig& cfg) {
  Json gen;
  gen["family"] = cfg.family;
  if (cfg.family == "interval" || cfg.family == "gw_tree") gen["size"] = cfg.size;
  if (cfg.family == "cantor") gen["depth"] = cfg.depth;
  if (cfg.family == "star") gen["arms"] = cfg.arms;
  if (cfg.family == "snowflake_of") {
    gen["alpha"] = cfg.alpha;
    gen["input"] = cfg.input_path;
  }
  if (cfg.family == "gw_tree") {
    gen["seed"] = cfg.seed;
    gen["rng"] = kRngAlgorithm;
  }
  Json meta;
  meta["generator"] = std::move(gen);
  return meta;
}

ValidateOptions reader_options(const RunConfig& cfg) {
  ValidateOptions opts;
  opts.merge_duplicates = cfg.merge_duplicates;
  return opts;
}

FiniteMetricSpace generate_space(const RunConfig& cfg) {
  if (cfg.family == "snowflake_of") {
    if (cfg.input_path.empty()) {
      throw BadParameters("snowflake_of needs --input with a base space file");
    }
    return snowflake_of(read_space_file(cfg.input_path, reader_options(cfg)), cfg.alpha);
  }
  return gen_space(generator_spec(cfg));
}

struct LoadedSpace {
  FiniteMetricSpace raw;
  FiniteMetricSpace normalized;  // equals raw for a single point
  double scale = 1.0;
  std::uint64_t seed = 0;  // generator seed recorded in the space file, if any
};

LoadedSpace load_and_normalize(const fs::path& path, const ValidateOptions& opts) {
  std::uint64_t seed = 0;
  auto raw = [&] {
    if (path.extension() == ".csv") return space_from_csv(read_text_file(path), opts);
    const Json j = parse_json_file(path);
    if (j.contains("metadata") && j["metadata"].contains("generator") &&
        j["metadata"]["generator"].contains("seed")) {
      seed = j["metadata"]["generator"].at("seed").get<std::uint64_t>();
    }
    return space_from_json(j, opts);
  }();
  if (raw.size() == 1) {
    auto copy = raw;
    return LoadedSpace{std::move(raw), std::move(copy), 1.0, seed};
  }
  auto norm = normalize_diameter(raw);
  return LoadedSpace{std::move(raw), std::move(norm.space), norm.scale, seed};
}

void warn_redundant_levels(const RunConfig& cfg, const FiniteMetricSpace& space,
                           const EmbeddingParams& p) {
  const double minpos = space.min_positive_distance();
  if (minpos <= 0.0) return;
  for (int k = p.n0; k < p.n; ++k) {
    if (scale_radius(p.tau, k).value < minpos) {
      log_warn(cfg, "levels beyond k=" + std::to_string(k) +
                        " are redundant for this finite space (r_k below the minimum distance)");
      break;
    }
  }
}

// csv path note: read_space_file in load_and_normalize needs the json only
// for metadata; csv spaces simply have no recorded seed.

int cmd_gen(const RunConfig& cfg) {
  const auto space = generate_space(cfg);
  const auto path = artifact_path(cfg, "space.json");
  write_json_file(path, space_to_json(space, generator_metadata(cfg)));
  write_manifest(cfg);
  Json summary{{"out", path.string()},
               {"points", space.size()},
               {"diameter", space.diameter()},
               {"space_hash", space.content_hash()}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_dims(const RunConfig& cfg) {
  if (cfg.space_path.empty()) throw BadParameters("dims needs --space");
  auto raw = read_space_file(cfg.space_path, reader_options(cfg));
  std::optional<NormalizedSpace> norm;
  if (cfg.normalize && raw.size() > 1) norm = normalize_diameter(raw);
  const FiniteMetricSpace& space = norm ? norm->space : raw;

  Json record;
  if (cfg.what == "minkowski") {
    const auto grid = cfg.grid.empty() ? default_scale_grid(space) : cfg.grid;
    record = dimension_estimate_to_json("minkowski", estimate_minkowski(space, grid));
  } else if (cfg.what == "assouad") {
    const auto grid = cfg.grid.empty() ? default_spectrum_grid(space, cfg.theta) : cfg.grid;
    record = dimension_estimate_to_json("assouad_spectrum",
                                        estimate_assouad_spectrum(space, cfg.theta, grid));
    record["theta"] = cfg.theta;
  } else if (cfg.what == "quasidoubling") {
    QuasidoublingOptions opts;
    if (!cfg.grid.empty()) opts.R_grid = cfg.grid;
    const auto est = estimate_quasidoubling_constant(space, cfg.theta, cfg.delta, opts);
    record = quasidoubling_to_json(est);
    if (!cfg.no_spectrum_check && space.size() <= 512) {
      try {
        const auto spec = estimate_assouad_spectrum(space, cfg.theta,
                                                    default_spectrum_grid(space, cfg.theta));
        if (cfg.delta <= spec.value) {
          log_warn(cfg, "delta <= estimated Assouad spectrum (" + std::to_string(spec.value) +
                            "); the quasidoubling constant may be unstable");
          record["delta_warning"] = spec.value;
        }
      } catch (const InsufficientScales&) {
        // Too few usable scales for the advisory check; skip it.
      }
    }
  } else {
    throw BadParameters("unknown estimator: " + cfg.what,
                        {{"choices", Json::array_t{"minkowski", "assouad", "quasidoubling"}}});
  }
  if (norm) record["normalized"] = true;

  const auto path = artifact_path(cfg, "dims.json");
  write_json_file(path, record);
  write_manifest(cfg);
  std::cout << record.dump(2) << "\n";
  return 0;
}

EmbeddingParams resolve_params(const RunConfig& cfg) {
  double C = cfg.C;
  if (!cfg.C_from.empty()) C = quasidoubling_C_from_json(parse_json_file(cfg.C_from));
  ParamOverrides overrides;
  if (cfg.tau > 0.0) overrides.tau = cfg.tau;
  if (cfg.colors > 0) overrides.N_colors = cfg.colors;
  if (cfg.M > 0) overrides.M = cfg.M;
  return derive_params(cfg.epsilon, cfg.theta, cfg.delta, C, cfg.diameter, cfg.n_offset,
                       mode_from_name(cfg.mode), cfg.grid_step, cfg.budget_cap,
                       cfg.log_base == "10" ? LogBase::base10 : LogBase::natural, overrides);
}

int cmd_params(const RunConfig& cfg) {
  const auto params = resolve_params(cfg);
  const Json record = params_to_json(params);
  const auto path = artifact_path(cfg, "params.json");
  write_json_file(path, record);
  write_manifest(cfg);
  std::cout << record.dump(2) << "\n";
  return 0;
}

int cmd_nets(const RunConfig& cfg) {
  if (cfg.space_path.empty() || cfg.params_path.empty()) {
    throw BadParameters("nets needs --space and --params");
  }
  const auto loaded = load_and_normalize(cfg.space_path, reader_options(cfg));
  const auto params = params_from_json(parse_json_file(cfg.params_path));
  warn_redundant_levels(cfg, loaded.normalized, params);
  const auto hierarchy =
      build_hierarchy(loaded.normalized, params, net_order_from_name(cfg.net_order));
  const Json record = nets_to_json(hierarchy, params, loaded.normalized.content_hash());
  const auto path = artifact_path(cfg, "nets.json");
  write_json_file(path, record);
  write_manifest(cfg);
  Json summary{{"out", path.string()}, {"levels", hierarchy.nets.size()},
               {"max_color", hierarchy.max_color_used}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_embed(const RunConfig& cfg) {
  if (cfg.space_path.empty() || cfg.params_path.empty()) {
    throw BadParameters("embed needs --space and --params");
  }
  const auto loaded = load_and_normalize(cfg.space_path, reader_options(cfg));
  const auto params = params_from_json(parse_json_file(cfg.params_path));
  warn_redundant_levels(cfg, loaded.normalized, params);

  BuildOptions opts;
  opts.net_order = net_order_from_name(cfg.net_order);
  opts.surrogate_threshold = cfg.surrogate_threshold;
  opts.threads = cfg.threads;
  opts.seed = loaded.seed;
  opts.normalization_scale = loaded.scale;
  const auto build = build_embedding(loaded.normalized, params, opts);

  const auto path = artifact_path(cfg, "embedding.json");
  write_json_file(path, embedding_to_json(build.embedding,
                                          cfg.dump_vectors ? &build.maps : nullptr));
  write_manifest(cfg);
  Json summary{{"out", path.string()},
               {"points", build.embedding.coords.rows()},
               {"dimension", build.embedding.coords.cols()},
               {"N_colors", build.embedding.params.N_colors},
               {"M", build.embedding.params.M},
               {"mode", build.embedding.metadata.mode}};
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  if (cfg.space_path.empty() || cfg.embedding_path.empty()) {
    throw BadParameters("verify needs --space and --embedding");
  }
  const auto loaded = load_and_normalize(cfg.space_path, reader_options(cfg));
  const auto embedding = embedding_from_json(parse_json_file(cfg.embedding_path));
  const auto report = distortion_report(loaded.normalized, embedding, cfg.threads);

  const auto path = artifact_path(cfg, "report.json");
  write_json_file(path, report_to_json(report));
  if (!cfg.csv.empty()) write_text_file(cfg.csv, report_to_csv(report));
  write_manifest(cfg);
  Json summary{{"out", path.string()},
               {"pass", report.pass},
               {"mode", report.mode},
               {"pairs", report.pairs.size()},
               {"in_scope", report.in_scope_pairs},
               {"worst_upper", report.worst_upper},
               {"upper_constant", report.upper_constant},
               {"lower_constant", report.lower_constant}};
  if (report.in_scope_pairs > 0) summary["worst_lower"] = report.worst_lower;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_pipeline(const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);

  // gen (or load) -> space.json
  FiniteMetricSpace raw = cfg.space_path.empty()
                              ? generate_space(cfg)
                              : read_space_file(cfg.space_path, reader_options(cfg));
  if (cfg.space_path.empty()) {
    write_json_file(dir / "space.json", space_to_json(raw, generator_metadata(cfg)));
  } else {
    write_json_file(dir / "space.json", space_to_json(raw));
  }
  const std::uint64_t seed = cfg.space_path.empty() && cfg.family == "gw_tree" ? cfg.seed : 0;

  double scale = 1.0;
  FiniteMetricSpace space = [&] {
    if (raw.size() == 1) return raw;
    auto norm = normalize_diameter(raw);
    scale = norm.scale;
    return std::move(norm.space);
  }();
  log_info(cfg, "normalized " + std::to_string(space.size()) + " points, scale " +
                    std::to_string(scale));

  // dims -> dims.json (quasidoubling constant feeding the solver)
  QuasidoublingOptions qopts;
  if (!cfg.grid.empty()) qopts.R_grid = cfg.grid;
  const auto qd = estimate_quasidoubling_constant(space, cfg.theta, cfg.delta, qopts);
  Json dims_record = quasidoubling_to_json(qd);
  if (raw.size() > 1) dims_record["normalized"] = true;
  write_json_file(dir / "dims.json", dims_record);

  // params -> params.json
  RunConfig pcfg = cfg;
  pcfg.C = qd.C;
  pcfg.C_from.clear();
  pcfg.diameter = space.size() == 1 ? 0.5 : space.diameter();
  const auto params = resolve_params(pcfg);
  write_json_file(dir / "params.json", params_to_json(params));
  log_info(cfg, "tau=" + std::to_string(params.tau) + " n0=" + std::to_string(params.n0) +
                    " n=" + std::to_string(params.n));
  warn_redundant_levels(cfg, space, params);

  // embed -> nets.json + embedding.json
  BuildOptions opts;
  opts.net_order = net_order_from_name(cfg.net_order);
  opts.surrogate_threshold = cfg.surrogate_threshold;
  opts.threads = cfg.threads;
  opts.seed = seed;
  opts.normalization_scale = scale;
  const auto build = build_embedding(space, params, opts);
  write_json_file(dir / "nets.json",
                  nets_to_json(build.hierarchy, build.embedding.params, space.content_hash()));
  write_json_file(dir / "embedding.json",
                  embedding_to_json(build.embedding, cfg.dump_vectors ? &build.maps : nullptr));

  // verify -> report.json
  const auto report = distortion_report(space, build.embedding, cfg.threads);
  write_json_file(dir / "report.json", report_to_json(report));
  if (!cfg.csv.empty()) write_text_file(cfg.csv, report_to_csv(report));

  write_manifest(cfg);
  Json summary{{"out_dir", dir.string()},
               {"pass", report.pass},
               {"mode", report.mode},
               {"points", space.size()},
               {"C", qd.C},
               {"tau", params.tau},
               {"n0", params.n0},
               {"n", params.n},
               {"N_colors", build.embedding.params.N_colors},
               {"M", params.M},
               {"dimension", build.embedding.coords.cols()},
               {"worst_upper", report.worst_upper},
               {"upper_constant", report.upper_constant},
               {"lower_constant", report.lower_constant}};
  if (report.in_scope_pairs > 0) summary["worst_lower"] = report.worst_lower;
  std::cout << summary.dump(2) << "\n";
  return 0;
}

void add_common_flags(CLI::App* sub, RunConfig& cfg, std::string& manifest_path) {
  sub->add_option("--out-dir", cfg.out_dir, "Output directory (default: $SNOWEMBED_OUT_DIR or .)");
  sub->add_option("--log-level", cfg.log_level, "quiet|warn|info");
  sub->add_option("--from-manifest", manifest_path, "Replay a recorded run configuration");
}

void finalize_config(RunConfig& cfg, const std::string& manifest_path, const CLI::App* sub) {
  if (!manifest_path.empty()) {
    const Json manifest = parse_json_file(manifest_path);
    if (!manifest.contains("config") || !manifest.contains("subcommand")) {
      throw IoError("manifest needs 'subcommand' and 'config'");
    }
    if (manifest["subcommand"] != cfg.subcommand) {
      throw BadParameters("manifest subcommand mismatch",
                          {{"manifest", manifest["subcommand"]}, {"invoked", cfg.subcommand}});
    }
    const auto* out_dir_opt = sub->get_option_no_throw("--out-dir");
    const auto* out_opt = sub->get_option_no_throw("--out");
    const std::string out_dir_override =
        (out_dir_opt != nullptr && out_dir_opt->count() > 0) ? cfg.out_dir : "";
    const std::string out_override = (out_opt != nullptr && out_opt->count() > 0) ? cfg.out : "";
    const std::string sc = cfg.subcommand;
    cfg = config_from_json(manifest["config"]);
    cfg.subcommand = sc;
    if (!out_dir_override.empty()) cfg.out_dir = out_dir_override;
    if (!out_override.empty()) cfg.out = out_override;
  }
  if (cfg.out_dir.empty()) {
    const char* env = std::getenv("SNOWEMBED_OUT_DIR");
    cfg.out_dir = (env != nullptr && *env != '\0') ? env : ".";
  }
  if (cfg.threads < 1) throw BadParameters("--threads must be >= 1", {{"threads", cfg.threads}});
  log_rank(cfg.log_level);
}

}  // namespace

Json config_to_json(const RunConfig& c) {
  Json j;
  j["space"] = c.space_path;
  j["params"] = c.params_path;
  j["embedding"] = c.embedding_path;
  j["input"] = c.input_path;
  j["out"] = c.out;
  j["out_dir"] = c.out_dir;
  j["csv"] = c.csv;
  j["family"] = c.family;
  j["size"] = c.size;
  j["depth"] = c.depth;
  j["arms"] = c.arms;
  j["alpha"] = c.alpha;
  j["seed"] = c.seed;
  j["what"] = c.what;
  j["grid"] = c.grid;
  j["normalize"] = c.normalize;
  j["no_spectrum_check"] = c.no_spectrum_check;
  j["merge_duplicates"] = c.merge_duplicates;
  j["epsilon"] = c.epsilon;
  j["theta"] = c.theta;
  j["delta"] = c.delta;
  j["C"] = c.C;
  j["C_from"] = c.C_from;
  j["diameter"] = c.diameter;
  j["n_offset"] = c.n_offset;
  j["grid_step"] = c.grid_step;
  j["mode"] = c.mode;
  j["budget_cap"] = c.budget_cap;
  j["log_base"] = c.log_base;
  j["tau"] = c.tau;
  j["colors"] = c.colors;
  j["M"] = c.M;
  j["net_order"] = c.net_order;
  j["surrogate_threshold"] = c.surrogate_threshold;
  j["dump_vectors"] = c.dump_vectors;
  j["threads"] = c.threads;
  j["log_level"] = c.log_level;
  return j;
}

RunConfig config_from_json(const Json& j) {
  RunConfig c;
  c.space_path = j.value("space", std::string());
  c.params_path = j.value("params", std::string());
  c.embedding_path = j.value("embedding", std::string());
  c.input_path = j.value("input", std::string());
  c.out = j.value("out", std::string());
  c.out_dir = j.value("out_dir", std::string());
  c.csv = j.value("csv", std::string());
  c.family = j.value("family", c.family);
  c.size = j.value("size", c.size);
  c.depth = j.value("depth", c.depth);
  c.arms = j.value("arms", c.arms);
  c.alpha = j.value("alpha", c.alpha);
  c.seed = j.value("seed", c.seed);
  c.what = j.value("what", c.what);
  c.grid = j.value("grid", c.grid);
  c.normalize = j.value("normalize", c.normalize);
  c.no_spectrum_check = j.value("no_spectrum_check", c.no_spectrum_check);
  c.merge_duplicates = j.value("merge_duplicates", c.merge_duplicates);
  c.epsilon = j.value("epsilon", c.epsilon);
  c.theta = j.value("theta", c.theta);
  c.delta = j.value("delta", c.delta);
  c.C = j.value("C", c.C);
  c.C_from = j.value("C_from", std::string());
  c.diameter = j.value("diameter", c.diameter);
  c.n_offset = j.value("n_offset", c.n_offset);
  c.grid_step = j.value("grid_step", c.grid_step);
  c.mode = j.value("mode", c.mode);
  c.budget_cap = j.value("budget_cap", c.budget_cap);
  c.log_base = j.value("log_base", c.log_base);
  c.tau = j.value("tau", c.tau);
  c.colors = j.value("colors", c.colors);
  c.M = j.value("M", c.M);
  c.net_order = j.value("net_order", c.net_order);
  c.surrogate_threshold = j.value("surrogate_threshold", c.surrogate_threshold);
  c.dump_vectors = j.value("dump_vectors", c.dump_vectors);
  c.threads = j.value("threads", c.threads);
  c.log_level = j.value("log_level", c.log_level);
  return c;
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"snowembed: weak snowflake embeddings of finite metric spaces"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string manifest_path;
  CLI::App* active = nullptr;

  auto* gen = app.add_subcommand("gen", "Generate a metric space");
  gen->add_option("--family", cfg.family, "interval|cantor|star|gw_tree|snowflake_of");
  gen->add_option("--size", cfg.size, "Point count (interval, gw_tree)");
  gen->add_option("--depth", cfg.depth, "Cantor recursion depth");
  gen->add_option("--arms", cfg.arms, "Star arm count");
  gen->add_option("--alpha", cfg.alpha, "Snowflake exponent in (0,1]");
  gen->add_option("--seed", cfg.seed, "Generator seed");
  gen->add_option("--input", cfg.input_path, "Base space for snowflake_of");
  gen->add_option("--out", cfg.out, "Space output path");
  gen->add_flag("--merge-duplicates", cfg.merge_duplicates,
                "Merge points at distance zero instead of rejecting them");

  auto* dims = app.add_subcommand("dims", "Estimate dimensions and constants");
  dims->add_option("--space", cfg.space_path, "Space file (.json or .csv)");
  dims->add_option("--what", cfg.what, "minkowski|assouad|quasidoubling");
  dims->add_option("--theta", cfg.theta, "Spectrum parameter in (0,1)");
  dims->add_option("--delta", cfg.delta, "Dimension bound (> spectrum recommended)");
  dims->add_option("--grid", cfg.grid, "Explicit scale grid")->delimiter(',');
  dims->add_flag("--normalize", cfg.normalize, "Normalize to diameter 1/2 first");
  dims->add_flag("--no-spectrum-check", cfg.no_spectrum_check,
                 "Skip the delta-vs-spectrum advisory check");
  dims->add_option("--out", cfg.out, "Record output path");
  dims->add_flag("--merge-duplicates", cfg.merge_duplicates,
                "Merge points at distance zero instead of rejecting them");

  auto* params = app.add_subcommand("params", "Solve the construction constants");
  params->add_option("--epsilon", cfg.epsilon, "Snowflake exponent in (1/2,1)");
  params->add_option("--theta", cfg.theta, "Spectrum parameter in (0,1)");
  params->add_option("--delta", cfg.delta, "Dimension bound");
  params->add_option("--C", cfg.C, "Quasidoubling constant");
  params->add_option("--C-from", cfg.C_from, "Read C from a quasidoubling dims record");
  params->add_option("--diameter", cfg.diameter, "Space diameter (normalized default 1/2)");
  params->add_option("--n-offset", cfg.n_offset, "n = n0 + offset");
  params->add_option("--grid-step", cfg.grid_step, "Tau search grid step");
  params->add_option("--mode", cfg.mode, "strict|practical");
  params->add_option("--budget-cap", cfg.budget_cap, "Color budget cap");
  params->add_option("--log-base", cfg.log_base, "Log base for the tau conditions: e|10");
  params->add_option("--tau", cfg.tau, "Practical-mode tau override");
  params->add_option("--colors", cfg.colors, "Practical-mode color count override");
  params->add_option("--M", cfg.M, "Practical-mode vector dimension override");
  params->add_option("--out", cfg.out, "Params output path");

  auto* nets = app.add_subcommand("nets", "Build and inspect the net hierarchy");
  nets->add_option("--space", cfg.space_path, "Space file");
  nets->add_option("--params", cfg.params_path, "Params file");
  nets->add_option("--net-order", cfg.net_order, "input|farthest_point");
  nets->add_option("--out", cfg.out, "Nets output path");
  nets->add_flag("--merge-duplicates", cfg.merge_duplicates,
                "Merge points at distance zero instead of rejecting them");

  auto* embed = app.add_subcommand("embed", "Construct the embedding");
  embed->add_option("--space", cfg.space_path, "Space file");
  embed->add_option("--params", cfg.params_path, "Params file");
  embed->add_option("--net-order", cfg.net_order, "input|farthest_point");
  embed->add_flag("--surrogate-threshold", cfg.surrogate_threshold,
                  "Select with 3 tau^3 r_k^eps instead of tau^3 r_k^eps");
  embed->add_flag("--dump-vectors", cfg.dump_vectors, "Include selected vectors in the output");
  embed->add_option("--threads", cfg.threads, "Worker cap for parallel sections");
  embed->add_option("--out", cfg.out, "Embedding output path");
  embed->add_flag("--merge-duplicates", cfg.merge_duplicates,
                "Merge points at distance zero instead of rejecting them");

  auto* verify = app.add_subcommand("verify", "Check the embedding bounds pair by pair");
  verify->add_option("--space", cfg.space_path, "Space file");
  verify->add_option("--embedding", cfg.embedding_path, "Embedding file");
  verify->add_option("--csv", cfg.csv, "Optional per-pair CSV output path");
  verify->add_option("--threads", cfg.threads, "Worker cap for the pair loop");
  verify->add_option("--out", cfg.out, "Report output path");
  verify->add_flag("--merge-duplicates", cfg.merge_duplicates,
                "Merge points at distance zero instead of rejecting them");

  auto* pipeline = app.add_subcommand("pipeline", "gen -> dims -> params -> embed -> verify");
  pipeline->add_option("--space", cfg.space_path, "Use an existing space instead of generating");
  pipeline->add_option("--family", cfg.family, "Generator family");
  pipeline->add_option("--size", cfg.size, "Point count (interval, gw_tree)");
  pipeline->add_option("--depth", cfg.depth, "Cantor recursion depth");
  pipeline->add_option("--arms", cfg.arms, "Star arm count");
  pipeline->add_option("--alpha", cfg.alpha, "Snowflake exponent");
  pipeline->add_option("--seed", cfg.seed, "Generator seed");
  pipeline->add_option("--input", cfg.input_path, "Base space for snowflake_of");
  pipeline->add_option("--epsilon", cfg.epsilon, "Snowflake exponent in (1/2,1)");
  pipeline->add_option("--theta", cfg.theta, "Spectrum parameter");
  pipeline->add_option("--delta", cfg.delta, "Dimension bound");
  pipeline->add_option("--grid", cfg.grid, "Quasidoubling R grid")->delimiter(',');
  pipeline->add_option("--n-offset", cfg.n_offset, "n = n0 + offset");
  pipeline->add_option("--grid-step", cfg.grid_step, "Tau search grid step");
  pipeline->add_option("--mode", cfg.mode, "strict|practical");
  pipeline->add_option("--budget-cap", cfg.budget_cap, "Color budget cap");
  pipeline->add_option("--log-base", cfg.log_base, "e|10");
  pipeline->add_option("--tau", cfg.tau, "Practical-mode tau override");
  pipeline->add_option("--colors", cfg.colors, "Practical-mode color count override");
  pipeline->add_option("--M", cfg.M, "Practical-mode vector dimension override");
  pipeline->add_option("--net-order", cfg.net_order, "input|farthest_point");
  pipeline->add_flag("--surrogate-threshold", cfg.surrogate_threshold, "Surrogate selection threshold");
  pipeline->add_flag("--dump-vectors", cfg.dump_vectors, "Dump selected vectors");
  pipeline->add_option("--threads", cfg.threads, "Worker cap");
  pipeline->add_option("--csv", cfg.csv, "Optional per-pair CSV output path");
  pipeline->add_flag("--merge-duplicates", cfg.merge_duplicates,
                "Merge points at distance zero instead of rejecting them");

  for (auto* sub : {gen, dims, params, nets, embed, verify, pipeline}) {
    add_common_flags(sub, cfg, manifest_path);
  }

  std::vector<const char*> argv;
  argv.push_back("snowembed");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  for (auto* sub : {gen, dims, params, nets, embed, verify, pipeline}) {
    if (sub->parsed()) active = sub;
  }

  try {
    cfg.subcommand = active->get_name();
    finalize_config(cfg, manifest_path, active);
    if (active == gen) return cmd_gen(cfg);
    if (active == dims) return cmd_dims(cfg);
    if (active == params) return cmd_params(cfg);
    if (active == nets) return cmd_nets(cfg);
    if (active == embed) return cmd_embed(cfg);
    if (active == verify) return cmd_verify(cfg);
    return cmd_pipeline(cfg);
  } catch (const MathError& e) {
    std::cerr << e.to_json().dump(2) << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << e.to_json().dump(2) << "\n";
    return 1;
  } catch (const std::exception& e) {
    Json j{{"error", "Unexpected"}, {"message", e.what()}};
    std::cerr << j.dump(2) << "\n";
    return 1;
  }
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace snowembed::cli
