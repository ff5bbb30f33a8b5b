#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "snowembed/dimension.hpp"
#include "snowembed/embedding.hpp"
#include "snowembed/errors.hpp"
#include "snowembed/metric_space.hpp"
#include "snowembed/nets.hpp"
#include "snowembed/params.hpp"
#include "snowembed/verification.hpp"

namespace snowembed {

// Every artifact file carries {"schema": 1, "kind": ...}; readers check both.
inline constexpr int kSchemaVersion = 1;

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);
void write_json_file(const std::filesystem::path& path, const Json& j);
Json parse_json_file(const std::filesystem::path& path);

Json space_to_json(const FiniteMetricSpace& space, Json metadata = Json());
FiniteMetricSpace space_from_json(const Json& j, const ValidateOptions& opts = {});
std::string space_to_csv(const FiniteMetricSpace& space);
FiniteMetricSpace space_from_csv(const std::string& text, const ValidateOptions& opts = {});
/// Reads .json or .csv by extension; both paths run the full validator.
FiniteMetricSpace read_space_file(const std::filesystem::path& path,
                                  const ValidateOptions& opts = {});

Json params_to_json(const EmbeddingParams& p);
EmbeddingParams params_from_json(const Json& j);

Json dimension_estimate_to_json(const std::string& what, const DimensionEstimate& est);
Json quasidoubling_to_json(const QuasidoublingEstimate& est);
double quasidoubling_C_from_json(const Json& j);

Json nets_to_json(const NetHierarchy& h, const EmbeddingParams& p, std::uint64_t space_hash);

Json embedding_to_json(const Embedding& embedding, const std::vector<CoordinateMap>* dump_vectors = nullptr);
Embedding embedding_from_json(const Json& j);

Json report_to_json(const DistortionReport& r);
std::string report_to_csv(const DistortionReport& r);

}  // namespace snowembed
