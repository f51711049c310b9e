#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "saddleflow/core.hpp"

namespace saddleflow {

/// Rows x_i ~ N(0, diag(covariance)) drawn from Rng(seed), y = X beta_star.
struct GeneratorSpec {
    Index n = 0;
    Index d = 0;
    std::uint64_t seed = 0;
    std::vector<double> covariance;  // diagonal; empty means identity
    Vector beta_star;
};

[[nodiscard]] GeneratorSpec generator_from_json(const nlohmann::json& j);
[[nodiscard]] nlohmann::json to_json(const GeneratorSpec& spec);
[[nodiscard]] Dataset generate_dataset(const GeneratorSpec& spec);

/// Writes X.csv, y.csv and spec.json into `dir`.
void write_generated(const std::filesystem::path& dir, const GeneratorSpec& spec);

/// Builds the dataset described by the "dataset" entry of a run configuration:
/// {"x": path, "y": path, "header": bool}, {"generator": {...}} or
/// {"gram": [[...]], "beta_star": [...]}.
[[nodiscard]] Dataset dataset_from_config(const nlohmann::json& cfg, const std::filesystem::path& base);

struct RunResult {
    nlohmann::json bundle;
    bool ok = true;
};

/// Runs path -> key equation -> audit against the homotopy -> optional
/// expected times -> hybrid path -> optional alpha sweep, writing bundle.json
/// and CSV artifacts under `out_dir`. Stage errors are recorded in the bundle;
/// `ok` is false iff a hard assertion failed. Throws InvalidArgument on an
/// empty or malformed configuration.
[[nodiscard]] RunResult run_all(const nlohmann::json& cfg, const std::filesystem::path& base,
                                const std::filesystem::path& out_dir);

}  // namespace saddleflow
