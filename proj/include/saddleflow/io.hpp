#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "saddleflow/core.hpp"
#include "saddleflow/flow.hpp"
#include "saddleflow/saddle_path.hpp"

namespace saddleflow {

/// Comma-separated reals, one row per line. `header` skips the first line.
[[nodiscard]] Matrix read_csv(const std::filesystem::path& path, bool header = false);
[[nodiscard]] Dataset load_dataset(const std::filesystem::path& x_path, const std::filesystem::path& y_path,
                                   bool header = false);

/// Shortest round-trip decimal form with at most 17 significant digits.
[[nodiscard]] std::string format_double(double v);

[[nodiscard]] std::string csv_text(const std::vector<std::string>& columns,
                                   const std::vector<std::vector<double>>& rows);
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
void write_text(const std::filesystem::path& path, const std::string& text);

/// JSON text with every number printed through format_double; non-finite
/// numbers become null.
[[nodiscard]] std::string dump_json(const nlohmann::json& value, int indent = 2);

[[nodiscard]] nlohmann::json to_json(const Vector& v);
[[nodiscard]] nlohmann::json to_json(const SaddlePath& path);
[[nodiscard]] Vector vector_from_json(const nlohmann::json& j);
[[nodiscard]] Matrix matrix_from_json(const nlohmann::json& j);

/// Columns t, beta_1..beta_d, loss.
[[nodiscard]] std::string trajectory_csv(const FlowTrajectory& traj);
/// Columns segment, kind (0 saddle, 1 orbit), tau_in, tau_out, beta_1..beta_d.
[[nodiscard]] std::string hybrid_csv(const HybridPath& hybrid);

}  // namespace saddleflow
