#pragma once

#include <filesystem>
#include <nlohmann/json_fwd.hpp>
#include <string>

#include "mrmap/potential.hpp"
#include "mrmap/train.hpp"

namespace mrmap {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  int format_version = kCheckpointVersion;
  PotentialParams params;
  TrainConfig config;
};

/// JSON checkpoint; numbers round-trip bit-exactly (shortest decimal
/// representation that reparses to the same double).
void save_checkpoint(const std::filesystem::path& path, const PotentialParams& params,
                     const TrainConfig& config);
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::json train_config_to_json(const TrainConfig& config);
TrainConfig train_config_from_json(const nlohmann::json& j);

/// Dataset persistence: CSV with one flattened sample per row and a header
/// row x0..x{p-1}; a sidecar <path>.json carries the dimensions and metadata.
void save_dataset(const std::filesystem::path& csv_path, const Matrix& data,
                  const nlohmann::json& meta);
Matrix load_dataset(const std::filesystem::path& csv_path, nlohmann::json* meta = nullptr);

/// ASCII PGM (P2) with values scaled from [lo, hi] to 0..255.
void write_pgm(const std::filesystem::path& path, const Matrix& image, double lo = 0.0,
               double hi = 1.0);

/// Deterministic minimal scatter plot: fixed viewport, points layered in the
/// order given. Identical inputs produce identical bytes.
struct ScatterSeries {
  std::vector<std::pair<double, double>> points;
  std::string color = "#1f77b4";
  double radius = 2.0;
  /// Optional per-point fill colors (overrides color when non-empty).
  std::vector<std::string> point_colors;
};
void write_svg_scatter(const std::filesystem::path& path, const std::vector<ScatterSeries>& series,
                       double xmin, double xmax, double ymin, double ymax,
                       const std::string& title = "");

/// Fixed-format double for CSV output (%.17g, locale-independent).
std::string format_double(double v);

}  // namespace mrmap
