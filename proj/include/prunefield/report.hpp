#pragma once

#include "prunefield/metrics.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace prunefield {

struct ExperimentReport {
  std::string label;
  std::string strategy;
  std::size_t params = 0;
  std::size_t size_bytes = 0;
  Psnr psnr = Psnr::infinite();
  double mse = 0.0;
  double sec_per_iter = 0.0;
  std::optional<double> remaining_edge_pct;

  bool operator==(const ExperimentReport&) const = default;
};

enum class ReportFormat { csv, json };

/// Column order: label, strategy, params, size_bytes, psnr, mse,
/// sec_per_iter, remaining_edge_pct. Floats use the shortest round-trip
/// form. Infinite PSNR is "inf" in CSV and null with psnr_infinite = true
/// in JSON; a missing remaining_edge_pct is an empty field / null.
std::string format_report(const std::vector<ExperimentReport>& reports, ReportFormat format);
std::vector<ExperimentReport> parse_report(const std::string& text, ReportFormat format);

/// Throws InvalidArgument for an empty list and IoError when the file
/// cannot be written.
void emit_report(const std::vector<ExperimentReport>& reports, ReportFormat format,
                 const std::filesystem::path& path);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace prunefield
