#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tsad/errors.hpp"

namespace tsad {

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

// Operating points swept over every distinct score (descending, ties
// grouped), from (0,0) at threshold +inf to (1,1) at the minimum score.
// `auc` is the trapezoidal area under the points.
struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

// Labels are +/-1 with +1 = anomaly; a score at or above the threshold
// predicts anomaly. Both classes must be present.
RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels);

// Independent oracle: exhaustive concordant-pair count with half credit for
// ties, (concordant + ties/2) / (pos * neg).
double auc_pairwise(const std::vector<double>& scores, const std::vector<int>& labels);

// Writes one self-contained SVG plot (all curves, AUC in the legend) and one
// CSV of curve points per model: <stem>.svg and <stem>_<model>.csv under
// `out_dir`. `note` lands in every CSV header line. Returns written paths.
std::vector<std::filesystem::path> emit_report(
    const std::vector<std::pair<std::string, RocCurve>>& curves,
    const std::filesystem::path& out_dir, const std::string& stem, const std::string& note = "");

// Reads back a CSV written by emit_report.
RocCurve read_roc_csv(const std::filesystem::path& path);

}  // namespace tsad
