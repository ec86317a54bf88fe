#include "tsad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "tsad/checkpoint.hpp"  // format_double

namespace tsad {

namespace {

void check_inputs(const std::vector<double>& scores, const std::vector<int>& labels,
                  const char* op) {
  if (scores.size() != labels.size()) {
    throw Error(cat(op, ": ", scores.size(), " scores vs ", labels.size(), " labels"));
  }
  if (scores.empty()) throw Error(cat(op, ": empty input"));
  size_t pos = 0, neg = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == +1) {
      ++pos;
    } else if (labels[i] == -1) {
      ++neg;
    } else {
      throw DataError(cat(op, ": label must be +/-1, got ", labels[i]));
    }
    if (!std::isfinite(scores[i])) throw DataError(cat(op, ": non-finite score"));
  }
  if (pos == 0 || neg == 0) {
    throw DataError(cat(op, ": AUC needs both classes, got ", pos, " anomalies and ", neg,
                        " nominals"));
  }
}

}  // namespace

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_inputs(scores, labels, "roc_curve");

  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return scores[a] > scores[b]; });

  double total_pos = 0, total_neg = 0;
  for (int y : labels) (y == +1 ? total_pos : total_neg) += 1.0;

  RocCurve curve;
  curve.points.push_back({std::numeric_limits<double>::infinity(), 0.0, 0.0});

  double tp = 0, fp = 0;
  size_t i = 0;
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    // Consume the whole tie group at this threshold.
    while (i < order.size() && scores[order[i]] == threshold) {
      (labels[order[i]] == +1 ? tp : fp) += 1.0;
      ++i;
    }
    curve.points.push_back({threshold, fp / total_neg, tp / total_pos});
  }

  double auc = 0.0;
  for (size_t k = 1; k < curve.points.size(); ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    auc += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  curve.auc = auc;
  return curve;
}

double auc_pairwise(const std::vector<double>& scores, const std::vector<int>& labels) {
  check_inputs(scores, labels, "auc_pairwise");
  double concordant = 0.0, ties = 0.0, pairs = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != +1) continue;
    for (size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != -1) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) {
        concordant += 1.0;
      } else if (scores[i] == scores[j]) {
        ties += 1.0;
      }
    }
  }
  return (concordant + 0.5 * ties) / pairs;
}

namespace {

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

void write_svg(const std::filesystem::path& path,
               const std::vector<std::pair<std::string, RocCurve>>& curves) {
  std::ofstream os(path);
  if (!os) throw DataError(cat("emit_report: cannot write '", path.string(), "'"));

  const double W = 640, H = 480, ml = 60, mr = 20, mt = 20, mb = 50;
  const double pw = W - ml - mr, ph = H - mt - mb;
  auto px = [&](double fpr) { return ml + fpr * pw; };
  auto py = [&](double tpr) { return mt + (1.0 - tpr) * ph; };

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";

  // axes, grid and ticks
  for (int i = 0; i <= 5; ++i) {
    const double f = i / 5.0;
    os << "<line x1=\"" << fmt(px(f)) << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << fmt(px(f))
       << "\" y2=\"" << fmt(py(1)) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "<line x1=\"" << fmt(px(0)) << "\" y1=\"" << fmt(py(f)) << "\" x2=\"" << fmt(px(1))
       << "\" y2=\"" << fmt(py(f)) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt(px(f)) << "\" y=\"" << fmt(py(0) + 20)
       << "\" font-size=\"12\" text-anchor=\"middle\">" << fmt(f) << "</text>\n";
    os << "<text x=\"" << fmt(px(0) - 8) << "\" y=\"" << fmt(py(f) + 4)
       << "\" font-size=\"12\" text-anchor=\"end\">" << fmt(f) << "</text>\n";
  }
  os << "<line x1=\"" << fmt(px(0)) << "\" y1=\"" << fmt(py(1)) << "\" x2=\"" << fmt(px(0))
     << "\" y2=\"" << fmt(py(0)) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  os << "<line x1=\"" << fmt(px(0)) << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << fmt(px(1))
     << "\" y2=\"" << fmt(py(0)) << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
  os << "<line x1=\"" << fmt(px(0)) << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << fmt(px(1))
     << "\" y2=\"" << fmt(py(1)) << "\" stroke=\"#999999\" stroke-dasharray=\"6 4\"/>\n";
  os << "<text x=\"" << fmt(ml + pw / 2) << "\" y=\"" << fmt(H - 12)
     << "\" font-size=\"14\" text-anchor=\"middle\">False positive rate</text>\n";
  os << "<text x=\"16\" y=\"" << fmt(mt + ph / 2)
     << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << fmt(mt + ph / 2)
     << ")\">True positive rate</text>\n";

  for (size_t ci = 0; ci < curves.size(); ++ci) {
    const char* color = kPalette[ci % (sizeof(kPalette) / sizeof(kPalette[0]))];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& pt : curves[ci].second.points) {
      os << fmt(px(pt.fpr)) << ',' << fmt(py(pt.tpr)) << ' ';
    }
    os << "\"/>\n";
    const double ly = mt + 24 + 18 * static_cast<double>(ci);
    os << "<line x1=\"" << fmt(px(0) + 14) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
       << fmt(px(0) + 44) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color
       << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << fmt(px(0) + 50) << "\" y=\"" << fmt(ly)
       << "\" font-size=\"12\">" << curves[ci].first << " (AUC " << fmt(curves[ci].second.auc, 4)
       << ")</text>\n";
  }
  os << "</svg>\n";
  if (!os) throw DataError(cat("emit_report: write to '", path.string(), "' failed"));
}

}  // namespace

std::vector<std::filesystem::path> emit_report(
    const std::vector<std::pair<std::string, RocCurve>>& curves,
    const std::filesystem::path& out_dir, const std::string& stem, const std::string& note) {
  if (curves.empty()) throw Error("emit_report: no curves");

  std::vector<std::filesystem::path> written;
  const auto svg_path = out_dir / (stem + ".svg");
  write_svg(svg_path, curves);
  written.push_back(svg_path);

  for (const auto& [name, curve] : curves) {
    const auto csv_path = out_dir / (stem + "_" + name + ".csv");
    std::ofstream os(csv_path);
    if (!os) throw DataError(cat("emit_report: cannot write '", csv_path.string(), "'"));
    os << "# model=" << name << " auc=" << format_double(curve.auc);
    if (!note.empty()) os << ' ' << note;
    os << '\n';
    os << "threshold,fpr,tpr\n";
    for (const auto& pt : curve.points) {
      os << format_double(pt.threshold) << ',' << format_double(pt.fpr) << ','
         << format_double(pt.tpr) << '\n';
    }
    if (!os) throw DataError(cat("emit_report: write to '", csv_path.string(), "' failed"));
    written.push_back(csv_path);
  }
  return written;
}

RocCurve read_roc_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError(cat("cannot read roc table '", path.string(), "'"));
  RocCurve curve;
  bool have_auc = false;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto pos = line.find("auc=");
      if (pos != std::string::npos) {
        curve.auc = std::stod(line.substr(pos + 4));
        have_auc = true;
      }
      continue;
    }
    if (line == "threshold,fpr,tpr") continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) {
      throw DataError(cat("roc table '", path.string(), "': malformed row '", line, "'"));
    }
    RocPoint pt;
    pt.threshold = std::stod(line.substr(0, c1));
    pt.fpr = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
    pt.tpr = std::stod(line.substr(c2 + 1));
    curve.points.push_back(pt);
  }
  if (!have_auc || curve.points.empty()) {
    throw DataError(cat("roc table '", path.string(), "' is incomplete"));
  }
  return curve;
}

}  // namespace tsad
