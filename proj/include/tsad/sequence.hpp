#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tsad/tensor.hpp"

namespace tsad {

// A variable-length, irregularly sampled multivariate sequence. Row k of
// `values` is the sample observed at `timestamps[k]`. Timestamps are strictly
// increasing; the gaps between them are what the encoder variants consume.
struct IrregularSequence {
  std::string id;
  std::vector<double> timestamps;  // size K, strictly increasing
  Mat values;                      // K x M
  std::optional<int> label;        // -1 nominal, +1 anomaly; raw class id before relabeling

  int length() const { return static_cast<int>(timestamps.size()); }
  int dim() const { return static_cast<int>(values.cols()); }

  void validate() const {
    if (length() < 2) {
      throw DataError(cat("sequence '", id, "': needs at least 2 samples, has ", length()));
    }
    if (values.rows() != length()) {
      throw DataError(cat("sequence '", id, "': ", values.rows(), " samples vs ", length(),
                          " timestamps"));
    }
    for (size_t k = 1; k < timestamps.size(); ++k) {
      if (!(timestamps[k] > timestamps[k - 1])) {
        throw DataError(cat("sequence '", id, "': timestamps not strictly increasing at index ", k));
      }
    }
    for (double t : timestamps) {
      if (!std::isfinite(t)) throw DataError(cat("sequence '", id, "': non-finite timestamp"));
    }
    if (!values.allFinite()) {
      throw DataError(cat("sequence '", id, "': non-finite sample value"));
    }
  }
};

struct Dataset {
  std::vector<IrregularSequence> sequences;
  int feature_dim = 0;
  double nominal_period = 1.0;
  std::string class_mapping;  // human-readable record of any relabeling applied

  void validate() const {
    for (const auto& s : sequences) {
      s.validate();
      if (s.dim() != feature_dim) {
        throw DataError(cat("dataset: sequence '", s.id, "' has dim ", s.dim(), ", expected ",
                            feature_dim));
      }
    }
  }
};

}  // namespace tsad
