#include "tsad/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include <json.hpp>

namespace tsad {

using nlohmann::json;

IrregularSequence parse_sequence_json(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw DataError(cat("sequence record is not valid JSON: ", e.what()));
  }
  if (!j.is_object()) throw DataError("sequence record must be a JSON object");

  IrregularSequence seq;
  for (const auto& [key, value] : j.items()) {
    if (key == "id") {
      if (value.is_string()) {
        seq.id = value.get<std::string>();
      } else if (value.is_number()) {
        seq.id = cat(value.get<long long>());
      } else {
        throw DataError("sequence 'id' must be a string or number");
      }
    } else if (key == "label") {
      if (!value.is_number_integer()) throw DataError("sequence 'label' must be an integer");
      seq.label = value.get<int>();
    } else if (key == "t") {
      if (!value.is_array()) throw DataError("sequence 't' must be an array");
      for (const auto& t : value) {
        if (!t.is_number()) throw DataError("sequence 't' entries must be numbers");
        seq.timestamps.push_back(t.get<double>());
      }
    } else if (key == "x") {
      if (!value.is_array() || value.empty()) throw DataError("sequence 'x' must be a non-empty array");
      const size_t rows = value.size();
      size_t cols = 0;
      for (size_t r = 0; r < rows; ++r) {
        const auto& row = value[r];
        if (!row.is_array() || row.empty()) {
          throw DataError("sequence 'x' entries must be non-empty arrays");
        }
        if (r == 0) {
          cols = row.size();
          seq.values.resize(rows, cols);
        } else if (row.size() != cols) {
          throw DataError(cat("sequence 'x' row ", r, " has ", row.size(), " values, expected ", cols));
        }
        for (size_t c = 0; c < cols; ++c) {
          if (!row[c].is_number()) throw DataError("sequence 'x' values must be numbers");
          seq.values(r, c) = row[c].get<double>();
        }
      }
    } else {
      throw DataError(cat("sequence record has unknown field '", key, "'"));
    }
  }
  if (seq.timestamps.empty()) throw DataError("sequence record is missing 't'");
  if (seq.values.size() == 0) throw DataError("sequence record is missing 'x'");
  seq.validate();
  return seq;
}

std::string sequence_to_json(const IrregularSequence& seq) {
  json j;
  j["id"] = seq.id;
  if (seq.label) j["label"] = *seq.label;
  j["t"] = json::array();
  for (double t : seq.timestamps) j["t"].push_back(t);
  j["x"] = json::array();
  for (Eigen::Index r = 0; r < seq.values.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < seq.values.cols(); ++c) row.push_back(seq.values(r, c));
    j["x"].push_back(std::move(row));
  }
  return j.dump();
}

Dataset read_dataset(std::istream& is, const std::string& origin) {
  Dataset out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      out.sequences.push_back(parse_sequence_json(line));
    } catch (const DataError& e) {
      throw DataError(cat(origin, ":", lineno, ": ", e.what()));
    }
  }
  if (out.sequences.empty()) throw DataError(cat(origin, ": no sequences"));
  out.feature_dim = out.sequences.front().dim();
  out.validate();
  return out;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError(cat("cannot read dataset '", path.string(), "'"));
  return read_dataset(is, path.string());
}

void save_dataset(const std::filesystem::path& path, const Dataset& dataset) {
  std::ofstream os(path);
  if (!os) throw DataError(cat("cannot write dataset '", path.string(), "'"));
  for (const auto& seq : dataset.sequences) os << sequence_to_json(seq) << '\n';
  if (!os) throw DataError(cat("write to '", path.string(), "' failed"));
}

IrregularSequence first_difference(const IrregularSequence& seq) {
  if (seq.length() < 2) {
    throw DataError(cat("first_difference: sequence '", seq.id, "' needs at least 2 samples"));
  }
  IrregularSequence out;
  out.id = seq.id;
  out.label = seq.label;
  const int K = seq.length();
  out.timestamps.assign(seq.timestamps.begin() + 1, seq.timestamps.end());
  out.values = seq.values.bottomRows(K - 1) - seq.values.topRows(K - 1);
  return out;
}

Dataset first_difference(const Dataset& dataset) {
  Dataset out = dataset;
  for (auto& seq : out.sequences) seq = first_difference(seq);
  out.validate();
  return out;
}

IrregularSequence random_drop(const IrregularSequence& seq, double rate, Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw DataError(cat("random_drop: rate must be in [0, 1), got ", rate));
  }
  const int K = seq.length();
  std::vector<char> keep(K, 0);
  int kept = 0;
  for (int k = 0; k < K; ++k) {
    if (rng.uniform() >= rate) {
      keep[k] = 1;
      ++kept;
    }
  }
  // Never hand back a degenerate sequence: top up with the earliest elements.
  for (int k = 0; k < K && kept < 2; ++k) {
    if (!keep[k]) {
      keep[k] = 1;
      ++kept;
    }
  }

  IrregularSequence out;
  out.id = seq.id;
  out.label = seq.label;
  out.values.resize(kept, seq.values.cols());
  out.timestamps.reserve(kept);
  int row = 0;
  for (int k = 0; k < K; ++k) {
    if (!keep[k]) continue;
    out.timestamps.push_back(seq.timestamps[k]);
    out.values.row(row++) = seq.values.row(k);
  }
  return out;
}

Dataset random_drop(const Dataset& dataset, double rate, Rng& rng) {
  Dataset out = dataset;
  for (auto& seq : out.sequences) seq = random_drop(seq, rate, rng);
  out.validate();
  return out;
}

std::vector<IrregularSequence> subsample_windows(const IrregularSequence& seq, int len_min,
                                                 int len_max, Rng& rng) {
  if (len_min < 2 || len_min > len_max) {
    throw DataError(cat("subsample_windows: bad length bounds [", len_min, ", ", len_max, "]"));
  }
  const int K = seq.length();
  std::vector<IrregularSequence> out;
  int pos = 0;
  int window = 0;
  while (K - pos >= len_min) {
    int len = static_cast<int>(rng.uniform_int(len_min, len_max));
    len = std::min(len, K - pos);
    IrregularSequence w;
    w.id = cat(seq.id, "#", window++);
    w.label = seq.label;
    w.timestamps.assign(seq.timestamps.begin() + pos, seq.timestamps.begin() + pos + len);
    w.values = seq.values.middleRows(pos, len);
    out.push_back(std::move(w));
    pos += len;
  }
  return out;
}

Dataset subsample_windows(const Dataset& dataset, int len_min, int len_max, Rng& rng) {
  Dataset out;
  out.feature_dim = dataset.feature_dim;
  out.nominal_period = dataset.nominal_period;
  out.class_mapping = dataset.class_mapping;
  for (const auto& seq : dataset.sequences) {
    for (auto& w : subsample_windows(seq, len_min, len_max, rng)) {
      out.sequences.push_back(std::move(w));
    }
  }
  if (out.sequences.empty()) {
    throw DataError("subsample_windows: no recording is as long as the minimum window");
  }
  out.validate();
  return out;
}

Dataset normalize(const Dataset& dataset) {
  if (dataset.sequences.empty()) throw DataError("normalize: empty dataset");
  const int M = dataset.feature_dim;
  Mat mean = Mat::Zero(1, M);
  long count = 0;
  for (const auto& seq : dataset.sequences) {
    mean += seq.values.colwise().sum();
    count += seq.length();
  }
  mean /= static_cast<double>(count);
  Mat var = Mat::Zero(1, M);
  for (const auto& seq : dataset.sequences) {
    var += (seq.values.rowwise() - mean.row(0)).array().square().matrix().colwise().sum();
  }
  var /= static_cast<double>(count);
  Mat stddev = var.cwiseSqrt().cwiseMax(1e-12);

  Dataset out = dataset;
  for (auto& seq : out.sequences) {
    seq.values = (seq.values.rowwise() - mean.row(0)).array().rowwise() /
                 stddev.row(0).array();
  }
  return out;
}

SplitResult split(const Dataset& dataset, double train_fraction, double validation_fraction,
                  double test_fraction, uint64_t seed) {
  const double fsum = train_fraction + validation_fraction + test_fraction;
  if (!(train_fraction > 0.0) || !(validation_fraction > 0.0) || !(test_fraction > 0.0)) {
    throw DataError("split: fractions must be positive");
  }
  if (fsum > 1.0 + 1e-12) throw DataError(cat("split: fractions sum to ", fsum, " > 1"));

  const size_t n = dataset.sequences.size();
  size_t n_train = static_cast<size_t>(std::llround(train_fraction * static_cast<double>(n)));
  size_t n_val = static_cast<size_t>(std::llround(validation_fraction * static_cast<double>(n)));
  size_t n_test = std::abs(fsum - 1.0) < 1e-12
                      ? n - n_train - n_val
                      : static_cast<size_t>(std::llround(test_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_val == 0 || n_test == 0 || n_train + n_val + n_test > n) {
    throw DataError(cat("split: fractions give ", n_train, "/", n_val, "/", n_test, " of ", n));
  }

  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);

  auto take = [&](size_t from, size_t count) {
    Dataset d;
    d.feature_dim = dataset.feature_dim;
    d.nominal_period = dataset.nominal_period;
    d.class_mapping = dataset.class_mapping;
    d.sequences.reserve(count);
    for (size_t i = from; i < from + count; ++i) d.sequences.push_back(dataset.sequences[order[i]]);
    return d;
  };
  SplitResult out;
  out.train = take(0, n_train);
  out.validation = take(n_train, n_val);
  out.test = take(n_train + n_val, n_test);
  return out;
}

RelabelResult relabel_binary(const Dataset& dataset, const std::vector<int>& nominal_classes,
                             const std::vector<int>& anomaly_classes) {
  std::set<int> nominal(nominal_classes.begin(), nominal_classes.end());
  std::set<int> anomaly(anomaly_classes.begin(), anomaly_classes.end());
  for (int c : nominal) {
    if (anomaly.count(c)) throw DataError(cat("relabel_binary: class ", c, " is in both groups"));
  }

  RelabelResult out;
  out.dataset.feature_dim = dataset.feature_dim;
  out.dataset.nominal_period = dataset.nominal_period;
  size_t negatives = 0;
  for (const auto& seq : dataset.sequences) {
    if (!seq.label) throw DataError(cat("relabel_binary: sequence '", seq.id, "' has no class"));
    const int c = *seq.label;
    const bool is_nominal = nominal.count(c) > 0;
    const bool is_anomaly = anomaly.count(c) > 0;
    if (!is_nominal && !is_anomaly) continue;  // unlisted classes are dropped
    IrregularSequence copy = seq;
    copy.label = is_nominal ? -1 : +1;
    negatives += is_nominal ? 1 : 0;
    out.dataset.sequences.push_back(std::move(copy));
  }
  if (out.dataset.sequences.empty()) throw DataError("relabel_binary: no sequences kept");
  out.negative_class_ratio =
      static_cast<double>(negatives) / static_cast<double>(out.dataset.sequences.size());

  std::ostringstream mapping;
  mapping << "nominal(-1): {";
  for (int c : nominal) mapping << c << ' ';
  mapping << "} anomaly(+1): {";
  for (int c : anomaly) mapping << c << ' ';
  mapping << "} negative ratio " << out.negative_class_ratio;
  out.dataset.class_mapping = mapping.str();
  return out;
}

void SynthConfig::validate() const {
  if (count < 1) throw ConfigError(cat("synth: count must be >= 1, got ", count));
  if (anomaly_fraction < 0.0 || anomaly_fraction > 1.0) {
    throw ConfigError(cat("synth: anomaly fraction must be in [0, 1], got ", anomaly_fraction));
  }
  if (feature_dim < 1) throw ConfigError(cat("synth: feature dim must be >= 1, got ", feature_dim));
  if (!(period > 0.0)) throw ConfigError(cat("synth: period must be > 0, got ", period));
  if (len_min < 2 || len_min > len_max) {
    throw ConfigError(cat("synth: bad length bounds [", len_min, ", ", len_max, "]"));
  }
  if (regime_min < 1 || regime_min > regime_max) {
    throw ConfigError(cat("synth: bad regime bounds [", regime_min, ", ", regime_max, "]"));
  }
}

Dataset synth_generate(const SynthConfig& config, Rng& rng) {
  config.validate();
  const int n_anomaly = static_cast<int>(std::lround(config.anomaly_fraction * config.count));

  // Exact anomaly count by construction: lay out labels, then shuffle.
  std::vector<int> labels(config.count, -1);
  for (int i = 0; i < n_anomaly; ++i) labels[i] = +1;
  rng.shuffle(labels);

  Dataset out;
  out.feature_dim = config.feature_dim;
  out.nominal_period = config.period;
  for (int i = 0; i < config.count; ++i) {
    const int K = static_cast<int>(rng.uniform_int(config.len_min, config.len_max));
    IrregularSequence seq;
    seq.id = cat("synth-", i);
    seq.label = labels[i];
    seq.timestamps.resize(K);
    seq.values.resize(K, config.feature_dim);
    for (int k = 0; k < K; ++k) seq.timestamps[k] = k * config.period;

    if (labels[i] < 0) {
      // Damped sinusoid with per-feature phase and mild observation noise.
      const double freq = rng.uniform(config.freq_min, config.freq_max);
      const double amp = rng.uniform(config.amp_min, config.amp_max);
      for (int m = 0; m < config.feature_dim; ++m) {
        const double phase = rng.uniform(0.0, 2.0 * M_PI);
        for (int k = 0; k < K; ++k) {
          const double t = seq.timestamps[k];
          seq.values(k, m) = amp * std::exp(-config.damping * t) *
                                 std::sin(2.0 * M_PI * freq * t + phase) +
                             config.noise * rng.normal();
        }
      }
    } else {
      // Noise whose scale flips between quiet and burst regimes.
      for (int m = 0; m < config.feature_dim; ++m) {
        int k = 0;
        bool burst = rng.uniform() < 0.5;
        while (k < K) {
          const int seg = static_cast<int>(rng.uniform_int(config.regime_min, config.regime_max));
          const double sigma = burst ? config.burst_sigma : config.quiet_sigma;
          for (int j = 0; j < seg && k < K; ++j, ++k) seq.values(k, m) = sigma * rng.normal();
          burst = !burst;
        }
      }
    }
    out.sequences.push_back(std::move(seq));
  }
  out.validate();
  return out;
}

}  // namespace tsad
