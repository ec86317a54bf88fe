#include "tsad/commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>

#include "tsad/checkpoint.hpp"

namespace tsad {

using nlohmann::json;

namespace {

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw DataError(cat("cannot create output directory '", dir.string(), "'"));
}

std::string rate_tag(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", rate);
  return buf;
}

}  // namespace

void write_provenance(const std::filesystem::path& out_dir, const std::string& command,
                      const json& config) {
  json p;
  p["command"] = command;
  p["version"] = kVersion;
  p["config"] = config;
  p["config_hash"] = cat(std::hex, fnv1a64(config.dump()));
  std::ofstream os(out_dir / "provenance.json");
  if (!os) throw DataError(cat("cannot write provenance in '", out_dir.string(), "'"));
  os << p.dump(2) << '\n';
}

PreprocessOutput run_preprocess(const PreprocessConfig& cfg, const json& raw) {
  ensure_dir(cfg.out_dir);
  PreprocessOutput out;
  Rng master(cfg.seed);

  const bool noop = !cfg.first_difference && !cfg.normalize && !cfg.relabel && !cfg.subsample &&
                    cfg.drop_rates.empty() && !cfg.split_fractions;

  for (size_t ii = 0; ii < cfg.inputs.size(); ++ii) {
    const auto& input = cfg.inputs[ii];
    const std::string stem = input.stem().string();

    if (noop) {
      // Nothing to do: pass the file through untouched.
      const auto dst = cfg.out_dir / (stem + "_processed.jsonl");
      std::filesystem::copy_file(input, dst, std::filesystem::copy_options::overwrite_existing);
      out.files.push_back(dst);
      continue;
    }

    Dataset base = load_dataset(input);
    if (cfg.relabel) {
      auto relabeled = relabel_binary(base, cfg.relabel->first, cfg.relabel->second);
      base = std::move(relabeled.dataset);
      std::cerr << "preprocess: " << stem << ": negative class ratio "
                << relabeled.negative_class_ratio << "\n";
    }
    if (cfg.first_difference) base = first_difference(base);
    if (cfg.subsample) {
      Rng rng = master.spawn(1000 + ii);
      base = subsample_windows(base, cfg.subsample->first, cfg.subsample->second, rng);
    }
    if (cfg.normalize) base = normalize(base);

    std::vector<std::pair<std::string, Dataset>> variants;
    if (cfg.drop_rates.empty()) {
      variants.emplace_back(stem + "_processed", base);
    } else {
      for (size_t ri = 0; ri < cfg.drop_rates.size(); ++ri) {
        Rng rng = master.spawn(2000 + 100 * ii + ri);
        variants.emplace_back(stem + "_drop" + rate_tag(cfg.drop_rates[ri]),
                              random_drop(base, cfg.drop_rates[ri], rng));
      }
    }

    for (auto& [name, dataset] : variants) {
      if (cfg.split_fractions) {
        const auto& f = *cfg.split_fractions;
        auto parts = split(dataset, f[0], f[1], f[2], master.spawn(3000 + ii).next_u64());
        for (auto& [suffix, part] :
             std::initializer_list<std::pair<const char*, Dataset*>>{
                 {"_train", &parts.train}, {"_validation", &parts.validation}, {"_test", &parts.test}}) {
          const auto dst = cfg.out_dir / (name + suffix + ".jsonl");
          save_dataset(dst, *part);
          out.files.push_back(dst);
        }
      } else {
        const auto dst = cfg.out_dir / (name + ".jsonl");
        save_dataset(dst, dataset);
        out.files.push_back(dst);
      }
    }
  }

  write_provenance(cfg.out_dir, "preprocess", raw);
  return out;
}

SynthOutput run_synth(const SynthCommandConfig& cfg, const json& raw) {
  ensure_dir(cfg.out_dir);
  Rng rng(cfg.seed);
  SynthOutput out;

  auto emit = [&](int count, const char* name, std::filesystem::path& path) {
    SynthConfig sc = cfg.synth;
    sc.count = count;
    Dataset d = synth_generate(sc, rng);
    path = cfg.out_dir / cat(name, ".jsonl");
    save_dataset(path, d);
  };
  emit(cfg.count_train, "train", out.train);
  emit(cfg.count_validation, "validation", out.validation);
  emit(cfg.count_test, "test", out.test);

  write_provenance(cfg.out_dir, "synth", raw);
  return out;
}

TrainOutput run_train(const TrainConfig& cfg, const json& raw) {
  ensure_dir(cfg.out_dir);
  Dataset train = load_dataset(cfg.train_path);
  Dataset validation = load_dataset(cfg.validation_path);
  if (train.feature_dim != validation.feature_dim) {
    throw DataError(cat("train: feature dims differ (", train.feature_dim, " vs ",
                        validation.feature_dim, ")"));
  }

  TrainOutput out;
  out.report = train_offline(train.sequences, validation.sequences, cfg.hp, cfg.mode);

  Checkpoint ckpt;
  ckpt.hp = cfg.hp;
  ckpt.model = out.report.model;
  ckpt.rng = out.report.rng;
  ckpt.epoch = out.report.best_epoch;
  ckpt.input_dim = train.feature_dim;
  ckpt.train_file = cfg.train_path.string();
  out.checkpoint = cfg.out_dir / "checkpoint.ckpt";
  save_checkpoint(out.checkpoint, ckpt);
  out.report.checkpoint_path = out.checkpoint.string();

  out.losses = cfg.out_dir / "losses.csv";
  std::ofstream os(out.losses);
  if (!os) throw DataError(cat("cannot write '", out.losses.string(), "'"));
  os << "epoch,train_loss,val_loss\n";
  for (size_t e = 0; e < out.report.epochs.size(); ++e) {
    os << e << ',' << format_double(out.report.epochs[e].train_loss) << ','
       << format_double(out.report.epochs[e].val_loss) << '\n';
  }

  write_provenance(cfg.out_dir, "train", raw);
  return out;
}

EvalOutput run_eval(const EvalConfig& cfg, const json& raw) {
  ensure_dir(cfg.out_dir);
  Dataset test = load_dataset(cfg.test_path);
  std::vector<int> labels;
  for (const auto& seq : test.sequences) {
    if (!seq.label) {
      throw DataError(cat("eval: sequence '", seq.id, "' has no label; AUC needs labels"));
    }
    if (*seq.label != -1 && *seq.label != +1) {
      throw DataError(cat("eval: sequence '", seq.id, "' has class ", *seq.label,
                          "; relabel to +/-1 first"));
    }
    labels.push_back(*seq.label);
  }

  EvalOutput out;
  bool on_training_data = false;
  for (const auto& [name, path] : cfg.checkpoints) {
    Checkpoint ckpt = load_checkpoint(path);
    if (!ckpt.train_file.empty() && ckpt.train_file == cfg.test_path.string()) {
      on_training_data = true;
    }
    if (ckpt.input_dim != test.feature_dim) {
      throw DataError(cat("eval: checkpoint '", name, "' expects dim ", ckpt.input_dim,
                          ", test data has ", test.feature_dim));
    }
    // Labels play no part in scoring; they only grade the scores afterwards.
    std::vector<double> scores;
    scores.reserve(test.sequences.size());
    for (const auto& seq : test.sequences) {
      const Vec pooled = encode(ckpt.model.encoder, seq, ckpt.hp.pooling).pooled;
      scores.push_back(anomaly_score(ckpt.model.classifier, pooled));
    }
    out.curves.emplace_back(name, roc_curve(scores, labels));
  }

  const std::string note = on_training_data ? "evaluated-on-training-data" : "";
  out.files = emit_report(out.curves, cfg.out_dir, cfg.stem, note);
  write_provenance(cfg.out_dir, "eval", raw);
  return out;
}

OnlineOutput run_online(const OnlineConfig& cfg, const json& raw, std::istream* stream_override) {
  ensure_dir(cfg.out_dir);

  std::ifstream file_stream;
  std::istream* in = stream_override;
  if (!in) {
    if (cfg.input == "-") {
      in = &std::cin;
    } else {
      file_stream.open(cfg.input);
      if (!file_stream) throw DataError(cat("cannot read stream '", cfg.input, "'"));
      in = &file_stream;
    }
  }

  OnlineOutput out;
  out.verdicts = cfg.out_dir / "verdicts.jsonl";
  std::ofstream verdict_os(out.verdicts);
  if (!verdict_os) throw DataError(cat("cannot write '", out.verdicts.string(), "'"));

  std::unique_ptr<OnlineDetector> detector;
  if (cfg.feature_dim > 0) {
    detector = std::make_unique<OnlineDetector>(cfg.candidates, cfg.pso, cfg.feature_dim, cfg.seed);
  }

  std::string line;
  long lineno = 0;
  while (std::getline(*in, line)) {
    ++lineno;
    if (line.empty()) continue;
    ++out.records;
    IrregularSequence seq;
    try {
      seq = parse_sequence_json(line);
      if (!detector) {
        detector = std::make_unique<OnlineDetector>(cfg.candidates, cfg.pso, seq.dim(), cfg.seed);
      }
      const Verdict v = detector->process(seq);
      json rec;
      rec["id"] = v.id;
      rec["score"] = v.score;
      rec["decision"] = v.decision;
      rec["seen"] = v.seen;
      verdict_os << rec.dump() << '\n';
    } catch (const DataError& e) {
      std::cerr << "online: line " << lineno << " skipped: " << e.what() << "\n";
      ++out.skipped;
    }
  }
  if (!detector) throw DataError("online: stream had no valid sequences");

  out.committed_index = detector->committed_index();
  out.stream_losses = detector->stream_losses();

  Checkpoint ckpt;
  const OnlineState& state = detector->state();
  ckpt.hp = state.hp;
  ckpt.model = state.model;
  ckpt.rng = Rng(state.hp.seed);
  ckpt.epoch = static_cast<int>(state.seen);
  ckpt.input_dim = state.model.encoder.cfg.input_dim;
  out.checkpoint = cfg.out_dir / "checkpoint.ckpt";
  save_checkpoint(out.checkpoint, ckpt);

  json summary;
  summary["records"] = out.records;
  summary["verdicts"] = out.records - out.skipped;
  summary["skipped"] = out.skipped;
  summary["committed_index"] = out.committed_index;
  summary["sequences_seen"] = detector->seen();
  std::ofstream sos(cfg.out_dir / "summary.json");
  sos << summary.dump(2) << '\n';

  write_provenance(cfg.out_dir, "online", raw);
  return out;
}

}  // namespace tsad
