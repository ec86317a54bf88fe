#include "tsad/checkpoint.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace tsad {

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

constexpr const char* kMagic = "tsad-checkpoint v1";

void write_hp(std::ostream& os, const Hyperparameters& hp) {
  os << "[hyperparameters]\n";
  os << "variant " << to_string(hp.variant) << '\n';
  os << "head " << to_string(hp.head) << '\n';
  os << "pooling " << to_string(hp.pooling) << '\n';
  os << "recon_mode " << to_string(hp.recon_mode) << '\n';
  os << "optimizer " << to_string(hp.optimizer) << '\n';
  os << "state_dim " << hp.state_dim << '\n';
  os << "batch_size " << hp.batch_size << '\n';
  os << "tau " << hp.tau << '\n';
  os << "lambda " << format_double(hp.lambda) << '\n';
  os << "alpha " << format_double(hp.alpha) << '\n';
  os << "decay_rate " << format_double(hp.decay_rate) << '\n';
  os << "learning_rate " << format_double(hp.learning_rate) << '\n';
  os << "beta " << format_double(hp.beta) << '\n';
  os << "nu " << format_double(hp.nu) << '\n';
  os << "nominal_period " << format_double(hp.nominal_period) << '\n';
  os << "grad_clip " << format_double(hp.grad_clip) << '\n';
  os << "decoder_depth " << hp.decoder_depth << '\n';
  os << "decay_cell_state " << (hp.decay_cell_state ? 1 : 0) << '\n';
  os << "max_epochs " << hp.max_epochs << '\n';
  os << "patience " << hp.patience << '\n';
  os << "seed " << hp.seed << '\n';
}

std::map<std::string, std::string> read_kv_section(std::istream& is, std::string& line) {
  std::map<std::string, std::string> kv;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line.front() == '[') break;  // next section header
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw DataError(cat("checkpoint: malformed line '", line, "'"));
    kv[line.substr(0, sp)] = line.substr(sp + 1);
  }
  return kv;
}

const std::string& need(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw DataError(cat("checkpoint: missing hyperparameter '", key, "'"));
  return it->second;
}

double parse_double(const std::string& s) {
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw DataError(cat("checkpoint: bad number '", s, "'"));
  }
}

Hyperparameters parse_hp(const std::map<std::string, std::string>& kv) {
  Hyperparameters hp;
  hp.variant = cell_variant_from_string(need(kv, "variant"));
  hp.head = head_kind_from_string(need(kv, "head"));
  hp.pooling = pooling_from_string(need(kv, "pooling"));
  hp.recon_mode = recon_mode_from_string(need(kv, "recon_mode"));
  hp.optimizer = optimizer_from_string(need(kv, "optimizer"));
  hp.state_dim = std::stoi(need(kv, "state_dim"));
  hp.batch_size = std::stoi(need(kv, "batch_size"));
  hp.tau = std::stoi(need(kv, "tau"));
  hp.lambda = parse_double(need(kv, "lambda"));
  hp.alpha = parse_double(need(kv, "alpha"));
  hp.decay_rate = parse_double(need(kv, "decay_rate"));
  hp.learning_rate = parse_double(need(kv, "learning_rate"));
  hp.beta = parse_double(need(kv, "beta"));
  hp.nu = parse_double(need(kv, "nu"));
  hp.nominal_period = parse_double(need(kv, "nominal_period"));
  hp.grad_clip = parse_double(need(kv, "grad_clip"));
  hp.decoder_depth = std::stoi(need(kv, "decoder_depth"));
  hp.decay_cell_state = need(kv, "decay_cell_state") == "1";
  hp.max_epochs = std::stoi(need(kv, "max_epochs"));
  hp.patience = std::stoi(need(kv, "patience"));
  hp.seed = std::stoull(need(kv, "seed"));
  return hp;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream os(path);
  if (!os) throw DataError(cat("checkpoint: cannot write '", path.string(), "'"));
  os << kMagic << '\n';
  write_hp(os, ckpt.hp);
  os << "[meta]\n";
  os << "input_dim " << ckpt.input_dim << '\n';
  os << "epoch " << ckpt.epoch << '\n';
  if (!ckpt.train_file.empty()) os << "train_file " << ckpt.train_file << '\n';
  os << "[rng]\n" << ckpt.rng << '\n';
  Model& model = const_cast<Model&>(ckpt.model);
  model.visit_params([&](const std::string& name, Mat& m) {
    os << "[tensor] " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        os << format_double(m(r, c)) << (c + 1 == m.cols() ? '\n' : ' ');
      }
    }
  });
  os << "[end]\n";
  if (!os) throw DataError(cat("checkpoint: write to '", path.string(), "' failed"));
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw DataError(cat("checkpoint: cannot read '", path.string(), "'"));
  std::string line;
  if (!std::getline(is, line) || line != kMagic) {
    throw DataError(cat("checkpoint: '", path.string(), "' is not a checkpoint file"));
  }
  if (!std::getline(is, line) || line != "[hyperparameters]") {
    throw DataError("checkpoint: expected [hyperparameters] section");
  }

  Checkpoint ckpt;
  auto hp_kv = read_kv_section(is, line);
  ckpt.hp = parse_hp(hp_kv);

  if (line != "[meta]") throw DataError("checkpoint: expected [meta] section");
  auto meta_kv = read_kv_section(is, line);
  ckpt.input_dim = std::stoi(need(meta_kv, "input_dim"));
  ckpt.epoch = std::stoi(need(meta_kv, "epoch"));
  if (auto it = meta_kv.find("train_file"); it != meta_kv.end()) ckpt.train_file = it->second;

  if (line != "[rng]") throw DataError("checkpoint: expected [rng] section");
  if (!(is >> ckpt.rng)) throw DataError("checkpoint: bad rng state");
  std::getline(is, line);  // eat remainder of the rng line

  // Build a model of the right shapes, then overwrite every tensor.
  Rng scratch(0);
  ckpt.model = Model::init(ckpt.hp, ckpt.input_dim, scratch);
  auto params = ckpt.model.trainable();
  std::map<std::string, Mat*> by_name;
  for (auto& [name, mat] : params) by_name[name] = mat;

  size_t loaded = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line == "[end]") break;
    std::istringstream header(line);
    std::string tag, name;
    Eigen::Index rows = 0, cols = 0;
    header >> tag >> name >> rows >> cols;
    if (tag != "[tensor]" || !header) {
      throw DataError(cat("checkpoint: malformed tensor header '", line, "'"));
    }
    auto it = by_name.find(name);
    if (it == by_name.end()) throw DataError(cat("checkpoint: unknown tensor '", name, "'"));
    Mat& m = *it->second;
    if (m.rows() != rows || m.cols() != cols) {
      throw DataError(cat("checkpoint: tensor '", name, "' is ", rows, "x", cols, ", expected ",
                          shape_str(m)));
    }
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) {
        if (!(is >> m(r, c))) throw DataError(cat("checkpoint: truncated tensor '", name, "'"));
      }
    }
    std::getline(is, line);  // finish the row line
    ++loaded;
  }
  if (loaded != params.size()) {
    throw DataError(cat("checkpoint: has ", loaded, " tensors, model needs ", params.size()));
  }
  return ckpt;
}

}  // namespace tsad
