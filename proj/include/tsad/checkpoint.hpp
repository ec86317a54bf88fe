#pragma once

#include <filesystem>
#include <string>

#include "tsad/model.hpp"
#include "tsad/rng.hpp"

namespace tsad {

// On-disk snapshot of a training run: hyperparameters, every parameter tensor
// with an explicit shape header, the RNG state and the epoch index. Plain
// text, doubles printed with 17 significant digits so reading a file back
// reproduces the exact bits.
struct Checkpoint {
  Hyperparameters hp;
  Model model;
  Rng rng;
  int epoch = 0;
  int input_dim = 0;
  std::string train_file;  // provenance: which file the model was fitted on
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// 17-significant-digit decimal, the round-trip-exact form used in all
// text artifacts.
std::string format_double(double v);

}  // namespace tsad
