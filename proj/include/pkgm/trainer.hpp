#pragma once

#include "pkgm/adam.hpp"
#include "pkgm/model.hpp"
#include "pkgm/triple_store.hpp"

namespace pkgm {

struct TrainResult {
  ModelParams params;
  std::vector<double> epoch_mean_loss;
  uint64_t config_hash = 0;
};

// Margin-loss training with lazy Adam over per-batch sparse gradients.
// Single-worker mode is deterministic for a fixed seed; workers > 1
// shards each batch across threads with last-writer-wins updates and
// gives up determinism. Throws Error with step diagnostics if the loss
// goes non-finite.
TrainResult train(const TripleStore& store, const TrainConfig& config);

}  // namespace pkgm
