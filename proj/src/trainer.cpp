#include "pkgm/trainer.hpp"

#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "pkgm/vecmath.hpp"

namespace pkgm {

namespace {

void renormalize_touched_entities(ModelParams& params, const SparseGrad& g) {
  for (const auto& [e, _] : g.entity) {
    auto row = params.entity(e);
    const double n = l2_norm(row);
    if (n > 0.0)
      for (auto& x : row) x /= n;
  }
}

}  // namespace

TrainResult train(const TripleStore& store, const TrainConfig& config) {
  config.validate();
  if (store.empty()) throw ConfigError("cannot train on an empty store");

  TrainResult result;
  result.config_hash = config.hash();
  result.params = ModelParams::init(store.n_entities(), store.n_relations(),
                                    config.dim, config.seed);
  ModelParams& params = result.params;

  SparseAdam opt(config.learning_rate, config.adam_beta1, config.adam_beta2,
                 config.adam_eps);
  Rng shuffle_rng(config.seed, /*stream=*/1);

  const size_t n = store.size();
  std::vector<uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);

  for (uint32_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    size_t epoch_pairs = 0;

    for (size_t start = 0; start < n; start += config.batch_size) {
      const size_t end = std::min(n, start + config.batch_size);
      const uint64_t step = epoch * ((n + config.batch_size - 1) /
                                     config.batch_size) +
                            start / config.batch_size;
      double step_loss = 0.0;

      if (config.workers <= 1) {
        Rng neg_rng(config.seed, /*stream=*/2 + step);
        SparseGrad g(config.dim);
        for (size_t i = start; i < end; ++i) {
          const Triple& pos = store.triples()[order[i]];
          for (uint32_t k = 0; k < config.negatives_per_edge; ++k) {
            const Triple neg = store.sample_negative(pos, neg_rng);
            step_loss += accumulate_pair_grad(params, pos, neg, config.margin, g);
          }
        }
        opt.step(params, g);
        if (config.normalize_entities) renormalize_touched_entities(params, g);
      } else {
        // Disjoint shards of the batch, shared tables, no locks on the
        // value updates (accepted nondeterminism).
        std::atomic<double> shared_loss{0.0};
        std::vector<std::thread> pool;
        const size_t span = end - start;
        const size_t per = (span + config.workers - 1) / config.workers;
        for (uint32_t w = 0; w < config.workers; ++w) {
          const size_t lo = start + w * per;
          const size_t hi = std::min(end, lo + per);
          if (lo >= hi) break;
          pool.emplace_back([&, lo, hi, w] {
            Rng neg_rng(config.seed, 2 + step * 1315423911ull + w);
            SparseGrad g(config.dim);
            double local = 0.0;
            for (size_t i = lo; i < hi; ++i) {
              const Triple& pos = store.triples()[order[i]];
              for (uint32_t k = 0; k < config.negatives_per_edge; ++k) {
                const Triple neg = store.sample_negative(pos, neg_rng);
                local += accumulate_pair_grad(params, pos, neg, config.margin, g);
              }
            }
            opt.step(params, g);
            if (config.normalize_entities)
              renormalize_touched_entities(params, g);
            double expect = shared_loss.load();
            while (!shared_loss.compare_exchange_weak(expect, expect + local)) {
            }
          });
        }
        for (auto& t : pool) t.join();
        step_loss = shared_loss.load();
      }

      if (!std::isfinite(step_loss))
        throw Error("non-finite loss at step " + std::to_string(step) +
                    " (epoch " + std::to_string(epoch) +
                    ", lr=" + std::to_string(config.learning_rate) + ")");

      epoch_loss += step_loss;
      epoch_pairs += (end - start) * config.negatives_per_edge;
    }

    result.epoch_mean_loss.push_back(epoch_loss /
                                     static_cast<double>(epoch_pairs));
  }
  return result;
}

}  // namespace pkgm
