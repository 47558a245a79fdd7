#pragma once

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pkgm/model.hpp"
#include "pkgm/ncf.hpp"
#include "pkgm/triple_store.hpp"

namespace pkgm {

struct EvalReport {
  std::map<std::string, double> metrics;
  uint64_t config_hash = 0;
  uint64_t seed = 0;
  std::string dataset_fingerprint;
  double wall_time_s = 0.0;

  std::string to_json() const;
  static EvalReport from_json_text(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static EvalReport load(const std::filesystem::path& path);
};

// Filtered ranking: for each test (h, r, t), rank t among all entities
// by ascending ||h + r - e||_1 after removing other known-true tails.
// Ties are pessimistic (equal-distance entities rank ahead of t).
// Emits hit@k per k plus mean_rank. Test triples must not appear in the
// filter store unless allow_train_overlap.
EvalReport eval_link_prediction(const ModelParams& params,
                                std::span<const Triple> tests,
                                const TripleStore& filter,
                                std::span<const uint32_t> ks,
                                bool allow_train_overlap = false,
                                uint32_t threads = 1);

// Scores pairs by -||M_r h - r||_1 (higher = more plausibly existent);
// reports auc, mean norms per set and their gap.
EvalReport eval_relation_existence(
    const ModelParams& params,
    std::span<const std::pair<EntityId, RelationId>> positives,
    std::span<const std::pair<EntityId, RelationId>> negatives);

struct RecEvalConfig {
  uint32_t n_negatives = 100;
  std::vector<uint32_t> ks = {1, 3, 5, 10, 30};
  uint64_t seed = 0;
  uint32_t threads = 1;
};

// Leave-one-out: rank each user's held-out item against n_negatives
// sampled items the user never interacted with; hr@k and ndcg@k
// averaged over evaluated users, skipped users counted.
EvalReport eval_recommendation(const NcfModel& model,
                               const InteractionSet& data,
                               const LooSplit& split,
                               const RecEvalConfig& cfg);

// Rank-based AUC (Mann-Whitney, ties get half credit).
double auc_from_scores(std::span<const double> positives,
                       std::span<const double> negatives);

// Aligned metric table with deltas against the first report. All
// reports must carry identical metric keys.
std::string compare_runs_text(const std::vector<EvalReport>& reports,
                              const std::vector<std::string>& names);
std::string compare_runs_tsv(const std::vector<EvalReport>& reports,
                             const std::vector<std::string>& names);

}  // namespace pkgm
