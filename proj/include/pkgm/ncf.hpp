#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pkgm/interactions.hpp"
#include "pkgm/rng.hpp"
#include "pkgm/service.hpp"

namespace pkgm {

enum class NcfVariant : uint8_t { base = 0, pkgm_t = 1, pkgm_r = 2, pkgm_all = 3 };

const char* variant_name(NcfVariant v);
NcfVariant variant_from_name(const std::string& name);

struct NcfConfig {
  uint32_t gmf_dim = 8;
  uint32_t mlp_dim = 32;
  std::vector<uint32_t> hidden = {32, 16, 8};
  uint32_t feature_dim = 0;  // 0 for base; 2d+1 for pkgm variants
  double learning_rate = 1e-4;
  double l2 = 0.001;
  uint32_t batch_size = 256;
  uint32_t epochs = 30;
  uint32_t negative_ratio = 4;
  uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  NcfVariant variant = NcfVariant::base;

  void validate() const;
  uint64_t hash() const;
  uint32_t mlp_input_dim() const { return 2 * mlp_dim + feature_dim; }
  uint32_t fusion_dim() const { return gmf_dim + hidden.back(); }
};

// GMF and MLP towers plus fusion weights. Layer weights are stored
// in_dim x out_dim row-major, applied as out = W^T z + b.
struct NcfParams {
  uint32_t n_users = 0, n_items = 0;
  uint32_t gmf_dim = 8, mlp_dim = 32, feature_dim = 0;
  std::vector<uint32_t> hidden;
  std::vector<double> gmf_user, gmf_item, mlp_user, mlp_item;
  std::vector<std::vector<double>> weights;  // per layer
  std::vector<std::vector<double>> biases;
  std::vector<double> fusion;

  static NcfParams init(uint32_t n_users, uint32_t n_items,
                        const NcfConfig& cfg);

  std::span<const double> gmf_u(UserId u) const;
  std::span<const double> gmf_i(ItemId i) const;
  std::span<const double> mlp_u(UserId u) const;
  std::span<const double> mlp_i(ItemId i) const;

  bool operator==(const NcfParams&) const = default;
};

// Element-wise product p_u . q_i from the GMF tables.
std::vector<double> gmf_forward(const NcfParams& p, UserId u, ItemId i);

// ReLU MLP over concat(p_u, q_i[, pkgm]); pkgm must be present exactly
// when the params were built with feature_dim > 0.
std::vector<double> mlp_forward(const NcfParams& p, UserId u, ItemId i,
                                std::optional<std::span<const double>> pkgm);

// sigmoid(fusion . [gmf; mlp]) clipped into [1e-12, 1 - 1e-12].
double predict(const NcfParams& p, UserId u, ItemId i,
               std::optional<std::span<const double>> pkgm);

// -sum(y log yhat + (1-y) log(1-yhat)); predictions clipped at 1e-12.
double bce_loss(std::span<const double> predictions,
                std::span<const double> labels);

struct NcfSample {
  UserId user;
  ItemId item;
  double label;
};

// Per positive (u, i): the positive plus `ratio` negatives (u, j) with j
// uniform over items u has not interacted with.
std::vector<NcfSample> sample_ncf_negatives(
    const std::vector<InteractionSet::Row>& positives,
    const std::vector<std::vector<ItemId>>& by_user, uint32_t n_items,
    uint32_t ratio, Rng& rng);

// Dense gradient mirror of NcfParams (PKGM features are frozen inputs
// and have no slot here).
struct NcfGrad {
  std::vector<double> gmf_user, gmf_item, mlp_user, mlp_item;
  std::vector<std::vector<double>> weights, biases;
  std::vector<double> fusion;

  static NcfGrad zeros_like(const NcfParams& p);
  void clear();
};

// Forward + backward for one labeled sample; accumulates into `out` and
// returns the sample's BCE loss.
double ncf_sample_grad(const NcfParams& p, const NcfSample& s,
                       std::optional<std::span<const double>> pkgm,
                       NcfGrad& out);

struct NcfModel {
  NcfParams params;
  NcfConfig cfg;
  std::vector<double> item_features;  // n_items x feature_dim; empty for base

  std::optional<std::span<const double>> features_of(ItemId i) const {
    if (cfg.feature_dim == 0) return std::nullopt;
    return std::span<const double>(
        item_features.data() + static_cast<size_t>(i) * cfg.feature_dim,
        cfg.feature_dim);
  }
};

struct NcfTrainResult {
  NcfModel model;
  std::vector<double> epoch_mean_loss;
};

// Mini-batch Adam over summed BCE with L2 on the four embedding tables.
// Deterministic for a fixed seed. item_features may be empty only for
// the base variant.
NcfTrainResult train_ncf(const LooSplit& split, uint32_t n_users,
                         uint32_t n_items, std::vector<double> item_features,
                         const NcfConfig& cfg);

// Condensed service vectors per item, variant half-zeroing applied, plus
// a trailing missing-item flag (0 mapped / 1 unmapped). feature_dim is
// 2 * kg dim + 1.
struct ItemFeatureBuild {
  std::vector<double> features;
  uint32_t feature_dim = 0;
  size_t missing = 0;
};

ItemFeatureBuild build_item_features(
    const ModelParams& kg_params, const KeyRelationMap& key_map,
    const Vocab& vocab, const std::vector<std::string>& item_names,
    const std::unordered_map<std::string, std::string>* mapping,
    NcfVariant variant);

void save_ncf(const NcfModel& model, const std::filesystem::path& path);
NcfModel load_ncf(const std::filesystem::path& path);

}  // namespace pkgm
