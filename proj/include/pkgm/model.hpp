#pragma once

#include <span>
#include <utility>
#include <vector>

#include "pkgm/common.hpp"
#include "pkgm/triple_store.hpp"

namespace pkgm {

// Entity embeddings (|E| x d), relation embeddings (|R| x d) and one
// d x d transfer matrix per relation, all row-major doubles.
struct ModelParams {
  uint32_t dim = 0;
  uint32_t n_entities = 0;
  uint32_t n_relations = 0;
  std::vector<double> entity_emb;
  std::vector<double> relation_emb;
  std::vector<double> relation_mat;

  std::span<double> entity(EntityId e);
  std::span<const double> entity(EntityId e) const;
  std::span<double> relation(RelationId r);
  std::span<const double> relation(RelationId r) const;
  std::span<double> matrix(RelationId r);
  std::span<const double> matrix(RelationId r) const;

  // Embeddings uniform in (-6/sqrt(d), 6/sqrt(d)); transfer matrices
  // identity plus N(0, 0.01) noise so the relation score starts near
  // ||h - r||_1.
  static ModelParams init(uint32_t n_entities, uint32_t n_relations,
                          uint32_t dim, uint64_t seed);

  bool operator==(const ModelParams&) const = default;
};

struct TrainConfig {
  uint32_t dim = 64;
  double margin = 1.0;
  double learning_rate = 1e-4;
  uint32_t batch_size = 128;
  uint32_t epochs = 50;
  uint32_t negatives_per_edge = 1;
  uint64_t seed = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  bool normalize_entities = false;
  uint32_t workers = 1;  // >1 opts into nondeterministic updates

  void validate() const;
  uint64_t hash() const;
};

// ||h + r - t||_1
double score_triple(const ModelParams& p, EntityId h, RelationId r, EntityId t);

// ||M_r h - r||_1
double score_relation(const ModelParams& p, EntityId h, RelationId r);

// score_triple + score_relation
double score_total(const ModelParams& p, EntityId h, RelationId r, EntityId t);

// max(positive + margin - negative, 0)
double hinge(double positive_score, double negative_score, double margin);

// Sum of per-pair hinge losses over (positive, negative) pairs.
double batch_loss(const ModelParams& p,
                  std::span<const std::pair<Triple, Triple>> batch,
                  double margin);

}  // namespace pkgm
