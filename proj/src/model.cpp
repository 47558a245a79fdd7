#include "pkgm/model.hpp"

#include <cmath>
#include <cstring>
#include <sstream>

#include "pkgm/rng.hpp"
#include "pkgm/vecmath.hpp"

namespace pkgm {

namespace {

void check_id(uint32_t id, uint32_t limit, const char* what) {
  if (id >= limit)
    throw IndexError(std::string(what) + " id out of range: " +
                     std::to_string(id) + " >= " + std::to_string(limit));
}

}  // namespace

std::span<double> ModelParams::entity(EntityId e) {
  check_id(e, n_entities, "entity");
  return {entity_emb.data() + static_cast<size_t>(e) * dim, dim};
}

std::span<const double> ModelParams::entity(EntityId e) const {
  check_id(e, n_entities, "entity");
  return {entity_emb.data() + static_cast<size_t>(e) * dim, dim};
}

std::span<double> ModelParams::relation(RelationId r) {
  check_id(r, n_relations, "relation");
  return {relation_emb.data() + static_cast<size_t>(r) * dim, dim};
}

std::span<const double> ModelParams::relation(RelationId r) const {
  check_id(r, n_relations, "relation");
  return {relation_emb.data() + static_cast<size_t>(r) * dim, dim};
}

std::span<double> ModelParams::matrix(RelationId r) {
  check_id(r, n_relations, "relation");
  return {relation_mat.data() + static_cast<size_t>(r) * dim * dim,
          static_cast<size_t>(dim) * dim};
}

std::span<const double> ModelParams::matrix(RelationId r) const {
  check_id(r, n_relations, "relation");
  return {relation_mat.data() + static_cast<size_t>(r) * dim * dim,
          static_cast<size_t>(dim) * dim};
}

ModelParams ModelParams::init(uint32_t n_entities, uint32_t n_relations,
                              uint32_t dim, uint64_t seed) {
  if (dim < 1) throw ConfigError("embedding dim must be >= 1");
  ModelParams p;
  p.dim = dim;
  p.n_entities = n_entities;
  p.n_relations = n_relations;
  p.entity_emb.resize(static_cast<size_t>(n_entities) * dim);
  p.relation_emb.resize(static_cast<size_t>(n_relations) * dim);
  p.relation_mat.resize(static_cast<size_t>(n_relations) * dim * dim);

  Rng rng(seed, /*stream=*/0xC0FFEE);
  const double bound = 6.0 / std::sqrt(static_cast<double>(dim));
  for (auto& x : p.entity_emb) x = rng.uniform(-bound, bound);
  for (auto& x : p.relation_emb) x = rng.uniform(-bound, bound);
  for (uint32_t r = 0; r < n_relations; ++r) {
    auto m = p.matrix(r);
    for (uint32_t i = 0; i < dim; ++i)
      for (uint32_t j = 0; j < dim; ++j)
        m[static_cast<size_t>(i) * dim + j] =
            (i == j ? 1.0 : 0.0) + 0.01 * rng.gaussian();
  }
  return p;
}

void TrainConfig::validate() const {
  if (dim < 1) throw ConfigError("dim must be >= 1");
  if (margin < 0.0) throw ConfigError("margin must be >= 0");
  if (learning_rate < 0.0) throw ConfigError("learning rate must be >= 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
  if (epochs < 1) throw ConfigError("epochs must be >= 1");
  if (negatives_per_edge < 1) throw ConfigError("negatives must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) ||
      !(adam_beta2 >= 0.0 && adam_beta2 < 1.0) || adam_eps <= 0.0)
    throw ConfigError("bad Adam parameters");
}

uint64_t TrainConfig::hash() const {
  std::ostringstream os;
  os << "dim=" << dim << ";margin=" << margin << ";lr=" << learning_rate
     << ";batch=" << batch_size << ";epochs=" << epochs
     << ";neg=" << negatives_per_edge << ";seed=" << seed
     << ";b1=" << adam_beta1 << ";b2=" << adam_beta2 << ";eps=" << adam_eps
     << ";norm=" << normalize_entities << ";workers=" << workers;
  return fnv1a(os.str());
}

double score_triple(const ModelParams& p, EntityId h, RelationId r,
                    EntityId t) {
  const auto hv = p.entity(h), rv = p.relation(r), tv = p.entity(t);
  double s = 0.0;
  for (uint32_t i = 0; i < p.dim; ++i) s += std::fabs(hv[i] + rv[i] - tv[i]);
  return s;
}

double score_relation(const ModelParams& p, EntityId h, RelationId r) {
  const auto hv = p.entity(h), rv = p.relation(r), m = p.matrix(r);
  double s = 0.0;
  for (uint32_t i = 0; i < p.dim; ++i) {
    double acc = 0.0;
    const double* row = m.data() + static_cast<size_t>(i) * p.dim;
    for (uint32_t j = 0; j < p.dim; ++j) acc += row[j] * hv[j];
    s += std::fabs(acc - rv[i]);
  }
  return s;
}

double score_total(const ModelParams& p, EntityId h, RelationId r,
                   EntityId t) {
  return score_triple(p, h, r, t) + score_relation(p, h, r);
}

double hinge(double positive_score, double negative_score, double margin) {
  const double z = positive_score + margin - negative_score;
  return z > 0.0 ? z : 0.0;
}

double batch_loss(const ModelParams& p,
                  std::span<const std::pair<Triple, Triple>> batch,
                  double margin) {
  if (batch.empty()) throw ConfigError("batch must be nonempty");
  double total = 0.0;
  for (const auto& [pos, neg] : batch) {
    const double sp = score_total(p, pos.head, pos.rel, pos.tail);
    const double sn = score_total(p, neg.head, neg.rel, neg.tail);
    total += hinge(sp, sn, margin);
  }
  return total;
}

}  // namespace pkgm
