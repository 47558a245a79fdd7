#pragma once

#include <utility>
#include <vector>

#include "pkgm/model.hpp"
#include "pkgm/triple_store.hpp"
#include "pkgm/vocab.hpp"

namespace pkgm {

// The 2k knowledge vectors for one entity over its key relations:
// triple vectors h + r_j first, then relation vectors M_{r_j} h - r_j.
// k may be shorter than the requested bundle width when the entity's
// category has fewer observed relations; consumers read k from here.
struct ServiceBundle {
  EntityId entity = kInvalidId;
  std::vector<RelationId> key_relations;
  std::vector<std::vector<double>> triple_vectors;
  std::vector<std::vector<double>> relation_vectors;

  size_t k() const { return key_relations.size(); }
  uint32_t dim() const {
    return triple_vectors.empty()
               ? 0
               : static_cast<uint32_t>(triple_vectors.front().size());
  }
};

// h + r; the candidate-tail representation.
std::vector<double> serve_triple(const ModelParams& p, EntityId h,
                                 RelationId r);

// M_r h - r; near zero when h has (or should have) relation r.
std::vector<double> serve_relation(const ModelParams& p, EntityId h,
                                   RelationId r);

// Assembles the 2k vectors over the key relations of h's category.
// Throws ConfigError if h has no category.
ServiceBundle serve_bundle(const ModelParams& p, const KeyRelationMap& key_map,
                           const Vocab& vocab, EntityId h);

// Entities ranked by ascending ||(h + r) - e||_1, ties by ascending id;
// returns min(top_n, |E|) results.
std::vector<std::pair<EntityId, double>> complete_tail(const ModelParams& p,
                                                       EntityId h, RelationId r,
                                                       uint32_t top_n);

// FNV over all parameter bytes; serving must leave it unchanged.
uint64_t param_hash(const ModelParams& p);

}  // namespace pkgm
