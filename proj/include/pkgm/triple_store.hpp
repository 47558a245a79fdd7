#pragma once

#include <span>
#include <unordered_map>
#include <vector>

#include "pkgm/common.hpp"
#include "pkgm/rng.hpp"

namespace pkgm {

struct Triple {
  EntityId head;
  RelationId rel;
  EntityId tail;

  bool operator==(const Triple&) const = default;
};

// Immutable after construction: deduplicated triple array, per-relation
// frequency counts and a (head, relation) -> sorted tails adjacency index.
// Safe to share across concurrent readers.
class TripleStore {
 public:
  TripleStore() = default;

  // Deduplicates (first occurrence wins) and builds the index.
  static TripleStore build(std::vector<Triple> triples, uint32_t n_entities,
                           uint32_t n_relations);

  const std::vector<Triple>& triples() const { return triples_; }
  size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }

  uint32_t n_entities() const { return n_entities_; }
  uint32_t n_relations() const { return n_relations_; }

  uint64_t relation_count(RelationId r) const;
  const std::vector<uint64_t>& relation_counts() const { return rel_freq_; }

  bool contains(EntityId h, RelationId r, EntityId t) const;
  bool contains(const Triple& t) const { return contains(t.head, t.rel, t.tail); }

  // Sorted known tails for (h, r); empty span if none.
  std::span<const EntityId> tails(EntityId h, RelationId r) const;

  // Corrupt exactly one slot of `triple`, slot chosen uniformly from
  // {head, relation, tail}, replacement uniform over the matching
  // vocabulary. Redraws until the corrupted triple differs from the
  // original and is absent from the store; throws SamplingError once
  // `max_retries` draws are exhausted.
  Triple sample_negative(const Triple& triple, Rng& rng,
                         uint32_t max_retries = 100) const;

  bool operator==(const TripleStore& other) const {
    return triples_ == other.triples_ && n_entities_ == other.n_entities_ &&
           n_relations_ == other.n_relations_;
  }

 private:
  static uint64_t pair_key(EntityId h, RelationId r) {
    return (static_cast<uint64_t>(h) << 32) | r;
  }

  std::vector<Triple> triples_;
  std::vector<uint64_t> rel_freq_;
  std::unordered_map<uint64_t, std::vector<EntityId>> adj_;
  uint32_t n_entities_ = 0;
  uint32_t n_relations_ = 0;
};

// Per-category key relations, each list sorted by descending in-category
// item frequency, ties by ascending relation id, truncated to k.
struct KeyRelationMap {
  uint32_t k = 0;
  std::vector<std::vector<RelationId>> by_category;

  std::span<const RelationId> relations_for(CategoryId c) const {
    if (c >= by_category.size()) return {};
    return by_category[c];
  }

  bool operator==(const KeyRelationMap&) const = default;
};

}  // namespace pkgm
