#include "pkgm/triple_store.hpp"

#include <algorithm>
#include <unordered_set>

namespace pkgm {

namespace {

struct TripleHash {
  size_t operator()(const Triple& t) const {
    uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](uint32_t v) {
      h ^= v;
      h *= 0x100000001b3ull;
    };
    mix(t.head);
    mix(t.rel);
    mix(t.tail);
    return static_cast<size_t>(h);
  }
};

}  // namespace

TripleStore TripleStore::build(std::vector<Triple> triples, uint32_t n_entities,
                               uint32_t n_relations) {
  TripleStore s;
  s.n_entities_ = n_entities;
  s.n_relations_ = n_relations;
  s.rel_freq_.assign(n_relations, 0);

  std::unordered_set<Triple, TripleHash> seen;
  seen.reserve(triples.size());
  s.triples_.reserve(triples.size());
  for (const Triple& t : triples) {
    if (t.head >= n_entities || t.tail >= n_entities)
      throw IndexError("triple entity id out of range");
    if (t.rel >= n_relations)
      throw IndexError("triple relation id out of range");
    if (!seen.insert(t).second) continue;
    s.triples_.push_back(t);
    s.rel_freq_[t.rel] += 1;
    s.adj_[pair_key(t.head, t.rel)].push_back(t.tail);
  }
  for (auto& [key, tails] : s.adj_) std::sort(tails.begin(), tails.end());
  return s;
}

uint64_t TripleStore::relation_count(RelationId r) const {
  if (r >= rel_freq_.size())
    throw IndexError("relation id out of range: " + std::to_string(r));
  return rel_freq_[r];
}

bool TripleStore::contains(EntityId h, RelationId r, EntityId t) const {
  auto it = adj_.find(pair_key(h, r));
  if (it == adj_.end()) return false;
  return std::binary_search(it->second.begin(), it->second.end(), t);
}

std::span<const EntityId> TripleStore::tails(EntityId h, RelationId r) const {
  auto it = adj_.find(pair_key(h, r));
  if (it == adj_.end()) return {};
  return it->second;
}

Triple TripleStore::sample_negative(const Triple& triple, Rng& rng,
                                    uint32_t max_retries) const {
  if (n_entities_ < 2 || n_relations_ < 2)
    throw SamplingError(
        "negative sampling needs at least 2 entities and 2 relations");

  // Slot drawn once so accepted corruptions stay uniform over slots;
  // only the replacement is resampled.
  const uint32_t slot = rng.bounded(3);
  for (uint32_t attempt = 0; attempt < max_retries; ++attempt) {
    Triple c = triple;
    switch (slot) {
      case 0:
        c.head = rng.bounded(n_entities_);
        if (c.head == triple.head) continue;
        break;
      case 1:
        c.rel = rng.bounded(n_relations_);
        if (c.rel == triple.rel) continue;
        break;
      default:
        c.tail = rng.bounded(n_entities_);
        if (c.tail == triple.tail) continue;
        break;
    }
    if (!contains(c)) return c;
  }
  throw SamplingError("negative sampling retry bound exhausted (" +
                      std::to_string(max_retries) + " draws); graph too dense");
}

}  // namespace pkgm
