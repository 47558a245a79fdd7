#include "pkgm/service.hpp"

#include <algorithm>
#include <cmath>

#include "pkgm/vecmath.hpp"

namespace pkgm {

std::vector<double> serve_triple(const ModelParams& p, EntityId h,
                                 RelationId r) {
  const auto hv = p.entity(h), rv = p.relation(r);
  std::vector<double> out(p.dim);
  for (uint32_t i = 0; i < p.dim; ++i) out[i] = hv[i] + rv[i];
  return out;
}

std::vector<double> serve_relation(const ModelParams& p, EntityId h,
                                   RelationId r) {
  const auto hv = p.entity(h), rv = p.relation(r), m = p.matrix(r);
  std::vector<double> out(p.dim);
  matvec(m, hv, out);
  for (uint32_t i = 0; i < p.dim; ++i) out[i] -= rv[i];
  return out;
}

ServiceBundle serve_bundle(const ModelParams& p, const KeyRelationMap& key_map,
                           const Vocab& vocab, EntityId h) {
  const auto cat = vocab.category_of(h);
  if (!cat)
    throw LookupError("entity has no category: " + vocab.entity_name(h));

  ServiceBundle b;
  b.entity = h;
  const auto rels = key_map.relations_for(*cat);
  b.key_relations.assign(rels.begin(), rels.end());
  b.triple_vectors.reserve(b.key_relations.size());
  b.relation_vectors.reserve(b.key_relations.size());
  for (RelationId r : b.key_relations) {
    b.triple_vectors.push_back(serve_triple(p, h, r));
    b.relation_vectors.push_back(serve_relation(p, h, r));
  }
  return b;
}

std::vector<std::pair<EntityId, double>> complete_tail(const ModelParams& p,
                                                       EntityId h, RelationId r,
                                                       uint32_t top_n) {
  const std::vector<double> target = serve_triple(p, h, r);
  std::vector<std::pair<EntityId, double>> ranked(p.n_entities);
  for (EntityId e = 0; e < p.n_entities; ++e) {
    const auto ev = p.entity(e);
    double d = 0.0;
    for (uint32_t i = 0; i < p.dim; ++i) d += std::fabs(target[i] - ev[i]);
    ranked[e] = {e, d};
  }
  const size_t keep = std::min<size_t>(top_n, ranked.size());
  auto better = [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  };
  std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end(),
                    better);
  ranked.resize(keep);
  return ranked;
}

uint64_t param_hash(const ModelParams& p) {
  uint64_t h = fnv1a(&p.dim, sizeof(p.dim));
  h = fnv1a(p.entity_emb.data(), p.entity_emb.size() * sizeof(double), h);
  h = fnv1a(p.relation_emb.data(), p.relation_emb.size() * sizeof(double), h);
  h = fnv1a(p.relation_mat.data(), p.relation_mat.size() * sizeof(double), h);
  return h;
}

}  // namespace pkgm
