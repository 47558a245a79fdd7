#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "pkgm/service.hpp"
#include "pkgm/trainer.hpp"
#include "pkgm/vecmath.hpp"

using namespace pkgm;

TEST_CASE("serve_triple is the elementwise sum") {
  ModelParams p;
  p.dim = 3;
  p.n_entities = 2;
  p.n_relations = 1;
  p.entity_emb = {1, 2, 3, 0, 0, 0};
  p.relation_emb = {0, 0, 0};
  p.relation_mat = {1, 0, 0, 0, 1, 0, 0, 0, 1};

  // Zero relation embedding returns h itself.
  CHECK(serve_triple(p, 0, 0) == std::vector<double>{1, 2, 3});

  p.relation_emb = {0.5, -1, 2};
  const auto v = serve_triple(p, 0, 0);
  for (uint32_t i = 0; i < 3; ++i)
    CHECK(v[i] == doctest::Approx(p.entity(0)[i] + p.relation(0)[i]));
}

TEST_CASE("service vectors tie exactly to training scores") {
  const ModelParams p = ModelParams::init(12, 5, 16, 321);
  Rng rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const EntityId h = rng.bounded(12), t = rng.bounded(12);
    const RelationId r = rng.bounded(5);

    std::vector<double> st = serve_triple(p, h, r);
    for (uint32_t i = 0; i < p.dim; ++i) st[i] -= p.entity(t)[i];
    CHECK(std::fabs(l1_norm(st) - score_triple(p, h, r, t)) <= 1e-9);

    const std::vector<double> sr = serve_relation(p, h, r);
    CHECK(std::fabs(l1_norm(sr) - score_relation(p, h, r)) <= 1e-9);
  }
}

TEST_CASE("serve_relation is zero when M_r h equals r") {
  ModelParams p;
  p.dim = 2;
  p.n_entities = 1;
  p.n_relations = 1;
  p.entity_emb = {3, -4};
  p.relation_emb = {3, -4};
  p.relation_mat = {1, 0, 0, 1};
  const auto v = serve_relation(p, 0, 0);
  CHECK(v == std::vector<double>{0, 0});
}

namespace {

struct BundleFixture {
  Vocab vocab;
  KeyRelationMap key_map;
  ModelParams params;

  BundleFixture() {
    const CategoryId cat = vocab.add_category("C");
    const CategoryId sparse_cat = vocab.add_category("Sparse");
    vocab.mark_item(vocab.add_entity("item0"), cat);
    vocab.mark_item(vocab.add_entity("item1"), sparse_cat);
    vocab.add_entity("value");
    for (int r = 0; r < 4; ++r) vocab.add_relation("r" + std::to_string(r));

    key_map.k = 10;
    key_map.by_category = {{0, 1, 2}, {3, 1}};
    params = ModelParams::init(3, 4, 6, 5);
  }
};

}  // namespace

TEST_CASE("serve_bundle composes pointwise calls in key-relation order") {
  const BundleFixture fx;
  const ServiceBundle b =
      serve_bundle(fx.params, fx.key_map, fx.vocab, 0);
  REQUIRE(b.k() == 3);
  REQUIRE(b.triple_vectors.size() == 3);
  REQUIRE(b.relation_vectors.size() == 3);
  for (size_t j = 0; j < b.k(); ++j) {
    const RelationId r = b.key_relations[j];
    CHECK(b.triple_vectors[j] == serve_triple(fx.params, 0, r));
    CHECK(b.relation_vectors[j] == serve_relation(fx.params, 0, r));
  }
}

TEST_CASE("serve_bundle truncates to the observed relations") {
  const BundleFixture fx;
  const ServiceBundle b = serve_bundle(fx.params, fx.key_map, fx.vocab, 1);
  CHECK(b.k() == 2);  // category has 2 observed relations under k = 10
  CHECK(b.triple_vectors.size() + b.relation_vectors.size() == 4);
}

TEST_CASE("serve_bundle rejects uncategorized entities") {
  const BundleFixture fx;
  CHECK_THROWS_AS(
      static_cast<void>(serve_bundle(fx.params, fx.key_map, fx.vocab, 2)),
      LookupError);
}

TEST_CASE("complete_tail matches an exhaustive scan oracle") {
  const ModelParams p = ModelParams::init(50, 3, 8, 777);
  Rng rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const EntityId h = rng.bounded(50);
    const RelationId r = rng.bounded(3);

    // Independent oracle: full scan + stable sort on (distance, id).
    const auto target = serve_triple(p, h, r);
    std::vector<std::pair<EntityId, double>> expect;
    for (EntityId e = 0; e < 50; ++e) {
      std::vector<double> diff = target;
      for (uint32_t i = 0; i < p.dim; ++i) diff[i] -= p.entity(e)[i];
      expect.push_back({e, l1_norm(diff)});
    }
    std::sort(expect.begin(), expect.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second < b.second : a.first < b.first;
    });

    const auto full = complete_tail(p, h, r, 50);
    REQUIRE(full.size() == 50);
    CHECK(full == expect);

    // Distances nondecreasing; prefix property.
    for (size_t i = 1; i < full.size(); ++i)
      CHECK(full[i - 1].second <= full[i].second);
    const auto five = complete_tail(p, h, r, 5);
    const auto six = complete_tail(p, h, r, 6);
    CHECK(std::equal(five.begin(), five.end(), six.begin()));
  }
}

TEST_CASE("complete_tail with top_n = |E| permutes all entities") {
  const ModelParams p = ModelParams::init(20, 2, 4, 2);
  const auto all = complete_tail(p, 3, 1, 20);
  std::vector<EntityId> ids;
  for (const auto& [e, _] : all) ids.push_back(e);
  std::sort(ids.begin(), ids.end());
  for (EntityId e = 0; e < 20; ++e) CHECK(ids[e] == e);
}

TEST_CASE("trained model ranks true tails near the top") {
  // 20-triple KG with shared tails per (relation, group).
  std::vector<Triple> triples;
  const uint32_t values = 4;
  for (EntityId i = 0; i < 20; ++i)
    triples.push_back({values + i, i % 2, i % values});
  const TripleStore store = TripleStore::build(std::move(triples), 24, 2);

  TrainConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 150;
  cfg.batch_size = 10;
  cfg.learning_rate = 0.05;
  cfg.seed = 12;
  const TrainResult result = train(store, cfg);

  size_t in_top3 = 0;
  for (const Triple& t : store.triples()) {
    const auto top = complete_tail(result.params, t.head, t.rel, 3);
    for (const auto& [e, _] : top)
      if (e == t.tail) {
        ++in_top3;
        break;
      }
  }
  CHECK(static_cast<double>(in_top3) >=
        0.8 * static_cast<double>(store.size()));
}

TEST_CASE("serving leaves parameters untouched") {
  const BundleFixture fx;
  const uint64_t before = param_hash(fx.params);
  static_cast<void>(serve_triple(fx.params, 0, 0));
  static_cast<void>(serve_relation(fx.params, 0, 1));
  static_cast<void>(serve_bundle(fx.params, fx.key_map, fx.vocab, 0));
  static_cast<void>(complete_tail(fx.params, 0, 0, 3));
  CHECK(param_hash(fx.params) == before);
}
