#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>

#include "pkgm/checkpoint.hpp"
#include "pkgm/grad.hpp"
#include "pkgm/trainer.hpp"
#include "pkgm/vecmath.hpp"

using namespace pkgm;

namespace {

// Hand-set parameters: 2 entities, 1-2 relations, dim 2.
ModelParams tiny_params(uint32_t n_entities, uint32_t n_relations) {
  ModelParams p;
  p.dim = 2;
  p.n_entities = n_entities;
  p.n_relations = n_relations;
  p.entity_emb.assign(static_cast<size_t>(n_entities) * 2, 0.0);
  p.relation_emb.assign(static_cast<size_t>(n_relations) * 2, 0.0);
  p.relation_mat.assign(static_cast<size_t>(n_relations) * 4, 0.0);
  return p;
}

void set_vec(std::span<double> dst, std::initializer_list<double> vals) {
  size_t i = 0;
  for (double v : vals) dst[i++] = v;
}

}  // namespace

TEST_CASE("score_triple matches hand values") {
  ModelParams p = tiny_params(3, 1);
  set_vec(p.entity(0), {1, 0});    // h
  set_vec(p.relation(0), {0, 1});  // r
  set_vec(p.entity(1), {1, 1});    // t = h + r
  CHECK(score_triple(p, 0, 0, 1) == doctest::Approx(0.0));

  set_vec(p.entity(0), {1, 2});
  set_vec(p.relation(0), {3, -1});
  set_vec(p.entity(2), {0, 0});
  CHECK(score_triple(p, 0, 0, 2) == doctest::Approx(5.0));  // |4| + |1|

  CHECK_THROWS_AS(static_cast<void>(score_triple(p, 9, 0, 0)), IndexError);
}

TEST_CASE("score_triple equals the elementwise oracle on random params") {
  const ModelParams p = ModelParams::init(6, 3, 8, 42);
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const EntityId h = rng.bounded(6), t = rng.bounded(6);
    const RelationId r = rng.bounded(3);
    double expect = 0.0;
    for (uint32_t i = 0; i < p.dim; ++i)
      expect += std::fabs(p.entity(h)[i] + p.relation(r)[i] - p.entity(t)[i]);
    CHECK(score_triple(p, h, r, t) == doctest::Approx(expect).epsilon(1e-12));
  }
}

TEST_CASE("score_relation matches hand values") {
  ModelParams p = tiny_params(1, 2);
  // M_0 = identity, h = r -> 0
  set_vec(p.matrix(0), {1, 0, 0, 1});
  set_vec(p.entity(0), {0.5, -2});
  set_vec(p.relation(0), {0.5, -2});
  CHECK(score_relation(p, 0, 0) == doctest::Approx(0.0));

  // M_1 = 0, r = (1, -1) -> ||-r||_1 = 2
  set_vec(p.relation(1), {1, -1});
  CHECK(score_relation(p, 0, 1) == doctest::Approx(2.0));
}

TEST_CASE("score_relation equals a naive mat-vec + L1 oracle") {
  const ModelParams p = ModelParams::init(5, 4, 6, 3);
  Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const EntityId h = rng.bounded(5);
    const RelationId r = rng.bounded(4);
    std::vector<double> mh(p.dim, 0.0);
    for (uint32_t i = 0; i < p.dim; ++i)
      for (uint32_t j = 0; j < p.dim; ++j)
        mh[i] += p.matrix(r)[static_cast<size_t>(i) * p.dim + j] * p.entity(h)[j];
    double expect = 0.0;
    for (uint32_t i = 0; i < p.dim; ++i)
      expect += std::fabs(mh[i] - p.relation(r)[i]);
    CHECK(score_relation(p, h, r) == doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("score_total is the sum of both modules") {
  const ModelParams p = ModelParams::init(4, 2, 5, 9);
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const EntityId h = rng.bounded(4), t = rng.bounded(4);
    const RelationId r = rng.bounded(2);
    CHECK(score_total(p, h, r, t) ==
          doctest::Approx(score_triple(p, h, r, t) + score_relation(p, h, r)));
  }
}

TEST_CASE("hinge behaves at and around the margin") {
  CHECK(hinge(1, 5, 1) == 0.0);
  CHECK(hinge(3, 2, 1) == doctest::Approx(2.0));
  CHECK(hinge(4, 4, 0) == 0.0);  // boundary

  // Monotonicity probes.
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double pos = rng.uniform(0, 10), neg = rng.uniform(0, 10);
    const double gamma = rng.uniform(0, 3), eps = rng.uniform(0, 1);
    CHECK(hinge(pos + eps, neg, gamma) >= hinge(pos, neg, gamma));
    CHECK(hinge(pos, neg + eps, gamma) <= hinge(pos, neg, gamma));
    CHECK(hinge(pos, neg, gamma + eps) >= hinge(pos, neg, gamma));
    CHECK(hinge(pos, neg, gamma) >= 0.0);
  }
}

TEST_CASE("batch_loss sums per-pair hinges") {
  const ModelParams p = ModelParams::init(6, 3, 4, 21);
  Rng rng(13);
  std::vector<std::pair<Triple, Triple>> batch;
  for (int i = 0; i < 8; ++i)
    batch.push_back({{rng.bounded(6), rng.bounded(3), rng.bounded(6)},
                     {rng.bounded(6), rng.bounded(3), rng.bounded(6)}});

  double expect = 0.0;
  for (const auto& [pos, neg] : batch)
    expect += hinge(score_total(p, pos.head, pos.rel, pos.tail),
                    score_total(p, neg.head, neg.rel, neg.tail), 1.0);
  CHECK(batch_loss(p, batch, 1.0) == doctest::Approx(expect).epsilon(1e-12));

  // Two identical pairs double a single-pair loss.
  std::vector<std::pair<Triple, Triple>> twice = {batch[0], batch[0]};
  std::vector<std::pair<Triple, Triple>> once = {batch[0]};
  CHECK(batch_loss(p, twice, 1.0) ==
        doctest::Approx(2.0 * batch_loss(p, once, 1.0)));

  CHECK_THROWS_AS(static_cast<void>(batch_loss(p, {}, 1.0)), ConfigError);
}

TEST_CASE("grad is empty when the margin is satisfied") {
  ModelParams p = tiny_params(3, 1);
  set_vec(p.entity(0), {1, 0});
  set_vec(p.relation(0), {0, 1});
  set_vec(p.entity(1), {1, 1});   // pos scores 0 (+ relation part 1? no: M=0)
  set_vec(p.entity(2), {50, 50});  // negative scores far away
  const SparseGrad g = grad(p, {0, 0, 1}, {0, 0, 2}, 1.0);
  CHECK(g.empty());
}

TEST_CASE("grad touches only the ids in the pair") {
  const ModelParams p = ModelParams::init(10, 5, 4, 77);
  const Triple pos{1, 2, 3}, neg{1, 2, 7};
  const SparseGrad g = grad(p, pos, neg, 5.0);
  for (const auto& [e, _] : g.entity) CHECK((e == 1 || e == 3 || e == 7));
  for (const auto& [r, _] : g.relation) CHECK(r == 2);
  for (const auto& [r, _] : g.matrix) CHECK(r == 2);
}

namespace {

// Central finite differences against every touched coordinate.
// Returns the number of coordinates checked (kink points skipped).
int check_grad_fd(ModelParams& p, const Triple& pos, const Triple& neg,
                  double margin) {
  const double eps = 1e-4, tol = 1e-3;
  const SparseGrad g = grad(p, pos, neg, margin);

  auto pair_loss = [&]() {
    return hinge(score_total(p, pos.head, pos.rel, pos.tail),
                 score_total(p, neg.head, neg.rel, neg.tail), margin);
  };

  // Kink guard: any |.| argument near zero, or the hinge near its corner.
  auto near_kink = [&]() {
    const double z = score_total(p, pos.head, pos.rel, pos.tail) + margin -
                     score_total(p, neg.head, neg.rel, neg.tail);
    if (std::fabs(z) < 1e-6) return true;
    for (const Triple& tr : {pos, neg}) {
      for (uint32_t i = 0; i < p.dim; ++i) {
        if (std::fabs(p.entity(tr.head)[i] + p.relation(tr.rel)[i] -
                      p.entity(tr.tail)[i]) < 1e-6)
          return true;
        double acc = 0.0;
        for (uint32_t j = 0; j < p.dim; ++j)
          acc += p.matrix(tr.rel)[static_cast<size_t>(i) * p.dim + j] *
                 p.entity(tr.head)[j];
        if (std::fabs(acc - p.relation(tr.rel)[i]) < 1e-6) return true;
      }
    }
    return false;
  };
  if (near_kink()) return 0;

  int checked = 0;
  auto check_coord = [&](double* coord, double analytic) {
    const double saved = *coord;
    *coord = saved + eps;
    const double up = pair_loss();
    *coord = saved - eps;
    const double down = pair_loss();
    *coord = saved;
    const double fd = (up - down) / (2 * eps);
    CHECK(std::fabs(fd - analytic) <= 1e-3);
    ++checked;
  };
  (void)tol;

  for (const auto& [e, row] : g.entity)
    for (uint32_t i = 0; i < p.dim; ++i)
      check_coord(&p.entity_emb[static_cast<size_t>(e) * p.dim + i], row[i]);
  for (const auto& [r, row] : g.relation)
    for (uint32_t i = 0; i < p.dim; ++i)
      check_coord(&p.relation_emb[static_cast<size_t>(r) * p.dim + i], row[i]);
  for (const auto& [r, block] : g.matrix)
    for (uint32_t i = 0; i < p.dim * p.dim; ++i)
      check_coord(
          &p.relation_mat[static_cast<size_t>(r) * p.dim * p.dim + i],
          block[i]);
  return checked;
}

}  // namespace

TEST_CASE("grad matches central finite differences at non-kink points") {
  Rng rng(31337);
  int total_checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    ModelParams p = ModelParams::init(6, 3, 4, 1000 + trial);
    const Triple pos{rng.bounded(6), rng.bounded(3), rng.bounded(6)};
    const Triple neg{rng.bounded(6), rng.bounded(3), rng.bounded(6)};
    total_checked += check_grad_fd(p, pos, neg, 1.0);
  }
  CHECK(total_checked > 200);
}

namespace {

// 20-triple chain KG: entity i connects to i+1 under relation (i % 2).
TripleStore chain_store(uint32_t n_entities) {
  std::vector<Triple> triples;
  for (EntityId i = 0; i + 1 < n_entities; ++i)
    triples.push_back({i, i % 2, i + 1});
  return TripleStore::build(std::move(triples), n_entities, 2);
}

}  // namespace

TEST_CASE("training reduces the mean loss on a small KG") {
  const TripleStore store = chain_store(21);  // 20 triples
  TrainConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 50;
  cfg.batch_size = 8;
  cfg.learning_rate = 0.05;
  cfg.seed = 4;
  const TrainResult result = train(store, cfg);
  REQUIRE(result.epoch_mean_loss.size() == 50);

  // Smoothed trend: mean of the last 5 epochs well under the first 5.
  auto mean_of = [&](size_t from, size_t to) {
    double s = 0.0;
    for (size_t i = from; i < to; ++i) s += result.epoch_mean_loss[i];
    return s / static_cast<double>(to - from);
  };
  CHECK(mean_of(45, 50) < mean_of(0, 5));
}

TEST_CASE("zero learning rate leaves parameters at initialization") {
  const TripleStore store = chain_store(10);
  TrainConfig cfg;
  cfg.dim = 4;
  cfg.epochs = 3;
  cfg.learning_rate = 0.0;
  cfg.margin = 0.0;
  cfg.seed = 8;
  const TrainResult result = train(store, cfg);
  const ModelParams fresh =
      ModelParams::init(store.n_entities(), store.n_relations(), 4, 8);
  CHECK(result.params == fresh);
}

TEST_CASE("fixed seeds reproduce training bitwise") {
  const TripleStore store = chain_store(15);
  TrainConfig cfg;
  cfg.dim = 6;
  cfg.epochs = 10;
  cfg.batch_size = 4;
  cfg.learning_rate = 0.01;
  cfg.seed = 99;
  const TrainResult a = train(store, cfg);
  const TrainResult b = train(store, cfg);
  CHECK(a.params == b.params);
  CHECK(a.epoch_mean_loss == b.epoch_mean_loss);
}

TEST_CASE("positives score below corrupted triples after training") {
  // One relation is a perfect translation pattern: groups of entities
  // share tails per relation.
  std::vector<Triple> triples;
  const uint32_t items = 24, values = 4;
  for (EntityId i = 0; i < items; ++i)
    triples.push_back({values + i, 0, i % values});
  for (EntityId i = 0; i < items; ++i)
    triples.push_back({values + i, 1, (i % values + 1) % values});
  const TripleStore store =
      TripleStore::build(std::move(triples), items + values, 2);

  TrainConfig cfg;
  cfg.dim = 8;
  cfg.epochs = 120;
  cfg.batch_size = 16;
  cfg.learning_rate = 0.05;
  cfg.seed = 17;
  const TrainResult result = train(store, cfg);

  Rng rng(55);
  double pos_mean = 0.0, neg_mean = 0.0;
  for (const Triple& t : store.triples()) {
    pos_mean += score_total(result.params, t.head, t.rel, t.tail);
    const Triple neg = store.sample_negative(t, rng);
    neg_mean += score_total(result.params, neg.head, neg.rel, neg.tail);
  }
  CHECK(pos_mean < neg_mean);
}

TEST_CASE("checkpoints round-trip bitwise and validate shapes") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pkgm_ckpt_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  const ModelParams p = ModelParams::init(7, 3, 16, 123);
  const fs::path path = dir / "model.ckpt";
  save_checkpoint(p, 0xABCDEF, path);

  const Checkpoint loaded = load_checkpoint(path);
  CHECK(loaded.params == p);
  CHECK(loaded.config_hash == 0xABCDEF);

  SUBCASE("truncated file is rejected") {
    const auto full = fs::file_size(path);
    fs::resize_file(path, full - 16);
    CHECK_THROWS_AS(static_cast<void>(load_checkpoint(path)), CheckpointError);
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(require_shape(loaded.params, 64, 7, 3), CheckpointError);
    CHECK_NOTHROW(require_shape(loaded.params, 16, 7, 3));
  }
  SUBCASE("garbage magic is rejected") {
    std::ofstream(path, std::ios::binary) << "not a checkpoint at all";
    CHECK_THROWS_AS(static_cast<void>(load_checkpoint(path)), CheckpointError);
  }
}
