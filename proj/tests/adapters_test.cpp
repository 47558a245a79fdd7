#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "pkgm/adapters.hpp"
#include "pkgm/rng.hpp"

using namespace pkgm;

namespace {

ServiceBundle random_bundle(uint32_t k, uint32_t dim, uint64_t seed) {
  Rng rng(seed);
  ServiceBundle b;
  b.entity = 0;
  for (uint32_t j = 0; j < k; ++j) {
    b.key_relations.push_back(j);
    std::vector<double> t(dim), r(dim);
    for (auto& x : t) x = rng.uniform(-2, 2);
    for (auto& x : r) x = rng.uniform(-2, 2);
    b.triple_vectors.push_back(std::move(t));
    b.relation_vectors.push_back(std::move(r));
  }
  return b;
}

SequenceInput random_sequence(uint32_t n, uint32_t dim, uint64_t seed) {
  Rng rng(seed);
  SequenceInput s;
  for (uint32_t i = 0; i < n; ++i) {
    std::vector<double> v(dim);
    for (auto& x : v) x = rng.uniform(-1, 1);
    s.embeddings.push_back(std::move(v));
  }
  return s;
}

}  // namespace

TEST_CASE("append_sequence keeps order: originals, triple, relation") {
  const SequenceInput input = random_sequence(3, 4, 1);
  const ServiceBundle bundle = random_bundle(2, 4, 2);
  const SequenceInput out = append_sequence(input, bundle);

  REQUIRE(out.embeddings.size() == 7);  // N + 2k
  for (size_t i = 0; i < 3; ++i) CHECK(out.embeddings[i] == input.embeddings[i]);
  CHECK(out.embeddings[3] == bundle.triple_vectors[0]);
  CHECK(out.embeddings[4] == bundle.triple_vectors[1]);
  CHECK(out.embeddings[5] == bundle.relation_vectors[0]);
  CHECK(out.embeddings[6] == bundle.relation_vectors[1]);
}

TEST_CASE("append_sequence with an empty bundle is the identity") {
  const SequenceInput input = random_sequence(4, 6, 3);
  const ServiceBundle empty = random_bundle(0, 6, 4);
  const SequenceInput out = append_sequence(input, empty);
  CHECK(out.embeddings == input.embeddings);
}

TEST_CASE("append_sequence rejects dimension mismatches without projection") {
  const SequenceInput input = random_sequence(2, 8, 5);
  const ServiceBundle bundle = random_bundle(1, 4, 6);
  CHECK_THROWS_AS(static_cast<void>(append_sequence(input, bundle)),
                  AdapterError);
}

TEST_CASE("append_sequence bridges dimensions through a projection") {
  const SequenceInput input = random_sequence(2, 8, 7);
  const ServiceBundle bundle = random_bundle(2, 4, 8);

  LinearProjection proj;
  proj.out_dim = 8;
  proj.in_dim = 4;
  proj.weights.assign(32, 0.0);
  for (int i = 0; i < 4; ++i) proj.weights[i * 4 + i] = 2.0;  // top block 2*I

  const SequenceInput out = append_sequence(input, bundle, &proj);
  REQUIRE(out.embeddings.size() == 6);
  for (int i = 0; i < 4; ++i)
    CHECK(out.embeddings[2][i] ==
          doctest::Approx(2.0 * bundle.triple_vectors[0][i]));
  for (int i = 4; i < 8; ++i) CHECK(out.embeddings[2][i] == 0.0);

  LinearProjection bad = proj;
  bad.in_dim = 5;
  CHECK_THROWS_AS(static_cast<void>(append_sequence(input, bundle, &bad)),
                  AdapterError);
}

TEST_CASE("condense with k = 1 is plain concatenation") {
  const ServiceBundle b = random_bundle(1, 5, 9);
  const std::vector<double> out = condense(b);
  REQUIRE(out.size() == 10);
  for (int i = 0; i < 5; ++i) {
    CHECK(out[i] == doctest::Approx(b.triple_vectors[0][i]));
    CHECK(out[5 + i] == doctest::Approx(b.relation_vectors[0][i]));
  }
}

TEST_CASE("condense of identical pairs ignores k") {
  ServiceBundle b = random_bundle(1, 3, 10);
  const auto t0 = b.triple_vectors[0];
  const auto r0 = b.relation_vectors[0];
  for (int j = 0; j < 4; ++j) {
    b.key_relations.push_back(j + 1);
    b.triple_vectors.push_back(t0);
    b.relation_vectors.push_back(r0);
  }
  const auto out = condense(b);
  for (int i = 0; i < 3; ++i) {
    CHECK(out[i] == doctest::Approx(t0[i]));
    CHECK(out[3 + i] == doctest::Approx(r0[i]));
  }
}

TEST_CASE("condense matches the scripted mean oracle") {
  const ServiceBundle b = random_bundle(6, 4, 11);
  const auto out = condense(b);
  for (uint32_t i = 0; i < 4; ++i) {
    double sum_t = 0.0, sum_r = 0.0;
    for (size_t j = 0; j < 6; ++j) {
      sum_t += b.triple_vectors[j][i];
      sum_r += b.relation_vectors[j][i];
    }
    CHECK(std::fabs(out[i] - sum_t / 6.0) <= 1e-9);
    CHECK(std::fabs(out[4 + i] - sum_r / 6.0) <= 1e-9);
  }
}

TEST_CASE("condense rejects empty bundles") {
  const ServiceBundle empty = random_bundle(0, 4, 12);
  CHECK_THROWS_AS(static_cast<void>(condense(empty)), AdapterError);
}

TEST_CASE("condense is equivariant under consistent pair permutation") {
  ServiceBundle b = random_bundle(5, 4, 13);
  ServiceBundle permuted = b;
  const std::vector<size_t> perm = {3, 0, 4, 1, 2};
  for (size_t j = 0; j < perm.size(); ++j) {
    permuted.key_relations[j] = b.key_relations[perm[j]];
    permuted.triple_vectors[j] = b.triple_vectors[perm[j]];
    permuted.relation_vectors[j] = b.relation_vectors[perm[j]];
  }
  const auto a = condense(b);
  const auto c = condense(permuted);
  for (size_t i = 0; i < a.size(); ++i)
    CHECK(a[i] == doctest::Approx(c[i]).epsilon(1e-12));
}

TEST_CASE("concat_single concatenates entity first") {
  std::vector<double> entity(32, 1.5);
  std::vector<double> condensed(128, -0.25);
  const auto out = concat_single(entity, condensed);
  REQUIRE(out.size() == 160);
  for (int i = 0; i < 32; ++i) CHECK(out[i] == 1.5);
  for (int i = 32; i < 160; ++i) CHECK(out[i] == -0.25);

  // Slicing recovers both parts.
  CHECK(std::vector<double>(out.begin(), out.begin() + 32) == entity);
  CHECK(std::vector<double>(out.begin() + 32, out.end()) == condensed);

  // A zero condensed vector leaves a zero suffix.
  const auto zero = concat_single(entity, std::vector<double>(128, 0.0));
  for (int i = 32; i < 160; ++i) CHECK(zero[i] == 0.0);
}
