#pragma once

#include <optional>
#include <span>
#include <vector>

#include "pkgm/common.hpp"
#include "pkgm/service.hpp"
#include "pkgm/vecmath.hpp"

namespace pkgm {

// Ordered embedding sequence fed to a sequence model.
struct SequenceInput {
  std::vector<std::vector<double>> embeddings;

  uint32_t dim() const {
    return embeddings.empty()
               ? 0
               : static_cast<uint32_t>(embeddings.front().size());
  }
};

// Consumer-owned linear map from service-vector space (in_dim) to the
// sequence model's embedding space (out_dim). Row-major out_dim x in_dim.
struct LinearProjection {
  uint32_t out_dim = 0;
  uint32_t in_dim = 0;
  std::vector<double> weights;

  std::vector<double> apply(std::span<const double> v) const {
    if (v.size() != in_dim) throw AdapterError("projection input dim mismatch");
    std::vector<double> out(out_dim);
    matvec(weights, v, out);
    return out;
  }
};

// Appends the bundle's 2k service vectors after the original sequence:
// triple vectors first, then relation vectors. Dimensions must match the
// input unless a projection is supplied.
inline SequenceInput append_sequence(const SequenceInput& input,
                                     const ServiceBundle& bundle,
                                     const LinearProjection* projection = nullptr) {
  if (input.embeddings.empty())
    throw AdapterError("sequence input must be nonempty");
  if (bundle.k() == 0) return input;

  const uint32_t in_dim = input.dim();
  if (projection == nullptr && bundle.dim() != in_dim)
    throw AdapterError("service vector dim " + std::to_string(bundle.dim()) +
                       " != sequence dim " + std::to_string(in_dim) +
                       " and no projection configured");
  if (projection != nullptr &&
      (projection->in_dim != bundle.dim() || projection->out_dim != in_dim))
    throw AdapterError("projection shape does not bridge bundle to sequence");

  SequenceInput out = input;
  auto push = [&](const std::vector<double>& v) {
    out.embeddings.push_back(projection ? projection->apply(v) : v);
  };
  for (const auto& v : bundle.triple_vectors) push(v);
  for (const auto& v : bundle.relation_vectors) push(v);
  return out;
}

// Mean over j of [S_j; S_{j+k}]; one 2d vector per bundle. Bundles
// shorter than the nominal k average over the pairs they actually have.
inline std::vector<double> condense(const ServiceBundle& bundle) {
  const size_t k = bundle.k();
  if (k == 0) throw AdapterError("cannot condense an empty bundle");
  const uint32_t d = bundle.dim();
  std::vector<double> out(2 * static_cast<size_t>(d), 0.0);
  for (size_t j = 0; j < k; ++j) {
    for (uint32_t i = 0; i < d; ++i) {
      out[i] += bundle.triple_vectors[j][i];
      out[d + i] += bundle.relation_vectors[j][i];
    }
  }
  for (auto& x : out) x /= static_cast<double>(k);
  return out;
}

// Entity embedding first, condensed knowledge vector second.
inline std::vector<double> concat_single(std::span<const double> entity_emb,
                                         std::span<const double> condensed) {
  std::vector<double> out;
  out.reserve(entity_emb.size() + condensed.size());
  out.insert(out.end(), entity_emb.begin(), entity_emb.end());
  out.insert(out.end(), condensed.begin(), condensed.end());
  return out;
}

}  // namespace pkgm
