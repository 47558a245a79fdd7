#pragma once

#include <map>
#include <vector>

#include "pkgm/model.hpp"

namespace pkgm {

// Gradient restricted to the rows and matrices a pair actually touches.
// Ordered maps keep iteration deterministic.
struct SparseGrad {
  uint32_t dim = 0;
  std::map<EntityId, std::vector<double>> entity;      // d each
  std::map<RelationId, std::vector<double>> relation;  // d each
  std::map<RelationId, std::vector<double>> matrix;    // d*d each

  explicit SparseGrad(uint32_t d) : dim(d) {}

  std::vector<double>& entity_row(EntityId e);
  std::vector<double>& relation_row(RelationId r);
  std::vector<double>& matrix_block(RelationId r);

  bool empty() const {
    return entity.empty() && relation.empty() && matrix.empty();
  }
  void clear();
};

// Accumulate the subgradient of hinge(score_total(pos) + margin
// - score_total(neg), 0) into `out`; returns the pair's hinge loss.
// Zero loss contributes no entries. sign(0) = 0 at L1 kinks.
double accumulate_pair_grad(const ModelParams& p, const Triple& pos,
                            const Triple& neg, double margin, SparseGrad& out);

// Gradient of a single (positive, negative) pair.
SparseGrad grad(const ModelParams& p, const Triple& pos, const Triple& neg,
                double margin);

}  // namespace pkgm
