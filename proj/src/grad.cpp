#include "pkgm/grad.hpp"

#include <cmath>

#include "pkgm/vecmath.hpp"

namespace pkgm {

std::vector<double>& SparseGrad::entity_row(EntityId e) {
  auto& row = entity[e];
  if (row.empty()) row.assign(dim, 0.0);
  return row;
}

std::vector<double>& SparseGrad::relation_row(RelationId r) {
  auto& row = relation[r];
  if (row.empty()) row.assign(dim, 0.0);
  return row;
}

std::vector<double>& SparseGrad::matrix_block(RelationId r) {
  auto& block = matrix[r];
  if (block.empty()) block.assign(static_cast<size_t>(dim) * dim, 0.0);
  return block;
}

void SparseGrad::clear() {
  entity.clear();
  relation.clear();
  matrix.clear();
}

namespace {

// Adds factor * d(score_total(h,r,t))/d(params) for one triple.
void add_triple_grad(const ModelParams& p, const Triple& tr, double factor,
                     SparseGrad& out) {
  const uint32_t d = p.dim;
  const auto hv = p.entity(tr.head);
  const auto rv = p.relation(tr.rel);
  const auto tv = p.entity(tr.tail);
  const auto m = p.matrix(tr.rel);

  // u = h + r - t, v = M_r h - r
  std::vector<double> su(d), sv(d);
  for (uint32_t i = 0; i < d; ++i) su[i] = sgn(hv[i] + rv[i] - tv[i]);
  for (uint32_t i = 0; i < d; ++i) {
    double acc = 0.0;
    const double* row = m.data() + static_cast<size_t>(i) * d;
    for (uint32_t j = 0; j < d; ++j) acc += row[j] * hv[j];
    sv[i] = sgn(acc - rv[i]);
  }

  auto& gh = out.entity_row(tr.head);
  auto& gt = out.entity_row(tr.tail);
  auto& gr = out.relation_row(tr.rel);
  auto& gm = out.matrix_block(tr.rel);

  // d s_T/dh = sign(u), d s_T/dr = sign(u), d s_T/dt = -sign(u)
  // d s_R/dh = M_r^T sign(v), d s_R/dr = -sign(v), d s_R/dM_r = sign(v) h^T
  for (uint32_t i = 0; i < d; ++i) {
    gh[i] += factor * su[i];
    gt[i] -= factor * su[i];
    gr[i] += factor * (su[i] - sv[i]);
  }
  for (uint32_t i = 0; i < d; ++i) {
    const double fi = factor * sv[i];
    if (fi == 0.0) continue;
    const double* row = m.data() + static_cast<size_t>(i) * d;
    double* gm_row = gm.data() + static_cast<size_t>(i) * d;
    for (uint32_t j = 0; j < d; ++j) {
      gh[j] += fi * row[j];
      gm_row[j] += fi * hv[j];
    }
  }
}

}  // namespace

double accumulate_pair_grad(const ModelParams& p, const Triple& pos,
                            const Triple& neg, double margin,
                            SparseGrad& out) {
  const double sp = score_total(p, pos.head, pos.rel, pos.tail);
  const double sn = score_total(p, neg.head, neg.rel, neg.tail);
  const double z = sp + margin - sn;
  if (z <= 0.0) return 0.0;
  add_triple_grad(p, pos, +1.0, out);
  add_triple_grad(p, neg, -1.0, out);
  return z;
}

SparseGrad grad(const ModelParams& p, const Triple& pos, const Triple& neg,
                double margin) {
  SparseGrad g(p.dim);
  accumulate_pair_grad(p, pos, neg, margin, g);
  return g;
}

}  // namespace pkgm
