#include "pkgm/adam.hpp"

#include <cmath>

namespace pkgm {

SparseAdam::RowState& SparseAdam::get(
    std::unordered_map<uint32_t, RowState>& table, uint32_t id, size_t len) {
  std::lock_guard<std::mutex> lock(alloc_mu_);
  RowState& s = table[id];
  if (s.m.empty()) {
    s.m.assign(len, 0.0);
    s.v.assign(len, 0.0);
  }
  return s;  // node-based map: reference stays valid across rehash
}

void SparseAdam::update(std::span<double> target, const std::vector<double>& g,
                        RowState& s) {
  s.t += 1;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(s.t));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(s.t));
  for (size_t i = 0; i < g.size(); ++i) {
    s.m[i] = beta1_ * s.m[i] + (1.0 - beta1_) * g[i];
    s.v[i] = beta2_ * s.v[i] + (1.0 - beta2_) * g[i] * g[i];
    const double mhat = s.m[i] / bc1;
    const double vhat = s.v[i] / bc2;
    target[i] -= lr_ * mhat / (std::sqrt(vhat) + eps_);
  }
}

void SparseAdam::step(ModelParams& params, const SparseGrad& grad) {
  for (const auto& [e, g] : grad.entity)
    update(params.entity(e), g, get(entity_, e, params.dim));
  for (const auto& [r, g] : grad.relation)
    update(params.relation(r), g, get(relation_, r, params.dim));
  for (const auto& [r, g] : grad.matrix)
    update(params.matrix(r), g,
           get(matrix_, r, static_cast<size_t>(params.dim) * params.dim));
}

}  // namespace pkgm
