#pragma once

#include <mutex>
#include <unordered_map>
#include <vector>

#include "pkgm/grad.hpp"

namespace pkgm {

// Lazy Adam over sparse gradients: first and second moments exist only
// for rows that have been touched, and untouched rows see no moment
// decay. Bias correction uses a per-row step count. Map growth is the
// only mutation guarded for multi-worker use; value updates race under
// the trainer's last-writer-wins contract.
class SparseAdam {
 public:
  SparseAdam(double lr, double beta1, double beta2, double eps)
      : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void step(ModelParams& params, const SparseGrad& grad);

  size_t touched_rows() const {
    return entity_.size() + relation_.size() + matrix_.size();
  }

 private:
  struct RowState {
    uint64_t t = 0;
    std::vector<double> m;
    std::vector<double> v;
  };

  RowState& get(std::unordered_map<uint32_t, RowState>& table, uint32_t id,
                size_t len);
  void update(std::span<double> target, const std::vector<double>& g,
              RowState& s);

  double lr_, beta1_, beta2_, eps_;
  std::unordered_map<uint32_t, RowState> entity_, relation_, matrix_;
  std::mutex alloc_mu_;
};

}  // namespace pkgm
