#include "pkgm/ncf.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "pkgm/adapters.hpp"
#include "pkgm/vecmath.hpp"

namespace pkgm {

namespace {

constexpr double kProbClip = 1e-12;

double clip_prob(double p) {
  return std::min(1.0 - kProbClip, std::max(kProbClip, p));
}

void check_user(const NcfParams& p, UserId u) {
  if (u >= p.n_users)
    throw IndexError("user id out of range: " + std::to_string(u));
}

void check_item(const NcfParams& p, ItemId i) {
  if (i >= p.n_items)
    throw IndexError("item id out of range: " + std::to_string(i));
}

}  // namespace

const char* variant_name(NcfVariant v) {
  switch (v) {
    case NcfVariant::base: return "base";
    case NcfVariant::pkgm_t: return "pkgm-t";
    case NcfVariant::pkgm_r: return "pkgm-r";
    case NcfVariant::pkgm_all: return "pkgm-all";
  }
  return "?";
}

NcfVariant variant_from_name(const std::string& name) {
  if (name == "base") return NcfVariant::base;
  if (name == "pkgm-t") return NcfVariant::pkgm_t;
  if (name == "pkgm-r") return NcfVariant::pkgm_r;
  if (name == "pkgm-all") return NcfVariant::pkgm_all;
  throw ConfigError("unknown NCF variant: " + name);
}

void NcfConfig::validate() const {
  if (gmf_dim < 1 || mlp_dim < 1) throw ConfigError("embedding dims must be >= 1");
  if (hidden.empty()) throw ConfigError("at least one hidden layer required");
  if (learning_rate <= 0.0) throw ConfigError("learning rate must be > 0");
  if (l2 < 0.0) throw ConfigError("l2 must be >= 0");
  if (batch_size < 1 || epochs < 1) throw ConfigError("batch/epochs must be >= 1");
  if (negative_ratio < 1) throw ConfigError("negative ratio must be >= 1");
  if (variant == NcfVariant::base && feature_dim != 0)
    throw ConfigError("base variant takes no item features");
  if (variant != NcfVariant::base && feature_dim == 0)
    throw ConfigError("pkgm variants need feature_dim > 0");
}

uint64_t NcfConfig::hash() const {
  std::ostringstream os;
  os << "gmf=" << gmf_dim << ";mlp=" << mlp_dim << ";hidden=";
  for (uint32_t h : hidden) os << h << ",";
  os << ";feat=" << feature_dim << ";lr=" << learning_rate << ";l2=" << l2
     << ";batch=" << batch_size << ";epochs=" << epochs
     << ";neg=" << negative_ratio << ";seed=" << seed << ";b1=" << adam_beta1
     << ";b2=" << adam_beta2 << ";eps=" << adam_eps
     << ";variant=" << variant_name(variant);
  return fnv1a(os.str());
}

NcfParams NcfParams::init(uint32_t n_users, uint32_t n_items,
                          const NcfConfig& cfg) {
  cfg.validate();
  NcfParams p;
  p.n_users = n_users;
  p.n_items = n_items;
  p.gmf_dim = cfg.gmf_dim;
  p.mlp_dim = cfg.mlp_dim;
  p.feature_dim = cfg.feature_dim;
  p.hidden = cfg.hidden;

  Rng rng(cfg.seed, /*stream=*/0x4E4346);
  auto gauss_fill = [&rng](std::vector<double>& v, size_t n) {
    v.resize(n);
    for (auto& x : v) x = 0.01 * rng.gaussian();
  };
  // GMF tables are drawn first so base and pkgm variants share them
  // for a fixed seed.
  gauss_fill(p.gmf_user, static_cast<size_t>(n_users) * cfg.gmf_dim);
  gauss_fill(p.gmf_item, static_cast<size_t>(n_items) * cfg.gmf_dim);
  gauss_fill(p.mlp_user, static_cast<size_t>(n_users) * cfg.mlp_dim);
  gauss_fill(p.mlp_item, static_cast<size_t>(n_items) * cfg.mlp_dim);

  uint32_t in_dim = cfg.mlp_input_dim();
  for (uint32_t out_dim : cfg.hidden) {
    std::vector<double> w(static_cast<size_t>(in_dim) * out_dim);
    const double bound = std::sqrt(6.0 / (in_dim + out_dim));
    for (auto& x : w) x = rng.uniform(-bound, bound);
    p.weights.push_back(std::move(w));
    p.biases.emplace_back(out_dim, 0.0);
    in_dim = out_dim;
  }

  const uint32_t fdim = cfg.fusion_dim();
  p.fusion.resize(fdim);
  const double fb = std::sqrt(6.0 / (fdim + 1));
  for (auto& x : p.fusion) x = rng.uniform(-fb, fb);
  return p;
}

std::span<const double> NcfParams::gmf_u(UserId u) const {
  check_user(*this, u);
  return {gmf_user.data() + static_cast<size_t>(u) * gmf_dim, gmf_dim};
}
std::span<const double> NcfParams::gmf_i(ItemId i) const {
  check_item(*this, i);
  return {gmf_item.data() + static_cast<size_t>(i) * gmf_dim, gmf_dim};
}
std::span<const double> NcfParams::mlp_u(UserId u) const {
  check_user(*this, u);
  return {mlp_user.data() + static_cast<size_t>(u) * mlp_dim, mlp_dim};
}
std::span<const double> NcfParams::mlp_i(ItemId i) const {
  check_item(*this, i);
  return {mlp_item.data() + static_cast<size_t>(i) * mlp_dim, mlp_dim};
}

std::vector<double> gmf_forward(const NcfParams& p, UserId u, ItemId i) {
  const auto pu = p.gmf_u(u), qi = p.gmf_i(i);
  std::vector<double> out(p.gmf_dim);
  for (uint32_t j = 0; j < p.gmf_dim; ++j) out[j] = pu[j] * qi[j];
  return out;
}

namespace {

std::vector<double> assemble_mlp_input(
    const NcfParams& p, UserId u, ItemId i,
    std::optional<std::span<const double>> pkgm) {
  if (pkgm.has_value() != (p.feature_dim > 0))
    throw ConfigError("variant/feature mismatch: params expect feature_dim=" +
                      std::to_string(p.feature_dim));
  if (pkgm && pkgm->size() != p.feature_dim)
    throw ConfigError("feature vector has dim " + std::to_string(pkgm->size()) +
                      ", params expect " + std::to_string(p.feature_dim));
  const auto pu = p.mlp_u(u), qi = p.mlp_i(i);
  std::vector<double> z;
  z.reserve(2 * p.mlp_dim + p.feature_dim);
  z.insert(z.end(), pu.begin(), pu.end());
  z.insert(z.end(), qi.begin(), qi.end());
  if (pkgm) z.insert(z.end(), pkgm->begin(), pkgm->end());
  return z;
}

// out = W^T z + b
std::vector<double> dense_layer(const std::vector<double>& w,
                                const std::vector<double>& b,
                                const std::vector<double>& z) {
  const size_t out_dim = b.size();
  const size_t in_dim = z.size();
  std::vector<double> out(b);
  for (size_t i = 0; i < in_dim; ++i) {
    const double zi = z[i];
    const double* row = w.data() + i * out_dim;
    for (size_t o = 0; o < out_dim; ++o) out[o] += row[o] * zi;
  }
  return out;
}

void relu_inplace(std::vector<double>& v) {
  for (auto& x : v) x = x > 0.0 ? x : 0.0;
}

}  // namespace

std::vector<double> mlp_forward(const NcfParams& p, UserId u, ItemId i,
                                std::optional<std::span<const double>> pkgm) {
  std::vector<double> z = assemble_mlp_input(p, u, i, pkgm);
  for (size_t l = 0; l < p.weights.size(); ++l) {
    z = dense_layer(p.weights[l], p.biases[l], z);
    relu_inplace(z);
  }
  return z;
}

double predict(const NcfParams& p, UserId u, ItemId i,
               std::optional<std::span<const double>> pkgm) {
  const std::vector<double> g = gmf_forward(p, u, i);
  const std::vector<double> m = mlp_forward(p, u, i, pkgm);
  double s = 0.0;
  for (size_t j = 0; j < g.size(); ++j) s += p.fusion[j] * g[j];
  for (size_t j = 0; j < m.size(); ++j) s += p.fusion[g.size() + j] * m[j];
  return clip_prob(sigmoid(s));
}

double bce_loss(std::span<const double> predictions,
                std::span<const double> labels) {
  if (predictions.size() != labels.size())
    throw ConfigError("predictions/labels length mismatch");
  double loss = 0.0;
  for (size_t i = 0; i < predictions.size(); ++i) {
    const double p = clip_prob(predictions[i]);
    loss -= labels[i] * std::log(p) + (1.0 - labels[i]) * std::log(1.0 - p);
  }
  return loss;
}

std::vector<NcfSample> sample_ncf_negatives(
    const std::vector<InteractionSet::Row>& positives,
    const std::vector<std::vector<ItemId>>& by_user, uint32_t n_items,
    uint32_t ratio, Rng& rng) {
  if (ratio < 1) throw ConfigError("negative ratio must be >= 1");
  std::vector<NcfSample> out;
  out.reserve(positives.size() * (1 + ratio));
  for (const auto& row : positives) {
    const auto& seen = by_user[row.user];
    if (seen.size() >= n_items)
      throw SamplingError("user " + std::to_string(row.user) +
                          " interacts with every item; cannot sample negatives");
    out.push_back({row.user, row.item, 1.0});
    for (uint32_t k = 0; k < ratio; ++k) {
      uint32_t guard = 0;
      for (;;) {
        const ItemId j = rng.bounded(n_items);
        if (!std::binary_search(seen.begin(), seen.end(), j)) {
          out.push_back({row.user, j, 0.0});
          break;
        }
        if (++guard > 10000)
          throw SamplingError("negative sampling stalled for user " +
                              std::to_string(row.user));
      }
    }
  }
  return out;
}

NcfGrad NcfGrad::zeros_like(const NcfParams& p) {
  NcfGrad g;
  g.gmf_user.assign(p.gmf_user.size(), 0.0);
  g.gmf_item.assign(p.gmf_item.size(), 0.0);
  g.mlp_user.assign(p.mlp_user.size(), 0.0);
  g.mlp_item.assign(p.mlp_item.size(), 0.0);
  for (const auto& w : p.weights) g.weights.emplace_back(w.size(), 0.0);
  for (const auto& b : p.biases) g.biases.emplace_back(b.size(), 0.0);
  g.fusion.assign(p.fusion.size(), 0.0);
  return g;
}

void NcfGrad::clear() {
  auto zero = [](std::vector<double>& v) { std::fill(v.begin(), v.end(), 0.0); };
  zero(gmf_user);
  zero(gmf_item);
  zero(mlp_user);
  zero(mlp_item);
  for (auto& w : weights) zero(w);
  for (auto& b : biases) zero(b);
  zero(fusion);
}

double ncf_sample_grad(const NcfParams& p, const NcfSample& s,
                       std::optional<std::span<const double>> pkgm,
                       NcfGrad& out) {
  const uint32_t gd = p.gmf_dim;
  const auto pu = p.gmf_u(s.user), qi = p.gmf_i(s.item);

  // Forward, keeping activations per layer.
  std::vector<double> g(gd);
  for (uint32_t j = 0; j < gd; ++j) g[j] = pu[j] * qi[j];

  std::vector<std::vector<double>> acts;  // acts[0] = z1
  acts.push_back(assemble_mlp_input(p, s.user, s.item, pkgm));
  std::vector<std::vector<double>> pres;
  for (size_t l = 0; l < p.weights.size(); ++l) {
    pres.push_back(dense_layer(p.weights[l], p.biases[l], acts.back()));
    std::vector<double> a = pres.back();
    relu_inplace(a);
    acts.push_back(std::move(a));
  }
  const std::vector<double>& phi_mlp = acts.back();

  double score = 0.0;
  for (uint32_t j = 0; j < gd; ++j) score += p.fusion[j] * g[j];
  for (size_t j = 0; j < phi_mlp.size(); ++j)
    score += p.fusion[gd + j] * phi_mlp[j];
  const double yhat = clip_prob(sigmoid(score));
  const double loss =
      -(s.label * std::log(yhat) + (1.0 - s.label) * std::log(1.0 - yhat));

  // d loss / d score
  const double ds = yhat - s.label;

  // Fusion weights and the split of d loss / d phi.
  std::vector<double> dmlp(phi_mlp.size());
  for (uint32_t j = 0; j < gd; ++j) {
    out.fusion[j] += ds * g[j];
    const double dg = ds * p.fusion[j];
    out.gmf_user[static_cast<size_t>(s.user) * gd + j] += dg * qi[j];
    out.gmf_item[static_cast<size_t>(s.item) * gd + j] += dg * pu[j];
  }
  for (size_t j = 0; j < phi_mlp.size(); ++j) {
    out.fusion[gd + j] += ds * phi_mlp[j];
    dmlp[j] = ds * p.fusion[gd + j];
  }

  // Backprop through the ReLU stack.
  std::vector<double> delta = std::move(dmlp);
  for (size_t l = p.weights.size(); l-- > 0;) {
    const size_t out_dim = p.biases[l].size();
    const auto& a_in = acts[l];
    for (size_t o = 0; o < out_dim; ++o)
      if (pres[l][o] <= 0.0) delta[o] = 0.0;
    auto& gw = out.weights[l];
    auto& gb = out.biases[l];
    for (size_t o = 0; o < out_dim; ++o) gb[o] += delta[o];
    for (size_t i = 0; i < a_in.size(); ++i) {
      const double ai = a_in[i];
      double* gw_row = gw.data() + i * out_dim;
      for (size_t o = 0; o < out_dim; ++o) gw_row[o] += ai * delta[o];
    }
    std::vector<double> prev(a_in.size(), 0.0);
    for (size_t i = 0; i < a_in.size(); ++i) {
      const double* w_row = p.weights[l].data() + i * out_dim;
      double acc = 0.0;
      for (size_t o = 0; o < out_dim; ++o) acc += w_row[o] * delta[o];
      prev[i] = acc;
    }
    delta = std::move(prev);
  }

  // delta now spans [mlp_u | mlp_i | features]; features are frozen.
  const uint32_t md = p.mlp_dim;
  for (uint32_t j = 0; j < md; ++j) {
    out.mlp_user[static_cast<size_t>(s.user) * md + j] += delta[j];
    out.mlp_item[static_cast<size_t>(s.item) * md + j] += delta[md + j];
  }
  return loss;
}

namespace {

// Dense Adam shared by all NCF tensors; one step per batch.
struct NcfAdam {
  NcfGrad m, v;
  uint64_t t = 0;
  double lr, b1, b2, eps;

  NcfAdam(const NcfParams& p, const NcfConfig& cfg)
      : m(NcfGrad::zeros_like(p)),
        v(NcfGrad::zeros_like(p)),
        lr(cfg.learning_rate),
        b1(cfg.adam_beta1),
        b2(cfg.adam_beta2),
        eps(cfg.adam_eps) {}

  void update(std::vector<double>& theta, const std::vector<double>& g,
              std::vector<double>& mv, std::vector<double>& vv) {
    const double bc1 = 1.0 - std::pow(b1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(b2, static_cast<double>(t));
    for (size_t i = 0; i < theta.size(); ++i) {
      mv[i] = b1 * mv[i] + (1.0 - b1) * g[i];
      vv[i] = b2 * vv[i] + (1.0 - b2) * g[i] * g[i];
      theta[i] -= lr * (mv[i] / bc1) / (std::sqrt(vv[i] / bc2) + eps);
    }
  }

  void step(NcfParams& p, const NcfGrad& g) {
    ++t;
    update(p.gmf_user, g.gmf_user, m.gmf_user, v.gmf_user);
    update(p.gmf_item, g.gmf_item, m.gmf_item, v.gmf_item);
    update(p.mlp_user, g.mlp_user, m.mlp_user, v.mlp_user);
    update(p.mlp_item, g.mlp_item, m.mlp_item, v.mlp_item);
    for (size_t l = 0; l < p.weights.size(); ++l) {
      update(p.weights[l], g.weights[l], m.weights[l], v.weights[l]);
      update(p.biases[l], g.biases[l], m.biases[l], v.biases[l]);
    }
    update(p.fusion, g.fusion, m.fusion, v.fusion);
  }
};

void add_l2(const std::vector<double>& theta, double l2,
            std::vector<double>& g) {
  for (size_t i = 0; i < theta.size(); ++i) g[i] += 2.0 * l2 * theta[i];
}

}  // namespace

NcfTrainResult train_ncf(const LooSplit& split, uint32_t n_users,
                         uint32_t n_items, std::vector<double> item_features,
                         const NcfConfig& cfg) {
  cfg.validate();
  if (cfg.feature_dim > 0 &&
      item_features.size() != static_cast<size_t>(n_items) * cfg.feature_dim)
    throw ConfigError("item feature matrix has wrong size");
  if (cfg.feature_dim == 0 && !item_features.empty())
    throw ConfigError("base variant must not receive item features");
  if (split.train.empty()) throw ConfigError("empty training split");

  NcfTrainResult result;
  result.model.cfg = cfg;
  result.model.item_features = std::move(item_features);
  result.model.params = NcfParams::init(n_users, n_items, cfg);
  NcfParams& params = result.model.params;
  const NcfModel& model = result.model;

  NcfAdam opt(params, cfg);
  NcfGrad grad = NcfGrad::zeros_like(params);

  for (uint32_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng rng(cfg.seed, /*stream=*/100 + epoch);
    std::vector<NcfSample> samples = sample_ncf_negatives(
        split.train, split.train_by_user, n_items, cfg.negative_ratio, rng);
    rng.shuffle(samples);

    double epoch_loss = 0.0;
    for (size_t start = 0; start < samples.size(); start += cfg.batch_size) {
      const size_t end = std::min(samples.size(), start + cfg.batch_size);
      grad.clear();
      double batch_sum = 0.0;
      for (size_t i = start; i < end; ++i)
        batch_sum += ncf_sample_grad(params, samples[i],
                                     model.features_of(samples[i].item), grad);
      if (cfg.l2 > 0.0) {
        add_l2(params.gmf_user, cfg.l2, grad.gmf_user);
        add_l2(params.gmf_item, cfg.l2, grad.gmf_item);
        add_l2(params.mlp_user, cfg.l2, grad.mlp_user);
        add_l2(params.mlp_item, cfg.l2, grad.mlp_item);
      }
      if (!std::isfinite(batch_sum))
        throw Error("non-finite NCF loss at epoch " + std::to_string(epoch) +
                    ", batch " + std::to_string(start / cfg.batch_size) +
                    " (lr=" + std::to_string(cfg.learning_rate) + ")");
      opt.step(params, grad);
      epoch_loss += batch_sum;
    }
    result.epoch_mean_loss.push_back(epoch_loss /
                                     static_cast<double>(samples.size()));
  }
  return result;
}

ItemFeatureBuild build_item_features(
    const ModelParams& kg_params, const KeyRelationMap& key_map,
    const Vocab& vocab, const std::vector<std::string>& item_names,
    const std::unordered_map<std::string, std::string>* mapping,
    NcfVariant variant) {
  if (variant == NcfVariant::base)
    throw ConfigError("base variant has no item features");

  ItemFeatureBuild out;
  const uint32_t d = kg_params.dim;
  out.feature_dim = 2 * d + 1;
  out.features.assign(static_cast<size_t>(item_names.size()) * out.feature_dim,
                      0.0);

  for (size_t idx = 0; idx < item_names.size(); ++idx) {
    double* row = out.features.data() + idx * out.feature_dim;
    std::string entity_name = item_names[idx];
    if (mapping) {
      auto it = mapping->find(entity_name);
      if (it != mapping->end()) entity_name = it->second;
    }
    const auto e = vocab.find_entity(entity_name);
    bool missing = true;
    if (e && vocab.category_of(*e).has_value()) {
      const ServiceBundle b = serve_bundle(kg_params, key_map, vocab, *e);
      if (b.k() > 0) {
        const std::vector<double> cond = condense(b);
        for (uint32_t j = 0; j < 2 * d; ++j) row[j] = cond[j];
        if (variant == NcfVariant::pkgm_t)
          for (uint32_t j = d; j < 2 * d; ++j) row[j] = 0.0;
        if (variant == NcfVariant::pkgm_r)
          for (uint32_t j = 0; j < d; ++j) row[j] = 0.0;
        missing = false;
      }
    }
    row[2 * d] = missing ? 1.0 : 0.0;
    if (missing) ++out.missing;
  }
  return out;
}

namespace {

constexpr uint32_t kNcfMagic = 0x4E474B50;  // "PKGN"
constexpr uint32_t kNcfVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

template <typename T>
T take(std::ifstream& in, const std::filesystem::path& p) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!in) throw CheckpointError("truncated NCF checkpoint: " + p.string());
  return v;
}

void put_table(std::ofstream& out, const std::vector<double>& v) {
  put(out, static_cast<uint64_t>(v.size()));
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> take_table(std::ifstream& in,
                               const std::filesystem::path& p) {
  const auto n = take<uint64_t>(in, p);
  std::vector<double> v(n);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw CheckpointError("truncated NCF checkpoint: " + p.string());
  return v;
}

}  // namespace

void save_ncf(const NcfModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  const NcfConfig& c = model.cfg;
  put(out, kNcfMagic);
  put(out, kNcfVersion);
  put(out, model.params.n_users);
  put(out, model.params.n_items);
  put(out, c.gmf_dim);
  put(out, c.mlp_dim);
  put(out, static_cast<uint32_t>(c.hidden.size()));
  for (uint32_t h : c.hidden) put(out, h);
  put(out, c.feature_dim);
  put(out, static_cast<uint32_t>(c.variant));
  put(out, c.learning_rate);
  put(out, c.l2);
  put(out, c.adam_beta1);
  put(out, c.adam_beta2);
  put(out, c.adam_eps);
  put(out, c.batch_size);
  put(out, c.epochs);
  put(out, c.negative_ratio);
  put(out, c.seed);

  put_table(out, model.params.gmf_user);
  put_table(out, model.params.gmf_item);
  put_table(out, model.params.mlp_user);
  put_table(out, model.params.mlp_item);
  for (size_t l = 0; l < model.params.weights.size(); ++l) {
    put_table(out, model.params.weights[l]);
    put_table(out, model.params.biases[l]);
  }
  put_table(out, model.params.fusion);
  put_table(out, model.item_features);
  if (!out) throw IoError("write failed: " + path.string());
}

NcfModel load_ncf(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  if (take<uint32_t>(in, path) != kNcfMagic)
    throw CheckpointError("bad magic in " + path.string());
  if (take<uint32_t>(in, path) != kNcfVersion)
    throw CheckpointError("unsupported NCF checkpoint version");

  NcfModel model;
  NcfConfig& c = model.cfg;
  const auto n_users = take<uint32_t>(in, path);
  const auto n_items = take<uint32_t>(in, path);
  c.gmf_dim = take<uint32_t>(in, path);
  c.mlp_dim = take<uint32_t>(in, path);
  const auto n_hidden = take<uint32_t>(in, path);
  c.hidden.clear();
  for (uint32_t i = 0; i < n_hidden; ++i) c.hidden.push_back(take<uint32_t>(in, path));
  c.feature_dim = take<uint32_t>(in, path);
  c.variant = static_cast<NcfVariant>(take<uint32_t>(in, path));
  c.learning_rate = take<double>(in, path);
  c.l2 = take<double>(in, path);
  c.adam_beta1 = take<double>(in, path);
  c.adam_beta2 = take<double>(in, path);
  c.adam_eps = take<double>(in, path);
  c.batch_size = take<uint32_t>(in, path);
  c.epochs = take<uint32_t>(in, path);
  c.negative_ratio = take<uint32_t>(in, path);
  c.seed = take<uint64_t>(in, path);

  NcfParams& p = model.params;
  p.n_users = n_users;
  p.n_items = n_items;
  p.gmf_dim = c.gmf_dim;
  p.mlp_dim = c.mlp_dim;
  p.feature_dim = c.feature_dim;
  p.hidden = c.hidden;
  p.gmf_user = take_table(in, path);
  p.gmf_item = take_table(in, path);
  p.mlp_user = take_table(in, path);
  p.mlp_item = take_table(in, path);
  for (uint32_t l = 0; l < n_hidden; ++l) {
    p.weights.push_back(take_table(in, path));
    p.biases.push_back(take_table(in, path));
  }
  p.fusion = take_table(in, path);
  model.item_features = take_table(in, path);

  if (p.gmf_user.size() != static_cast<size_t>(n_users) * c.gmf_dim ||
      p.gmf_item.size() != static_cast<size_t>(n_items) * c.gmf_dim ||
      model.item_features.size() !=
          static_cast<size_t>(n_items) * c.feature_dim)
    throw CheckpointError("NCF checkpoint shape mismatch in " + path.string());
  return model;
}

}  // namespace pkgm
