#include "pkgm/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pkgm/vecmath.hpp"

namespace pkgm {

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["metrics"] = metrics;
  j["config_hash"] = hex_u64(config_hash);
  j["seed"] = seed;
  j["dataset_fingerprint"] = dataset_fingerprint;
  j["wall_time_s"] = wall_time_s;
  return j.dump(2) + "\n";
}

EvalReport EvalReport::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  EvalReport r;
  for (const auto& [k, v] : j.at("metrics").items())
    r.metrics[k] = v.get<double>();
  r.config_hash = std::stoull(j.at("config_hash").get<std::string>(), nullptr, 16);
  r.seed = j.at("seed").get<uint64_t>();
  r.dataset_fingerprint = j.at("dataset_fingerprint").get<std::string>();
  r.wall_time_s = j.at("wall_time_s").get<double>();
  return r;
}

void EvalReport::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out << to_json();
  if (!out) throw IoError("write failed: " + path.string());
}

EvalReport EvalReport::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

namespace {

// Pessimistic filtered rank of t for (h, r): 1 + entities strictly
// closer + unfiltered entities at equal distance.
uint32_t filtered_rank(const ModelParams& params, const Triple& test,
                       const TripleStore& filter) {
  const auto hv = params.entity(test.head);
  const auto rv = params.relation(test.rel);
  const uint32_t d = params.dim;
  std::vector<double> target(d);
  for (uint32_t i = 0; i < d; ++i) target[i] = hv[i] + rv[i];

  const auto known = filter.tails(test.head, test.rel);
  auto is_filtered = [&](EntityId e) {
    return e != test.tail &&
           std::binary_search(known.begin(), known.end(), e);
  };

  const auto tv = params.entity(test.tail);
  double true_dist = 0.0;
  for (uint32_t i = 0; i < d; ++i) true_dist += std::fabs(target[i] - tv[i]);

  uint32_t rank = 1;
  for (EntityId e = 0; e < params.n_entities; ++e) {
    if (e == test.tail || is_filtered(e)) continue;
    const auto ev = params.entity(e);
    double dist = 0.0;
    for (uint32_t i = 0; i < d; ++i) dist += std::fabs(target[i] - ev[i]);
    if (dist <= true_dist) ++rank;
  }
  return rank;
}

template <typename Fn>
void parallel_for(size_t n, uint32_t threads, Fn&& fn) {
  if (threads <= 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  for (uint32_t t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& t : pool) t.join();
}

}  // namespace

EvalReport eval_link_prediction(const ModelParams& params,
                                std::span<const Triple> tests,
                                const TripleStore& filter,
                                std::span<const uint32_t> ks,
                                bool allow_train_overlap, uint32_t threads) {
  if (tests.empty()) throw EvalError("empty link-prediction test set");
  if (!allow_train_overlap)
    for (const Triple& t : tests)
      if (filter.contains(t))
        throw EvalError(
            "test triple appears in the filter store; pass "
            "allow_train_overlap to evaluate anyway");

  std::vector<uint32_t> ranks(tests.size());
  parallel_for(tests.size(), threads, [&](size_t i) {
    ranks[i] = filtered_rank(params, tests[i], filter);
  });

  EvalReport report;
  double mean_rank = 0.0;
  for (uint32_t r : ranks) mean_rank += r;
  mean_rank /= static_cast<double>(ranks.size());
  report.metrics["mean_rank"] = mean_rank;
  for (uint32_t k : ks) {
    size_t hits = 0;
    for (uint32_t r : ranks)
      if (r <= k) ++hits;
    report.metrics["hit@" + std::to_string(k)] =
        static_cast<double>(hits) / static_cast<double>(ranks.size());
  }
  report.metrics["n_test"] = static_cast<double>(tests.size());
  return report;
}

double auc_from_scores(std::span<const double> positives,
                       std::span<const double> negatives) {
  if (positives.empty() || negatives.empty())
    throw EvalError("AUC needs nonempty positive and negative sets");

  // Mann-Whitney via average ranks on the pooled sample.
  struct Tagged {
    double score;
    bool positive;
  };
  std::vector<Tagged> all;
  all.reserve(positives.size() + negatives.size());
  for (double s : positives) all.push_back({s, true});
  for (double s : negatives) all.push_back({s, false});
  std::sort(all.begin(), all.end(),
            [](const Tagged& a, const Tagged& b) { return a.score < b.score; });

  double rank_sum_pos = 0.0;
  size_t i = 0;
  while (i < all.size()) {
    size_t j = i;
    while (j < all.size() && all[j].score == all[i].score) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based
    for (size_t q = i; q < j; ++q)
      if (all[q].positive) rank_sum_pos += avg_rank;
    i = j;
  }
  const auto np = static_cast<double>(positives.size());
  const auto nn = static_cast<double>(negatives.size());
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

EvalReport eval_relation_existence(
    const ModelParams& params,
    std::span<const std::pair<EntityId, RelationId>> positives,
    std::span<const std::pair<EntityId, RelationId>> negatives) {
  if (positives.empty() || negatives.empty())
    throw EvalError("relation-existence evaluation needs both sets");

  auto norms = [&](std::span<const std::pair<EntityId, RelationId>> pairs) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& [h, r] : pairs)
      out.push_back(score_relation(params, h, r));
    return out;
  };
  const std::vector<double> pos_norms = norms(positives);
  const std::vector<double> neg_norms = norms(negatives);

  std::vector<double> pos_scores(pos_norms.size()), neg_scores(neg_norms.size());
  for (size_t i = 0; i < pos_norms.size(); ++i) pos_scores[i] = -pos_norms[i];
  for (size_t i = 0; i < neg_norms.size(); ++i) neg_scores[i] = -neg_norms[i];

  auto mean = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };

  EvalReport report;
  report.metrics["auc"] = auc_from_scores(pos_scores, neg_scores);
  report.metrics["mean_norm_pos"] = mean(pos_norms);
  report.metrics["mean_norm_neg"] = mean(neg_norms);
  report.metrics["norm_gap"] = mean(neg_norms) - mean(pos_norms);
  return report;
}

EvalReport eval_recommendation(const NcfModel& model,
                               const InteractionSet& data,
                               const LooSplit& split,
                               const RecEvalConfig& cfg) {
  const auto n_items = static_cast<uint32_t>(data.n_items());
  const auto n_users = static_cast<uint32_t>(data.n_users());

  struct UserResult {
    bool evaluated = false;
    uint32_t rank = 0;
  };
  std::vector<UserResult> results(n_users);

  parallel_for(n_users, cfg.threads, [&](size_t uu) {
    const auto u = static_cast<UserId>(uu);
    const ItemId held = split.holdout[u];
    if (held == kInvalidId) return;

    const auto& seen = data.by_user[u];  // train + holdout
    if (seen.size() + cfg.n_negatives > n_items) {
      // Not enough unobserved items to sample the full slate.
      return;
    }

    Rng rng(cfg.seed, /*stream=*/0xEC0000 + u);
    std::vector<ItemId> slate;
    slate.reserve(cfg.n_negatives);
    std::vector<uint8_t> taken(n_items, 0);
    while (slate.size() < cfg.n_negatives) {
      const ItemId j = rng.bounded(n_items);
      if (taken[j] || j == held ||
          std::binary_search(seen.begin(), seen.end(), j))
        continue;
      taken[j] = 1;
      slate.push_back(j);
    }

    const double held_score = predict(model.params, u, held,
                                      model.features_of(held));
    uint32_t rank = 1;
    for (ItemId j : slate) {
      const double s = predict(model.params, u, j, model.features_of(j));
      if (s >= held_score) ++rank;  // pessimistic ties
    }
    results[u] = {true, rank};
  });

  size_t evaluated = 0;
  for (const auto& r : results) evaluated += r.evaluated ? 1 : 0;
  if (evaluated == 0) throw EvalError("no user could be evaluated");

  EvalReport report;
  report.seed = cfg.seed;
  for (uint32_t k : cfg.ks) {
    double hr = 0.0, ndcg = 0.0;
    for (const auto& r : results) {
      if (!r.evaluated) continue;
      if (r.rank <= k) {
        hr += 1.0;
        ndcg += 1.0 / std::log2(static_cast<double>(r.rank) + 1.0);
      }
    }
    report.metrics["hr@" + std::to_string(k)] = hr / static_cast<double>(evaluated);
    report.metrics["ndcg@" + std::to_string(k)] =
        ndcg / static_cast<double>(evaluated);
  }
  report.metrics["n_users_evaluated"] = static_cast<double>(evaluated);
  report.metrics["n_users_skipped"] =
      static_cast<double>(n_users - evaluated);
  return report;
}

namespace {

std::vector<std::string> aligned_keys(const std::vector<EvalReport>& reports) {
  if (reports.empty()) throw EvalError("no reports to compare");
  std::vector<std::string> keys;
  for (const auto& [k, _] : reports.front().metrics) keys.push_back(k);
  for (size_t i = 1; i < reports.size(); ++i) {
    std::vector<std::string> other;
    for (const auto& [k, _] : reports[i].metrics) other.push_back(k);
    if (other != keys)
      throw EvalError("metric keys mismatch between report 0 and report " +
                      std::to_string(i));
  }
  return keys;
}

}  // namespace

std::string compare_runs_text(const std::vector<EvalReport>& reports,
                              const std::vector<std::string>& names) {
  const auto keys = aligned_keys(reports);
  std::ostringstream os;
  os << std::left << std::setw(22) << "metric";
  for (size_t i = 0; i < reports.size(); ++i) {
    const std::string name = i < names.size() ? names[i] : ("run" + std::to_string(i));
    os << std::right << std::setw(14) << name;
    if (i > 0) os << std::setw(12) << "delta";
  }
  os << '\n';
  for (const auto& key : keys) {
    os << std::left << std::setw(22) << key;
    const double base = reports.front().metrics.at(key);
    for (size_t i = 0; i < reports.size(); ++i) {
      const double v = reports[i].metrics.at(key);
      os << std::right << std::setw(14) << std::fixed << std::setprecision(5) << v;
      if (i > 0)
        os << std::setw(12) << std::showpos << v - base << std::noshowpos;
    }
    os << '\n';
  }
  return os.str();
}

std::string compare_runs_tsv(const std::vector<EvalReport>& reports,
                             const std::vector<std::string>& names) {
  const auto keys = aligned_keys(reports);
  std::ostringstream os;
  os << "metric";
  for (size_t i = 0; i < reports.size(); ++i) {
    const std::string name = i < names.size() ? names[i] : ("run" + std::to_string(i));
    os << '\t' << name;
    if (i > 0) os << '\t' << name << "_delta";
  }
  os << '\n';
  os << std::setprecision(9);
  for (const auto& key : keys) {
    os << key;
    const double base = reports.front().metrics.at(key);
    for (size_t i = 0; i < reports.size(); ++i) {
      const double v = reports[i].metrics.at(key);
      os << '\t' << v;
      if (i > 0) os << '\t' << v - base;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace pkgm
