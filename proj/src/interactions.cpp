#include "pkgm/interactions.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

#include "pkgm/tsv.hpp"

namespace pkgm {

void InteractionSet::index() {
  by_user.assign(n_users(), {});
  for (const Row& r : rows) by_user[r.user].push_back(r.item);
  for (auto& items : by_user) std::sort(items.begin(), items.end());
}

InteractionSet load_interactions(const std::filesystem::path& path) {
  InteractionSet out;
  std::unordered_map<std::string, UserId> users;
  std::unordered_map<std::string, ItemId> items;
  // (user, item) -> (ts, order) keeping the latest occurrence
  std::map<std::pair<UserId, ItemId>, std::pair<int64_t, size_t>> latest;

  size_t order = 0;
  for_each_tsv_line(
      path, [&](size_t lineno, const std::vector<std::string_view>& f) {
        if (f.size() != 3 || f[0].empty() || f[1].empty())
          throw ParseError(path.string() + ":" + std::to_string(lineno) +
                           ": expected user<TAB>item<TAB>timestamp");
        int64_t ts = 0;
        try {
          ts = std::stoll(std::string(f[2]));
        } catch (const std::exception&) {
          throw ParseError(path.string() + ":" + std::to_string(lineno) +
                           ": bad timestamp");
        }
        auto [uit, unew] = users.try_emplace(
            std::string(f[0]), static_cast<UserId>(out.user_names.size()));
        if (unew) out.user_names.emplace_back(f[0]);
        auto [iit, inew] = items.try_emplace(
            std::string(f[1]), static_cast<ItemId>(out.item_names.size()));
        if (inew) out.item_names.emplace_back(f[1]);

        auto& slot = latest[{uit->second, iit->second}];
        if (slot.second == 0 || ts >= slot.first) slot = {ts, order + 1};
        ++order;
      });
  if (latest.empty())
    throw EmptyInputError("empty interactions file: " + path.string());

  out.rows.reserve(latest.size());
  for (const auto& [key, val] : latest)
    out.rows.push_back({key.first, key.second, val.first});
  out.index();
  return out;
}

LooSplit leave_one_out(const InteractionSet& data) {
  LooSplit split;
  split.holdout.assign(data.n_users(), kInvalidId);

  // Latest interaction per user; ties broken toward the later row.
  std::vector<std::pair<int64_t, size_t>> best(data.n_users(),
                                               {INT64_MIN, SIZE_MAX});
  std::vector<uint32_t> counts(data.n_users(), 0);
  for (size_t i = 0; i < data.rows.size(); ++i) {
    const auto& r = data.rows[i];
    ++counts[r.user];
    if (best[r.user].second == SIZE_MAX || r.ts >= best[r.user].first)
      best[r.user] = {r.ts, i};
  }

  for (UserId u = 0; u < data.n_users(); ++u) {
    if (counts[u] < 2) {
      ++split.skipped;
      continue;
    }
    split.holdout[u] = data.rows[best[u].second].item;
  }

  split.train.reserve(data.rows.size());
  for (size_t i = 0; i < data.rows.size(); ++i) {
    const auto& r = data.rows[i];
    if (split.holdout[r.user] != kInvalidId && best[r.user].second == i)
      continue;  // held out
    split.train.push_back(r);
  }

  split.train_by_user.assign(data.n_users(), {});
  for (const auto& r : split.train) split.train_by_user[r.user].push_back(r.item);
  for (auto& items : split.train_by_user) std::sort(items.begin(), items.end());
  return split;
}

uint64_t interactions_fingerprint(const InteractionSet& data) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const auto& r : data.rows) {
    h = fnv1a(&r.user, sizeof(r.user), h);
    h = fnv1a(&r.item, sizeof(r.item), h);
    h = fnv1a(&r.ts, sizeof(r.ts), h);
  }
  for (const auto& n : data.user_names) h = fnv1a(n, h);
  for (const auto& n : data.item_names) h = fnv1a(n, h);
  return h;
}

}  // namespace pkgm
