#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pkgm/common.hpp"

namespace pkgm {

// Implicit-feedback positives with dense user/item ids. Duplicate
// (user, item) pairs collapse to the latest timestamp.
struct InteractionSet {
  struct Row {
    UserId user;
    ItemId item;
    int64_t ts;
  };

  std::vector<std::string> user_names;
  std::vector<std::string> item_names;
  std::vector<Row> rows;
  std::vector<std::vector<ItemId>> by_user;  // sorted item ids per user

  size_t n_users() const { return user_names.size(); }
  size_t n_items() const { return item_names.size(); }

  // Rebuilds by_user from rows; call after manual construction.
  void index();
};

// TSV user<TAB>item<TAB>timestamp. Ids dense by first appearance.
InteractionSet load_interactions(const std::filesystem::path& path);

// Each user's latest interaction (ties: last in file order) becomes the
// held-out test item; the rest train. Users with fewer than two
// interactions have no holdout and are counted in `skipped`.
struct LooSplit {
  std::vector<InteractionSet::Row> train;
  std::vector<ItemId> holdout;                     // kInvalidId if none
  std::vector<std::vector<ItemId>> train_by_user;  // sorted
  uint32_t skipped = 0;
};

LooSplit leave_one_out(const InteractionSet& data);

uint64_t interactions_fingerprint(const InteractionSet& data);

}  // namespace pkgm
