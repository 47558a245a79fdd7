#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pkgm/common.hpp"

namespace pkgm {

// Dense string <-> id tables for entities, relations and item categories.
// Ids are assigned by first appearance and stay stable for a run. Entities
// flagged as items carry a category; the flag without a category is legal
// to construct but rejected by key-relation selection.
class Vocab {
 public:
  EntityId add_entity(const std::string& name);
  RelationId add_relation(const std::string& name);
  CategoryId add_category(const std::string& name);

  std::optional<EntityId> find_entity(std::string_view name) const;
  std::optional<RelationId> find_relation(std::string_view name) const;
  std::optional<CategoryId> find_category(std::string_view name) const;

  const std::string& entity_name(EntityId e) const;
  const std::string& relation_name(RelationId r) const;
  const std::string& category_name(CategoryId c) const;

  size_t n_entities() const { return entity_names_.size(); }
  size_t n_relations() const { return relation_names_.size(); }
  size_t n_categories() const { return category_names_.size(); }

  void mark_item(EntityId e, CategoryId c);
  void mark_item(EntityId e);  // flag only, no category
  bool is_item(EntityId e) const;
  std::optional<CategoryId> category_of(EntityId e) const;

  bool operator==(const Vocab& other) const;

 private:
  void check_entity(EntityId e) const;

  std::vector<std::string> entity_names_;
  std::vector<std::string> relation_names_;
  std::vector<std::string> category_names_;
  std::unordered_map<std::string, uint32_t> entity_ids_;
  std::unordered_map<std::string, uint32_t> relation_ids_;
  std::unordered_map<std::string, uint32_t> category_ids_;
  std::vector<uint8_t> item_flags_;
  std::vector<uint32_t> categories_;  // kInvalidId when unset
};

}  // namespace pkgm
