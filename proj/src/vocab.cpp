#include "pkgm/vocab.hpp"

namespace pkgm {

EntityId Vocab::add_entity(const std::string& name) {
  auto it = entity_ids_.find(name);
  if (it != entity_ids_.end()) return it->second;
  const auto id = static_cast<EntityId>(entity_names_.size());
  entity_names_.push_back(name);
  entity_ids_.emplace(name, id);
  item_flags_.push_back(0);
  categories_.push_back(kInvalidId);
  return id;
}

RelationId Vocab::add_relation(const std::string& name) {
  auto it = relation_ids_.find(name);
  if (it != relation_ids_.end()) return it->second;
  const auto id = static_cast<RelationId>(relation_names_.size());
  relation_names_.push_back(name);
  relation_ids_.emplace(name, id);
  return id;
}

CategoryId Vocab::add_category(const std::string& name) {
  auto it = category_ids_.find(name);
  if (it != category_ids_.end()) return it->second;
  const auto id = static_cast<CategoryId>(category_names_.size());
  category_names_.push_back(name);
  category_ids_.emplace(name, id);
  return id;
}

std::optional<EntityId> Vocab::find_entity(std::string_view name) const {
  auto it = entity_ids_.find(std::string(name));
  if (it == entity_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<RelationId> Vocab::find_relation(std::string_view name) const {
  auto it = relation_ids_.find(std::string(name));
  if (it == relation_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<CategoryId> Vocab::find_category(std::string_view name) const {
  auto it = category_ids_.find(std::string(name));
  if (it == category_ids_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocab::entity_name(EntityId e) const {
  check_entity(e);
  return entity_names_[e];
}

const std::string& Vocab::relation_name(RelationId r) const {
  if (r >= relation_names_.size())
    throw IndexError("relation id out of range: " + std::to_string(r));
  return relation_names_[r];
}

const std::string& Vocab::category_name(CategoryId c) const {
  if (c >= category_names_.size())
    throw IndexError("category id out of range: " + std::to_string(c));
  return category_names_[c];
}

void Vocab::mark_item(EntityId e, CategoryId c) {
  check_entity(e);
  if (c >= category_names_.size())
    throw IndexError("category id out of range: " + std::to_string(c));
  item_flags_[e] = 1;
  categories_[e] = c;
}

void Vocab::mark_item(EntityId e) {
  check_entity(e);
  item_flags_[e] = 1;
}

bool Vocab::is_item(EntityId e) const {
  check_entity(e);
  return item_flags_[e] != 0;
}

std::optional<CategoryId> Vocab::category_of(EntityId e) const {
  check_entity(e);
  if (categories_[e] == kInvalidId) return std::nullopt;
  return categories_[e];
}

bool Vocab::operator==(const Vocab& other) const {
  return entity_names_ == other.entity_names_ &&
         relation_names_ == other.relation_names_ &&
         category_names_ == other.category_names_ &&
         item_flags_ == other.item_flags_ && categories_ == other.categories_;
}

void Vocab::check_entity(EntityId e) const {
  if (e >= entity_names_.size())
    throw IndexError("entity id out of range: " + std::to_string(e));
}

}  // namespace pkgm
