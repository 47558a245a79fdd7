#include "pkgm/kg_io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "pkgm/tsv.hpp"

namespace pkgm {

namespace fs = std::filesystem;

Kg ingest(const fs::path& path, TripleFormat format) {
  if (format != TripleFormat::tsv)
    throw ConfigError("unknown triple file format");
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());

  Kg kg;
  std::vector<Triple> raw;
  for_each_tsv_line(path, [&](size_t lineno,
                              const std::vector<std::string_view>& f) {
    if (f.size() != 3 || f[0].empty() || f[1].empty() || f[2].empty())
      throw ParseError(path.string() + ":" + std::to_string(lineno) +
                       ": expected head<TAB>relation<TAB>tail");
    const EntityId h = kg.vocab.add_entity(std::string(f[0]));
    const RelationId r = kg.vocab.add_relation(std::string(f[1]));
    const EntityId t = kg.vocab.add_entity(std::string(f[2]));
    raw.push_back({h, r, t});
  });
  if (raw.empty()) throw EmptyInputError("empty triple file: " + path.string());

  kg.store = TripleStore::build(std::move(raw),
                                static_cast<uint32_t>(kg.vocab.n_entities()),
                                static_cast<uint32_t>(kg.vocab.n_relations()));
  return kg;
}

size_t load_categories(Kg& kg, const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no such file: " + path.string());
  size_t unknown = 0;
  for_each_tsv_line(
      path, [&](size_t lineno, const std::vector<std::string_view>& f) {
        if (f.size() != 2 || f[0].empty() || f[1].empty())
          throw ParseError(path.string() + ":" + std::to_string(lineno) +
                           ": expected entity<TAB>category");
        const auto e = kg.vocab.find_entity(f[0]);
        if (!e) {
          ++unknown;
          return;
        }
        const CategoryId c = kg.vocab.add_category(std::string(f[1]));
        kg.vocab.mark_item(*e, c);
      });
  return unknown;
}

Kg filter_rare_relations(const Kg& kg, uint64_t min_count) {
  if (min_count < 1) throw ConfigError("min_count must be >= 1");

  std::vector<Triple> kept;
  kept.reserve(kg.store.size());
  for (const Triple& t : kg.store.triples())
    if (kg.store.relation_count(t.rel) >= min_count) kept.push_back(t);

  if (kept.empty())
    std::cerr << "warning: all relations below min_count " << min_count
              << "; store is empty\n";

  // Re-compact ids preserving relative order of first appearance.
  Kg out;
  std::vector<uint32_t> ent_map(kg.vocab.n_entities(), kInvalidId);
  std::vector<uint32_t> rel_map(kg.vocab.n_relations(), kInvalidId);
  std::vector<Triple> remapped;
  remapped.reserve(kept.size());
  for (const Triple& t : kept) {
    if (ent_map[t.head] == kInvalidId)
      ent_map[t.head] = out.vocab.add_entity(kg.vocab.entity_name(t.head));
    if (rel_map[t.rel] == kInvalidId)
      rel_map[t.rel] = out.vocab.add_relation(kg.vocab.relation_name(t.rel));
    if (ent_map[t.tail] == kInvalidId)
      ent_map[t.tail] = out.vocab.add_entity(kg.vocab.entity_name(t.tail));
    remapped.push_back({ent_map[t.head], rel_map[t.rel], ent_map[t.tail]});
  }

  for (EntityId e = 0; e < kg.vocab.n_entities(); ++e) {
    if (ent_map[e] == kInvalidId) continue;
    if (!kg.vocab.is_item(e)) continue;
    if (auto c = kg.vocab.category_of(e)) {
      const CategoryId nc = out.vocab.add_category(kg.vocab.category_name(*c));
      out.vocab.mark_item(ent_map[e], nc);
    } else {
      out.vocab.mark_item(ent_map[e]);
    }
  }

  out.store = TripleStore::build(std::move(remapped),
                                 static_cast<uint32_t>(out.vocab.n_entities()),
                                 static_cast<uint32_t>(out.vocab.n_relations()));
  return out;
}

KeyRelationMap select_key_relations(const TripleStore& store,
                                    const Vocab& vocab, uint32_t k) {
  if (k < 1) throw ConfigError("k must be >= 1");

  // Count distinct in-category items per (category, relation).
  std::set<std::tuple<CategoryId, RelationId, EntityId>> seen;
  for (const Triple& t : store.triples()) {
    if (!vocab.is_item(t.head)) continue;
    const auto c = vocab.category_of(t.head);
    if (!c)
      throw ConfigError("item without category: " +
                        vocab.entity_name(t.head));
    seen.insert({*c, t.rel, t.head});
  }

  std::map<std::pair<CategoryId, RelationId>, uint64_t> usage;
  for (const auto& [c, r, item] : seen) usage[{c, r}] += 1;

  KeyRelationMap out;
  out.k = k;
  out.by_category.resize(vocab.n_categories());
  std::vector<std::vector<std::pair<uint64_t, RelationId>>> ranked(
      vocab.n_categories());
  for (const auto& [key, count] : usage)
    ranked[key.first].push_back({count, key.second});
  for (CategoryId c = 0; c < ranked.size(); ++c) {
    auto& rels = ranked[c];
    std::sort(rels.begin(), rels.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;  // frequency desc
      return a.second < b.second;                        // id asc on ties
    });
    const size_t keep = std::min<size_t>(k, rels.size());
    out.by_category[c].reserve(keep);
    for (size_t i = 0; i < keep; ++i)
      out.by_category[c].push_back(rels[i].second);
  }
  return out;
}

namespace {

void write_or_throw(std::ofstream& out, const fs::path& p) {
  if (!out) throw IoError("write failed: " + p.string());
}

}  // namespace

void save_kg(const Kg& kg, const KeyRelationMap* key_map, const fs::path& dir) {
  fs::create_directories(dir);

  {
    const fs::path p = dir / "vocab.tsv";
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open " + p.string());
    for (EntityId e = 0; e < kg.vocab.n_entities(); ++e) {
      out << "entity\t" << kg.vocab.entity_name(e) << '\t'
          << (kg.vocab.is_item(e) ? "item" : "value") << '\t';
      if (auto c = kg.vocab.category_of(e))
        out << kg.vocab.category_name(*c);
      else
        out << '-';
      out << '\n';
    }
    for (RelationId r = 0; r < kg.vocab.n_relations(); ++r)
      out << "relation\t" << kg.vocab.relation_name(r) << '\n';
    for (CategoryId c = 0; c < kg.vocab.n_categories(); ++c)
      out << "category\t" << kg.vocab.category_name(c) << '\n';
    write_or_throw(out, p);
  }

  {
    const fs::path p = dir / "triples.bin";
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open " + p.string());
    for (const Triple& t : kg.store.triples()) {
      const uint32_t row[3] = {t.head, t.rel, t.tail};
      out.write(reinterpret_cast<const char*>(row), sizeof(row));
    }
    write_or_throw(out, p);
  }

  {
    const fs::path p = dir / "key_relations.tsv";
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open " + p.string());
    if (key_map) {
      out << "#k\t" << key_map->k << '\n';
      for (CategoryId c = 0; c < key_map->by_category.size(); ++c) {
        out << kg.vocab.category_name(c);
        for (RelationId r : key_map->by_category[c])
          out << '\t' << kg.vocab.relation_name(r);
        out << '\n';
      }
    }
    write_or_throw(out, p);
  }
}

Kg load_kg(const fs::path& dir) {
  Kg kg;
  const fs::path vocab_path = dir / "vocab.tsv";

  // Categories may be referenced by entity rows before their own row;
  // collect names first, then resolve.
  std::vector<std::pair<EntityId, std::string>> pending_items;
  for_each_tsv_line(
      vocab_path, [&](size_t lineno, const std::vector<std::string_view>& f) {
        if (f[0] == "entity") {
          if (f.size() != 4)
            throw ParseError(vocab_path.string() + ":" +
                             std::to_string(lineno) + ": bad entity row");
          const EntityId e = kg.vocab.add_entity(std::string(f[1]));
          if (f[2] == "item") pending_items.push_back({e, std::string(f[3])});
        } else if (f[0] == "relation") {
          if (f.size() != 2)
            throw ParseError(vocab_path.string() + ":" +
                             std::to_string(lineno) + ": bad relation row");
          kg.vocab.add_relation(std::string(f[1]));
        } else if (f[0] == "category") {
          if (f.size() != 2)
            throw ParseError(vocab_path.string() + ":" +
                             std::to_string(lineno) + ": bad category row");
          kg.vocab.add_category(std::string(f[1]));
        } else {
          throw ParseError(vocab_path.string() + ":" + std::to_string(lineno) +
                           ": unknown row kind");
        }
      });
  for (const auto& [e, cat] : pending_items) {
    if (cat == "-") {
      kg.vocab.mark_item(e);
    } else {
      const auto c = kg.vocab.find_category(cat);
      if (!c)
        throw ParseError(vocab_path.string() + ": undeclared category " + cat);
      kg.vocab.mark_item(e, *c);
    }
  }

  const fs::path bin_path = dir / "triples.bin";
  std::ifstream in(bin_path, std::ios::binary | std::ios::ate);
  if (!in) throw IoError("cannot open " + bin_path.string());
  const auto bytes = static_cast<size_t>(in.tellg());
  if (bytes % 12 != 0)
    throw ParseError(bin_path.string() + ": size not a multiple of 12");
  in.seekg(0);
  std::vector<Triple> triples(bytes / 12);
  for (auto& t : triples) {
    uint32_t row[3];
    in.read(reinterpret_cast<char*>(row), sizeof(row));
    if (!in) throw IoError("read failed: " + bin_path.string());
    t = {row[0], row[1], row[2]};
  }

  kg.store = TripleStore::build(std::move(triples),
                                static_cast<uint32_t>(kg.vocab.n_entities()),
                                static_cast<uint32_t>(kg.vocab.n_relations()));
  return kg;
}

KeyRelationMap load_key_relations(const fs::path& dir, const Vocab& vocab) {
  KeyRelationMap map;
  map.by_category.resize(vocab.n_categories());
  const fs::path p = dir / "key_relations.tsv";
  for_each_tsv_line(p, [&](size_t lineno,
                           const std::vector<std::string_view>& f) {
    if (f[0] == "#k") {
      if (f.size() != 2)
        throw ParseError(p.string() + ":" + std::to_string(lineno) +
                         ": bad #k row");
      map.k = static_cast<uint32_t>(std::stoul(std::string(f[1])));
      return;
    }
    const auto c = vocab.find_category(f[0]);
    if (!c)
      throw ParseError(p.string() + ":" + std::to_string(lineno) +
                       ": unknown category " + std::string(f[0]));
    std::vector<RelationId> rels;
    for (size_t i = 1; i < f.size(); ++i) {
      const auto r = vocab.find_relation(f[i]);
      if (!r)
        throw ParseError(p.string() + ":" + std::to_string(lineno) +
                         ": unknown relation " + std::string(f[i]));
      rels.push_back(*r);
    }
    map.by_category[*c] = std::move(rels);
  });
  return map;
}

uint64_t kg_fingerprint(const Kg& kg) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (const Triple& t : kg.store.triples()) {
    const uint32_t row[3] = {t.head, t.rel, t.tail};
    h = fnv1a(row, sizeof(row), h);
  }
  for (EntityId e = 0; e < kg.vocab.n_entities(); ++e)
    h = fnv1a(kg.vocab.entity_name(e), h);
  for (RelationId r = 0; r < kg.vocab.n_relations(); ++r)
    h = fnv1a(kg.vocab.relation_name(r), h);
  return h;
}

}  // namespace pkgm
