#pragma once

#include <filesystem>
#include <iosfwd>

#include "pkgm/triple_store.hpp"
#include "pkgm/vocab.hpp"

namespace pkgm {

enum class TripleFormat { tsv };

// Vocabulary + store travel together: filtering re-compacts both.
struct Kg {
  Vocab vocab;
  TripleStore store;
};

// Parse a triple file (head<TAB>relation<TAB>tail, UTF-8 bytes) into a
// deduplicated store with dense ids assigned by first appearance.
// Throws ParseError (with line number) on malformed lines and
// EmptyInputError when the file holds no triples.
Kg ingest(const std::filesystem::path& path,
          TripleFormat format = TripleFormat::tsv);

// Sidecar TSV entity<TAB>category. Flags listed entities as items and
// assigns their category. Returns the number of lines whose entity is
// absent from the vocabulary (skipped).
size_t load_categories(Kg& kg, const std::filesystem::path& path);

// Drop all triples whose relation occurs fewer than min_count times,
// then re-compact both vocabularies (ids keep their relative order).
// Idempotent for a fixed min_count.
Kg filter_rare_relations(const Kg& kg, uint64_t min_count);

// Rank relations per category by the number of in-category items with at
// least one triple using the relation; keep the top k (ties by ascending
// relation id). Throws ConfigError naming the first item without a
// category.
KeyRelationMap select_key_relations(const TripleStore& store,
                                    const Vocab& vocab, uint32_t k);

// Prepared-directory layout: vocab.tsv, triples.bin (little-endian u32
// triplets), key_relations.tsv.
void save_kg(const Kg& kg, const KeyRelationMap* key_map,
             const std::filesystem::path& dir);
Kg load_kg(const std::filesystem::path& dir);
KeyRelationMap load_key_relations(const std::filesystem::path& dir,
                                  const Vocab& vocab);

// Fingerprint over triple bytes and vocabulary names; used in reports.
uint64_t kg_fingerprint(const Kg& kg);

}  // namespace pkgm
