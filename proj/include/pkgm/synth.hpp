#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pkgm/common.hpp"

namespace pkgm {

// Synthetic KG with planted structure: every item carries a latent
// profile; for each relation applicable to the item's category the
// ground-truth tail is the value entity keyed by (category, relation,
// profile). Items sharing a profile share all their tails, so held-out
// pairs stay inferable from the emitted ones.
struct SyntheticKgSpec {
  uint32_t entities = 500;
  uint32_t relations = 12;
  uint32_t categories = 4;
  uint32_t profiles = 4;
  uint32_t relations_per_category = 6;
  double consistency = 0.95;       // per-relation planted fidelity
  double holdout_fraction = 0.1;   // plantable pairs withheld from the file
  double noise_rate = 0.05;        // extra random triples, fraction of emitted
  uint64_t seed = 1;
  std::vector<double> per_relation_consistency;  // optional override

  void validate() const;
  uint32_t n_values() const {
    return categories * relations_per_category * profiles;
  }
  uint32_t n_items() const { return entities - n_values(); }

  std::string to_json() const;
  static SyntheticKgSpec from_json_text(const std::string& text);
  static SyntheticKgSpec load(const std::filesystem::path& path);
};

struct SynthManifest {
  struct Item {
    std::string name;
    std::string category;
    uint32_t profile;
  };
  struct TruthEntry {
    std::string head;
    std::string relation;
    std::string tail;
    bool emitted;
  };

  std::vector<std::string> categories;
  std::vector<std::string> relations;
  std::map<std::string, std::vector<std::string>> applicable;
  std::vector<Item> items;
  std::vector<TruthEntry> truth;
  size_t planted_emitted = 0;
  size_t noise_triples = 0;
  size_t held_out = 0;
  size_t file_triples = 0;

  std::string to_json() const;
  static SynthManifest from_json_text(const std::string& text);
  static SynthManifest load(const std::filesystem::path& path);
};

// Writes triples.tsv, categories.tsv and manifest.json into out_dir.
// Bytewise deterministic for a fixed spec.
SynthManifest gen_synthetic_kg(const SyntheticKgSpec& spec,
                               const std::filesystem::path& out_dir);

// Implicit-feedback interactions driven by the planted profiles: each
// user favors one profile and draws `focus` of their interactions from
// it. Timestamps follow draw order, so the leave-one-out holdout is the
// last draw.
struct SyntheticRecSpec {
  uint32_t users = 300;
  uint32_t min_interactions = 10;
  uint32_t max_interactions = 15;
  double focus = 0.8;
  uint64_t seed = 1;
  uint32_t max_items = 0;       // 0 = use every manifest item
  double popularity_skew = 0.0; // item weight within a pool ~ (rank+1)^-skew

  void validate() const;
};

void gen_interactions(const SynthManifest& manifest,
                      const SyntheticRecSpec& spec,
                      const std::filesystem::path& out_file);

}  // namespace pkgm
