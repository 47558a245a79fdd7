#include "pkgm/synth.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"
#include "pkgm/rng.hpp"

namespace pkgm {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

std::string pad_num(uint32_t v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

void SyntheticKgSpec::validate() const {
  if (entities == 0 || relations == 0 || categories == 0 || profiles == 0)
    throw SpecError("all counts must be positive");
  if (relations_per_category > relations)
    throw SpecError("more planted patterns per category (" +
                    std::to_string(relations_per_category) +
                    ") than relations (" + std::to_string(relations) + ")");
  if (n_values() >= entities)
    throw SpecError("entity budget too small: " + std::to_string(n_values()) +
                    " value entities needed, only " + std::to_string(entities) +
                    " entities total");
  if (consistency <= 0.0 || consistency > 1.0)
    throw SpecError("consistency must be in (0, 1]");
  if (holdout_fraction < 0.0 || holdout_fraction >= 1.0)
    throw SpecError("holdout_fraction must be in [0, 1)");
  if (noise_rate < 0.0 || noise_rate >= 1.0)
    throw SpecError("noise rate must be in [0, 1)");
  if (!per_relation_consistency.empty() &&
      per_relation_consistency.size() != relations)
    throw SpecError("per_relation_consistency must have one entry per relation");
}

std::string SyntheticKgSpec::to_json() const {
  nlohmann::json j;
  j["entities"] = entities;
  j["relations"] = relations;
  j["categories"] = categories;
  j["profiles"] = profiles;
  j["relations_per_category"] = relations_per_category;
  j["consistency"] = consistency;
  j["holdout_fraction"] = holdout_fraction;
  j["noise_rate"] = noise_rate;
  j["seed"] = seed;
  if (!per_relation_consistency.empty())
    j["per_relation_consistency"] = per_relation_consistency;
  return j.dump(2) + "\n";
}

SyntheticKgSpec SyntheticKgSpec::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SyntheticKgSpec s;
  s.entities = j.value("entities", s.entities);
  s.relations = j.value("relations", s.relations);
  s.categories = j.value("categories", s.categories);
  s.profiles = j.value("profiles", s.profiles);
  s.relations_per_category =
      j.value("relations_per_category", s.relations_per_category);
  s.consistency = j.value("consistency", s.consistency);
  s.holdout_fraction = j.value("holdout_fraction", s.holdout_fraction);
  s.noise_rate = j.value("noise_rate", s.noise_rate);
  s.seed = j.value("seed", s.seed);
  if (j.contains("per_relation_consistency"))
    s.per_relation_consistency =
        j["per_relation_consistency"].get<std::vector<double>>();
  s.validate();
  return s;
}

SyntheticKgSpec SyntheticKgSpec::load(const std::filesystem::path& path) {
  return from_json_text(read_file(path));
}

std::string SynthManifest::to_json() const {
  nlohmann::json j;
  j["categories"] = categories;
  j["relations"] = relations;
  j["applicable"] = applicable;
  nlohmann::json items_j = nlohmann::json::array();
  for (const auto& it : items)
    items_j.push_back({{"name", it.name},
                       {"category", it.category},
                       {"profile", it.profile}});
  j["items"] = items_j;
  nlohmann::json truth_j = nlohmann::json::array();
  for (const auto& t : truth)
    truth_j.push_back({{"head", t.head},
                       {"relation", t.relation},
                       {"tail", t.tail},
                       {"emitted", t.emitted}});
  j["truth"] = truth_j;
  j["counts"] = {{"planted_emitted", planted_emitted},
                 {"noise_triples", noise_triples},
                 {"held_out", held_out},
                 {"file_triples", file_triples}};
  return j.dump(2) + "\n";
}

SynthManifest SynthManifest::from_json_text(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  SynthManifest m;
  m.categories = j.at("categories").get<std::vector<std::string>>();
  m.relations = j.at("relations").get<std::vector<std::string>>();
  for (const auto& [k, v] : j.at("applicable").items())
    m.applicable[k] = v.get<std::vector<std::string>>();
  for (const auto& it : j.at("items"))
    m.items.push_back({it.at("name").get<std::string>(),
                       it.at("category").get<std::string>(),
                       it.at("profile").get<uint32_t>()});
  for (const auto& t : j.at("truth"))
    m.truth.push_back({t.at("head").get<std::string>(),
                       t.at("relation").get<std::string>(),
                       t.at("tail").get<std::string>(),
                       t.at("emitted").get<bool>()});
  const auto& c = j.at("counts");
  m.planted_emitted = c.at("planted_emitted").get<size_t>();
  m.noise_triples = c.at("noise_triples").get<size_t>();
  m.held_out = c.at("held_out").get<size_t>();
  m.file_triples = c.at("file_triples").get<size_t>();
  return m;
}

SynthManifest SynthManifest::load(const std::filesystem::path& path) {
  return from_json_text(read_file(path));
}

SynthManifest gen_synthetic_kg(const SyntheticKgSpec& spec,
                               const std::filesystem::path& out_dir) {
  spec.validate();
  std::filesystem::create_directories(out_dir);

  SynthManifest m;
  Rng rng(spec.seed, /*stream=*/0x5EED);

  for (uint32_t c = 0; c < spec.categories; ++c)
    m.categories.push_back("cat_" + pad_num(c, 2));
  for (uint32_t r = 0; r < spec.relations; ++r)
    m.relations.push_back("rel_" + pad_num(r, 2));

  // Value entity per (category, relation, profile).
  auto value_name = [&](uint32_t c, uint32_t r, uint32_t g) {
    return "val_c" + pad_num(c, 2) + "_r" + pad_num(r, 2) + "_p" +
           pad_num(g, 2);
  };

  // Applicable relations per category. A shuffled deck is dealt
  // round-robin first so every relation lands in some category while
  // slots remain; leftover slots fill randomly.
  std::vector<std::vector<uint32_t>> applicable(spec.categories);
  {
    std::vector<uint32_t> deck(spec.relations);
    std::iota(deck.begin(), deck.end(), 0u);
    rng.shuffle(deck);
    size_t dealt = 0;
    for (uint32_t r : deck) {
      const uint32_t c = static_cast<uint32_t>(dealt % spec.categories);
      if (applicable[c].size() < spec.relations_per_category) {
        applicable[c].push_back(r);
        ++dealt;
      }
    }
    for (uint32_t c = 0; c < spec.categories; ++c) {
      auto& rels = applicable[c];
      while (rels.size() < spec.relations_per_category) {
        const uint32_t r = rng.bounded(spec.relations);
        if (std::find(rels.begin(), rels.end(), r) == rels.end())
          rels.push_back(r);
      }
      std::sort(rels.begin(), rels.end());
      std::vector<std::string> names;
      for (uint32_t r : rels) names.push_back(m.relations[r]);
      m.applicable[m.categories[c]] = names;
    }
  }

  // Items with category and latent profile.
  const uint32_t n_items = spec.n_items();
  for (uint32_t i = 0; i < n_items; ++i) {
    const uint32_t c = rng.bounded(spec.categories);
    const uint32_t g = rng.bounded(spec.profiles);
    m.items.push_back({"item_" + pad_num(i, 4), m.categories[c], g});
  }

  auto rel_consistency = [&](uint32_t r) {
    return spec.per_relation_consistency.empty()
               ? spec.consistency
               : spec.per_relation_consistency[r];
  };

  // Planted triples: emit, hold out, or corrupt.
  std::vector<std::string> lines;
  std::set<std::string> emitted_keys;
  auto emit = [&](const std::string& h, const std::string& r,
                  const std::string& t) {
    const std::string key = h + "\t" + r + "\t" + t;
    if (!emitted_keys.insert(key).second) return false;
    lines.push_back(key);
    return true;
  };

  for (uint32_t i = 0; i < n_items; ++i) {
    const auto& item = m.items[i];
    uint32_t c = 0;
    while (m.categories[c] != item.category) ++c;
    for (uint32_t r : applicable[c]) {
      const std::string truth_tail = value_name(c, r, item.profile);
      const bool held = rng.uniform() < spec.holdout_fraction;
      m.truth.push_back({item.name, m.relations[r], truth_tail, !held});
      if (held) {
        ++m.held_out;
        continue;
      }
      std::string tail = truth_tail;
      if (rng.uniform() >= rel_consistency(r)) {
        // Inconsistent observation: reroute to a random value of the
        // same (category, relation) pool.
        tail = value_name(c, r, rng.bounded(spec.profiles));
      }
      if (emit(item.name, m.relations[r], tail)) ++m.planted_emitted;
    }
  }

  // Uniform noise triples on top; tails stay inside the planted value
  // pools so the entity budget holds.
  const auto noise_target = static_cast<size_t>(
      spec.noise_rate * static_cast<double>(m.planted_emitted));
  size_t attempts = 0;
  while (m.noise_triples < noise_target && attempts < noise_target * 20 + 100) {
    ++attempts;
    const auto& item = m.items[rng.bounded(n_items)];
    const uint32_t c = rng.bounded(spec.categories);
    const uint32_t r =
        applicable[c][rng.bounded(spec.relations_per_category)];
    const std::string tail = value_name(c, r, rng.bounded(spec.profiles));
    if (emit(item.name, m.relations[r], tail)) ++m.noise_triples;
  }
  m.file_triples = lines.size();

  {
    std::ostringstream os;
    for (const auto& l : lines) os << l << '\n';
    write_file(out_dir / "triples.tsv", os.str());
  }
  {
    std::ostringstream os;
    for (const auto& it : m.items) os << it.name << '\t' << it.category << '\n';
    write_file(out_dir / "categories.tsv", os.str());
  }
  write_file(out_dir / "manifest.json", m.to_json());
  return m;
}

void SyntheticRecSpec::validate() const {
  if (users == 0) throw SpecError("users must be positive");
  if (min_interactions < 2)
    throw SpecError("min_interactions must be >= 2 for leave-one-out");
  if (max_interactions < min_interactions)
    throw SpecError("max_interactions must be >= min_interactions");
  if (focus < 0.0 || focus > 1.0) throw SpecError("focus must be in [0, 1]");
  if (popularity_skew < 0.0) throw SpecError("popularity skew must be >= 0");
}

void gen_interactions(const SynthManifest& manifest,
                      const SyntheticRecSpec& spec,
                      const std::filesystem::path& out_file) {
  spec.validate();
  if (manifest.items.empty()) throw SpecError("manifest has no items");

  const uint32_t n_items =
      spec.max_items == 0
          ? static_cast<uint32_t>(manifest.items.size())
          : std::min<uint32_t>(spec.max_items,
                               static_cast<uint32_t>(manifest.items.size()));

  uint32_t n_profiles = 0;
  for (uint32_t i = 0; i < n_items; ++i)
    n_profiles = std::max(n_profiles, manifest.items[i].profile + 1);

  std::vector<std::vector<uint32_t>> by_profile(n_profiles);
  for (uint32_t i = 0; i < n_items; ++i)
    by_profile[manifest.items[i].profile].push_back(i);
  for (const auto& pool : by_profile)
    if (pool.empty()) throw SpecError("a profile has no items");

  if (n_items < spec.max_interactions)
    throw SpecError("fewer items than interactions per user");

  // Per-pool cumulative weights; rank r inside a pool weighs
  // (r + 1)^-skew, so low ranks soak up most interactions when skew > 0.
  std::vector<std::vector<double>> pool_cdf(n_profiles);
  for (uint32_t g = 0; g < n_profiles; ++g) {
    double acc = 0.0;
    for (size_t r = 0; r < by_profile[g].size(); ++r) {
      acc += std::pow(static_cast<double>(r + 1), -spec.popularity_skew);
      pool_cdf[g].push_back(acc);
    }
  }
  auto draw_from_pool = [&](uint32_t g, Rng& rng) {
    const auto& cdf = pool_cdf[g];
    const double x = rng.uniform() * cdf.back();
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), x);
    const size_t r = std::min<size_t>(it - cdf.begin(), cdf.size() - 1);
    return by_profile[g][r];
  };

  Rng rng(spec.seed, /*stream=*/0x12EC);
  std::ostringstream os;
  for (uint32_t u = 0; u < spec.users; ++u) {
    const uint32_t fav = rng.bounded(n_profiles);
    const uint32_t n_u =
        spec.min_interactions +
        rng.bounded(spec.max_interactions - spec.min_interactions + 1);
    std::set<uint32_t> chosen;
    int64_t ts = 0;
    while (chosen.size() < n_u) {
      const bool focused = rng.uniform() < spec.focus;
      const uint32_t g = focused ? fav : rng.bounded(n_profiles);
      const uint32_t item = draw_from_pool(g, rng);
      if (!chosen.insert(item).second) continue;
      os << "user_" << pad_num(u, 4) << '\t' << manifest.items[item].name
         << '\t' << ts++ << '\n';
    }
  }
  write_file(out_file, os.str());
}

}  // namespace pkgm
