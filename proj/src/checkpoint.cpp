#include "pkgm/checkpoint.hpp"

#include <fstream>

namespace pkgm {

namespace {

constexpr uint32_t kMagic = 0x4D474B50;  // "PKGM"
constexpr uint32_t kVersion = 1;

struct Header {
  uint32_t magic;
  uint32_t version;
  uint32_t dim;
  uint32_t n_entities;
  uint32_t n_relations;
  uint32_t reserved;
  uint64_t config_hash;
};
static_assert(sizeof(Header) == 32);

}  // namespace

void save_checkpoint(const ModelParams& params, uint64_t config_hash,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string());

  const Header h{kMagic, kVersion, params.dim, params.n_entities,
                 params.n_relations, 0, config_hash};
  out.write(reinterpret_cast<const char*>(&h), sizeof(h));
  auto dump = [&out](const std::vector<double>& v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
  };
  dump(params.entity_emb);
  dump(params.relation_emb);
  dump(params.relation_mat);
  if (!out) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary | std::ios::ate);
  if (!in) throw CheckpointError("cannot open " + path.string());
  const auto file_size = static_cast<uint64_t>(in.tellg());
  in.seekg(0);

  Header h{};
  if (file_size < sizeof(h))
    throw CheckpointError("truncated checkpoint: " + path.string());
  in.read(reinterpret_cast<char*>(&h), sizeof(h));
  if (h.magic != kMagic)
    throw CheckpointError("bad magic in " + path.string());
  if (h.version != kVersion)
    throw CheckpointError("unsupported checkpoint version " +
                          std::to_string(h.version));

  Checkpoint ckpt;
  ckpt.config_hash = h.config_hash;
  ModelParams& p = ckpt.params;
  p.dim = h.dim;
  p.n_entities = h.n_entities;
  p.n_relations = h.n_relations;

  const uint64_t ne = static_cast<uint64_t>(h.n_entities) * h.dim;
  const uint64_t nr = static_cast<uint64_t>(h.n_relations) * h.dim;
  const uint64_t nm = static_cast<uint64_t>(h.n_relations) * h.dim * h.dim;
  const uint64_t expected = sizeof(h) + (ne + nr + nm) * sizeof(double);
  if (file_size != expected)
    throw CheckpointError("checkpoint size mismatch in " + path.string() +
                          ": got " + std::to_string(file_size) + ", expected " +
                          std::to_string(expected));

  auto slurp = [&in, &path](std::vector<double>& v, uint64_t n) {
    v.resize(n);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) throw CheckpointError("read failed: " + path.string());
  };
  slurp(p.entity_emb, ne);
  slurp(p.relation_emb, nr);
  slurp(p.relation_mat, nm);
  return ckpt;
}

void require_shape(const ModelParams& params, uint32_t dim,
                   uint32_t n_entities, uint32_t n_relations) {
  if (params.dim != dim || params.n_entities != n_entities ||
      params.n_relations != n_relations)
    throw CheckpointError(
        "checkpoint shape mismatch: have dim=" + std::to_string(params.dim) +
        " |E|=" + std::to_string(params.n_entities) +
        " |R|=" + std::to_string(params.n_relations) + ", expected dim=" +
        std::to_string(dim) + " |E|=" + std::to_string(n_entities) +
        " |R|=" + std::to_string(n_relations));
}

}  // namespace pkgm
