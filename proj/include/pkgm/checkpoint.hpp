#pragma once

#include <filesystem>

#include "pkgm/model.hpp"

namespace pkgm {

struct Checkpoint {
  ModelParams params;
  uint64_t config_hash = 0;
};

// Little-endian binary: magic, version, dim, |E|, |R|, config hash,
// then entity / relation / matrix tables row-major. Round-trips bitwise.
void save_checkpoint(const ModelParams& params, uint64_t config_hash,
                     const std::filesystem::path& path);

// Throws CheckpointError on bad magic, version or truncated payload.
Checkpoint load_checkpoint(const std::filesystem::path& path);

// Shape guard for consumers that were configured for specific sizes.
void require_shape(const ModelParams& params, uint32_t dim,
                   uint32_t n_entities, uint32_t n_relations);

}  // namespace pkgm
