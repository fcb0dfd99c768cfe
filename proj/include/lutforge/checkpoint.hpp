#pragma once

#include <filesystem>
#include <optional>

#include "lutforge/adam.hpp"
#include "lutforge/model.hpp"

namespace lutforge {

// Binary checkpoint: 24-byte header (magic "IALUT3D\0", version, M, N,
// flags) followed by little-endian float32 parameters in serialization
// order. Flags: bit 0 = predictor present, bit 1 = Adam state appended.
inline constexpr char kCheckpointMagic[8] = {'I', 'A', 'L', 'U', 'T', '3', 'D', '\0'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

void write_checkpoint(const AdaptiveModel& model, const std::filesystem::path& path,
                      const AdamState* adam = nullptr);

struct LoadedCheckpoint {
    AdaptiveModel model;
    std::optional<AdamState> adam;
};

LoadedCheckpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace lutforge
