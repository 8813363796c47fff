#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "frontlab/evolve.hpp"

namespace frontlab {

/// Binary checkpoint layout (all integers and floats little-endian):
///
///   magic        8 bytes  "FLCKPT\0\0"
///   version      u8       kCheckpointVersion
///   kind         u8       FieldKind
///   n1, n2       u32, u32
///   t            f64
///   step_count   i64
///   u_sup_int    f64
///   config_len   u32, followed by config_len bytes of run-config text
///   samples      n1·n2 f64, row-major (x2 fastest)
inline constexpr std::uint8_t kCheckpointVersion = 1;

struct Checkpoint {
  evolve::SimulationState state;
  std::string config_text;
};

std::vector<std::uint8_t> encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace frontlab
