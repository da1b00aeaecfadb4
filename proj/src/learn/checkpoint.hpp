#pragma once

#include <iosfwd>
#include <string>

#include "learn/mlp.hpp"

namespace ssilkc::learn {

/// Binary network checkpoint:
///   "SSILKC01" | version u8 | layer count u32 | per layer (in u32, out u32, activation u8)
///   | per layer: weights (row-major f32) then bias (f32), all little-endian.
inline constexpr char kCheckpointMagic[8] = {'S', 'S', 'I', 'L', 'K', 'C', '0', '1'};
inline constexpr std::uint8_t kCheckpointVersion = 1;

void write_checkpoint(std::ostream& out, const MLP& net);
MLP read_checkpoint(std::istream& in);

void save_checkpoint(const std::string& path, const MLP& net);
MLP load_checkpoint(const std::string& path);

}  // namespace ssilkc::learn
