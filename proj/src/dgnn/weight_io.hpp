#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dgnn/types.hpp"

namespace dgnn {

// Binary layout, all integers little-endian u32:
//   "DGNW" version count
//   count x { name_len name[name_len] rank dims[rank] f32 payload }
inline constexpr std::uint32_t kWeightFileVersion = 1;
inline constexpr std::uint32_t kMaxTensorRank = 8;

std::vector<std::uint8_t> serialize_weights(const WeightSet& w);

/// Strict parse: any malformed input raises a typed Error (BadMagic,
/// VersionMismatch, TruncatedFile, ShapeOverflow, TrailingData,
/// DuplicateTensor, NonFiniteValue).
WeightSet deserialize_weights(std::span<const std::uint8_t> bytes);

void save_weights(const WeightSet& w, const std::string& path);
WeightSet load_weights(const std::string& path);

} // namespace dgnn
