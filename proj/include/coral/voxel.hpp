#pragma once

#include <cstdint>
#include <functional>

namespace coral {

struct VoxelCoord {
  std::int64_t x = 0, y = 0, z = 0;
  bool operator==(const VoxelCoord&) const = default;
};

struct VoxelCoordHash {
  std::size_t operator()(const VoxelCoord& c) const {
    std::size_t h = std::hash<std::int64_t>{}(c.x);
    h ^= std::hash<std::int64_t>{}(c.y) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= std::hash<std::int64_t>{}(c.z) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    return h;
  }
};

}  // namespace coral
