#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace ird {

enum class Terrain : std::uint8_t { Dirt = 0, Grass = 1, Target = 2, Lava = 3 };

inline constexpr int kNumTerrains = 4;

inline constexpr std::array<Terrain, kNumTerrains> kTerrainOrder = {
    Terrain::Dirt, Terrain::Grass, Terrain::Target, Terrain::Lava};

inline constexpr int terrain_index(Terrain t) { return static_cast<int>(t); }

char terrain_char(Terrain t);
const char* terrain_name(Terrain t);

// Rectangular grid of terrain labels, row-major (row 0 is the first map line).
struct TerrainLayout {
  int width = 0;
  int height = 0;
  std::vector<Terrain> cells;

  int num_cells() const { return width * height; }
  Terrain at(int x, int y) const { return cells[y * width + x]; }
  Terrain& at(int x, int y) { return cells[y * width + x]; }
  Terrain at_state(int s) const { return cells[s]; }
  int count(Terrain t) const;
};

// Text map format: one row per line, characters D/G/T/L, '#' comment lines
// and blank lines ignored. Throws std::invalid_argument on ragged or empty
// grids and unknown characters.
TerrainLayout parse_layout(std::string_view text);
TerrainLayout load_layout_file(const std::string& path);
std::string format_layout(const TerrainLayout& layout);

}  // namespace ird
