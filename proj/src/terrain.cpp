#include "ird/terrain.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ird {

char terrain_char(Terrain t) {
  switch (t) {
    case Terrain::Dirt:
      return 'D';
    case Terrain::Grass:
      return 'G';
    case Terrain::Target:
      return 'T';
    case Terrain::Lava:
      return 'L';
  }
  return '?';
}

const char* terrain_name(Terrain t) {
  switch (t) {
    case Terrain::Dirt:
      return "dirt";
    case Terrain::Grass:
      return "grass";
    case Terrain::Target:
      return "target";
    case Terrain::Lava:
      return "lava";
  }
  return "?";
}

int TerrainLayout::count(Terrain t) const {
  return static_cast<int>(std::count(cells.begin(), cells.end(), t));
}

namespace {

Terrain terrain_from_char(char c) {
  switch (c) {
    case 'D':
      return Terrain::Dirt;
    case 'G':
      return Terrain::Grass;
    case 'T':
      return Terrain::Target;
    case 'L':
      return Terrain::Lava;
    default:
      throw std::invalid_argument(std::string("unknown terrain character '") +
                                  c + "'");
  }
}

}  // namespace

TerrainLayout parse_layout(std::string_view text) {
  TerrainLayout layout;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (layout.width == 0) {
      layout.width = static_cast<int>(line.size());
    } else if (static_cast<int>(line.size()) != layout.width) {
      throw std::invalid_argument("layout rows have unequal length");
    }
    for (char c : line) layout.cells.push_back(terrain_from_char(c));
    ++layout.height;
  }
  if (layout.width == 0 || layout.height == 0)
    throw std::invalid_argument("layout is empty");
  return layout;
}

TerrainLayout load_layout_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open layout file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_layout(buf.str());
}

std::string format_layout(const TerrainLayout& layout) {
  std::string out;
  out.reserve(static_cast<std::size_t>(layout.num_cells()) + layout.height);
  for (int y = 0; y < layout.height; ++y) {
    for (int x = 0; x < layout.width; ++x) out += terrain_char(layout.at(x, y));
    out += '\n';
  }
  return out;
}

}  // namespace ird
