#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include <json.hpp>

namespace jobprp {

using ProductId = std::int64_t;

// Rectangular multi-block layout. Aisles run north-south and are numbered
// west to east from 1; cross-aisles run east-west and are numbered north to
// south from 1. Lengths are in metres.
struct LayoutConfig {
  int num_aisles = 8;
  int num_cross_aisles = 3;
  int num_shelves = 3;
  int min_products = 1560;
  double aisle_width = 3.0;
  double cross_aisle_width = 3.0;
  double rack_depth = 1.0;
  double slot_width = 1.0;
  double origin_offset = 4.0;

  friend bool operator==(const LayoutConfig&, const LayoutConfig&) = default;
};

// Throws InvalidInput when the config breaks a layout invariant.
void validate(const LayoutConfig& config);

// Smallest slot count per shelf that holds min_products.
int slots_per_shelf(const LayoutConfig& config);

struct Product {
  ProductId id = 0;
  // Category path, most general level first.
  std::array<int, 4> category{};
};

enum class Side { West, East };

struct SlotCoord {
  int aisle = 1;  // 1..W_A
  Side side = Side::West;
  int shelf = 1;  // 1 = top
  int slot = 1;   // 1..slots_per_shelf, north to south

  friend auto operator<=>(const SlotCoord&, const SlotCoord&) = default;
};

struct WarehouseLayout {
  LayoutConfig config;
  int slots_per_shelf = 0;
  int capacity = 0;
  // subaisle_slot_counts[a-1][c-1]: slot columns between cross-aisles c and c+1.
  std::vector<std::vector<int>> subaisle_slot_counts;
  std::map<ProductId, SlotCoord> placement;

  int empty_slots() const { return capacity - static_cast<int>(placement.size()); }
  // Subaisle index c (1-based) holding slot column `slot`.
  int subaisle_of_slot(int aisle, int slot) const;

  friend bool operator==(const WarehouseLayout&, const WarehouseLayout&) = default;
};

// Sizes the shelves, splits aisles into subaisles and places the catalog in
// category order, aisle by aisle, west side then east side, slot columns
// north to south, shelves top to bottom within a column.
WarehouseLayout build_layout(const LayoutConfig& config, std::span<const Product> catalog);

int subaisle_count(const WarehouseLayout& layout);

// Random 4-level category tree over `count` products with ids 1..count.
std::vector<Product> synth_catalog(int count, std::uint64_t seed);

void to_json(nlohmann::json& j, const LayoutConfig& c);
void from_json(const nlohmann::json& j, LayoutConfig& c);
void to_json(nlohmann::json& j, const WarehouseLayout& layout);
void from_json(const nlohmann::json& j, WarehouseLayout& layout);

}  // namespace jobprp
