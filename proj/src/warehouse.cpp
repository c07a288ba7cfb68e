#include "jobprp/warehouse.hpp"

#include <algorithm>
#include <random>
#include <string>

#include "jobprp/error.hpp"

namespace jobprp {

void validate(const LayoutConfig& c) {
  if (c.num_aisles < 1) throw InvalidInput("num_aisles must be positive");
  if (c.num_cross_aisles < 2) {
    throw InvalidInput("num_cross_aisles must be at least 2 (top and bottom cross-aisle)");
  }
  if (c.num_shelves < 1) throw InvalidInput("num_shelves must be positive");
  if (c.min_products < 1) throw InvalidInput("min_products must be positive");
  if (!(c.aisle_width > 0) || !(c.cross_aisle_width > 0) || !(c.rack_depth > 0) ||
      !(c.slot_width > 0)) {
    throw InvalidInput("layout lengths must be strictly positive");
  }
  if (!(c.origin_offset >= 0)) throw InvalidInput("origin_offset must be non-negative");
}

int slots_per_shelf(const LayoutConfig& c) {
  const int per_column = 2 * c.num_aisles * c.num_shelves;
  return (c.min_products + per_column - 1) / per_column;
}

int WarehouseLayout::subaisle_of_slot(int aisle, int slot) const {
  if (aisle < 1 || aisle > static_cast<int>(subaisle_slot_counts.size()) || slot < 1) {
    throw InvalidInput("slot " + std::to_string(slot) + " outside aisle " + std::to_string(aisle));
  }
  const auto& counts = subaisle_slot_counts[static_cast<std::size_t>(aisle - 1)];
  int upper = 0;
  for (std::size_t c = 0; c < counts.size(); ++c) {
    upper += counts[c];
    if (slot <= upper) return static_cast<int>(c) + 1;
  }
  throw InvalidInput("slot " + std::to_string(slot) + " outside aisle " + std::to_string(aisle));
}

WarehouseLayout build_layout(const LayoutConfig& config, std::span<const Product> catalog) {
  validate(config);
  if (catalog.empty()) throw InvalidInput("catalog is empty");

  WarehouseLayout layout;
  layout.config = config;
  layout.slots_per_shelf = slots_per_shelf(config);
  layout.capacity = 2 * config.num_aisles * config.num_shelves * layout.slots_per_shelf;
  if (static_cast<int>(catalog.size()) > layout.capacity) {
    throw InvalidInput("catalog of " + std::to_string(catalog.size()) +
                       " products exceeds layout capacity " + std::to_string(layout.capacity));
  }

  // Larger subaisles go nearer the top when the split is uneven.
  const int blocks = config.num_cross_aisles - 1;
  std::vector<int> split(static_cast<std::size_t>(blocks), layout.slots_per_shelf / blocks);
  for (int c = 0; c < layout.slots_per_shelf % blocks; ++c) ++split[static_cast<std::size_t>(c)];
  layout.subaisle_slot_counts.assign(static_cast<std::size_t>(config.num_aisles), split);

  std::vector<Product> sorted(catalog.begin(), catalog.end());
  std::sort(sorted.begin(), sorted.end(), [](const Product& a, const Product& b) {
    if (a.category != b.category) return a.category < b.category;
    return a.id < b.id;
  });

  std::size_t next = 0;
  for (int a = 1; a <= config.num_aisles && next < sorted.size(); ++a) {
    for (Side side : {Side::West, Side::East}) {
      for (int slot = 1; slot <= layout.slots_per_shelf && next < sorted.size(); ++slot) {
        for (int shelf = 1; shelf <= config.num_shelves && next < sorted.size(); ++shelf) {
          const auto [it, inserted] =
              layout.placement.emplace(sorted[next].id, SlotCoord{a, side, shelf, slot});
          if (!inserted) {
            throw InvalidInput("duplicate product id " + std::to_string(sorted[next].id));
          }
          ++next;
        }
      }
    }
  }
  return layout;
}

int subaisle_count(const WarehouseLayout& layout) {
  return layout.config.num_aisles * (layout.config.num_cross_aisles - 1);
}

std::vector<Product> synth_catalog(int count, std::uint64_t seed) {
  if (count < 1) throw InvalidInput("catalog size must be positive");
  std::mt19937_64 rng(seed);
  // Branching factors roughly shaped like a grocery hierarchy
  // (department > category > subcategory > class).
  std::uniform_int_distribution<int> level1(1, 6), level2(1, 8), level3(1, 10), level4(1, 12);
  std::vector<Product> products;
  products.reserve(static_cast<std::size_t>(count));
  for (int i = 1; i <= count; ++i) {
    products.push_back(Product{i, {level1(rng), level2(rng), level3(rng), level4(rng)}});
  }
  return products;
}

void to_json(nlohmann::json& j, const LayoutConfig& c) {
  j = nlohmann::json{{"num_aisles", c.num_aisles},
                     {"num_cross_aisles", c.num_cross_aisles},
                     {"num_shelves", c.num_shelves},
                     {"min_products", c.min_products},
                     {"aisle_width", c.aisle_width},
                     {"cross_aisle_width", c.cross_aisle_width},
                     {"rack_depth", c.rack_depth},
                     {"slot_width", c.slot_width},
                     {"origin_offset", c.origin_offset}};
}

void from_json(const nlohmann::json& j, LayoutConfig& c) {
  j.at("num_aisles").get_to(c.num_aisles);
  j.at("num_cross_aisles").get_to(c.num_cross_aisles);
  j.at("num_shelves").get_to(c.num_shelves);
  j.at("min_products").get_to(c.min_products);
  j.at("aisle_width").get_to(c.aisle_width);
  j.at("cross_aisle_width").get_to(c.cross_aisle_width);
  j.at("rack_depth").get_to(c.rack_depth);
  j.at("slot_width").get_to(c.slot_width);
  j.at("origin_offset").get_to(c.origin_offset);
  validate(c);
}

void to_json(nlohmann::json& j, const WarehouseLayout& layout) {
  nlohmann::json placement = nlohmann::json::array();
  for (const auto& [product, coord] : layout.placement) {
    placement.push_back({{"product", product},
                         {"aisle", coord.aisle},
                         {"side", coord.side == Side::West ? "west" : "east"},
                         {"shelf", coord.shelf},
                         {"slot", coord.slot}});
  }
  j = nlohmann::json{{"config", layout.config},
                     {"slots_per_shelf", layout.slots_per_shelf},
                     {"capacity", layout.capacity},
                     {"subaisle_slot_counts", layout.subaisle_slot_counts},
                     {"placement", std::move(placement)}};
}

void from_json(const nlohmann::json& j, WarehouseLayout& layout) {
  j.at("config").get_to(layout.config);
  j.at("slots_per_shelf").get_to(layout.slots_per_shelf);
  j.at("capacity").get_to(layout.capacity);
  j.at("subaisle_slot_counts").get_to(layout.subaisle_slot_counts);
  const auto& cfg = layout.config;
  if (layout.capacity != 2 * cfg.num_aisles * cfg.num_shelves * layout.slots_per_shelf) {
    throw InvalidInput("layout capacity does not match its dimensions");
  }
  if (static_cast<int>(layout.subaisle_slot_counts.size()) != cfg.num_aisles) {
    throw InvalidInput("subaisle_slot_counts must have one entry per aisle");
  }
  for (const auto& counts : layout.subaisle_slot_counts) {
    int total = 0;
    for (int n : counts) total += n;
    if (static_cast<int>(counts.size()) != cfg.num_cross_aisles - 1 ||
        total != layout.slots_per_shelf) {
      throw InvalidInput("subaisle_slot_counts inconsistent with slots_per_shelf");
    }
  }
  layout.placement.clear();
  std::map<SlotCoord, ProductId> occupied;
  for (const auto& p : j.at("placement")) {
    SlotCoord coord{p.at("aisle").get<int>(),
                    p.at("side").get<std::string>() == "west" ? Side::West : Side::East,
                    p.at("shelf").get<int>(), p.at("slot").get<int>()};
    const auto id = p.at("product").get<ProductId>();
    if (coord.aisle < 1 || coord.aisle > cfg.num_aisles || coord.shelf < 1 ||
        coord.shelf > cfg.num_shelves || coord.slot < 1 || coord.slot > layout.slots_per_shelf) {
      throw InvalidInput("placement of product " + std::to_string(id) + " is outside the layout");
    }
    if (!occupied.emplace(coord, id).second || !layout.placement.emplace(id, coord).second) {
      throw InvalidInput("placement is not injective at product " + std::to_string(id));
    }
  }
}

}  // namespace jobprp
