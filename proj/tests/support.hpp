#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "jobprp/instance.hpp"
#include "jobprp/warehouse.hpp"

namespace jobprp::testing {

// 3 aisles, 3 cross-aisles, 3 shelves, 104 products: 6 slots per shelf and
// two subaisles of 3 slot columns per aisle.
const WarehouseLayout& tiny_layout();

struct TinyOptions {
  int min_orders = 2;
  int max_orders = 4;
  int max_lines = 3;
  int max_required = 12;
  int max_fleet = 2;
  // When positive, the fleet is this many trolleys instead of a random draw.
  int fixed_fleet = 0;
};

// Random orders on tiny_layout() with a random fleet and trolley capacity
// that admit at least one feasible assignment.
Instance tiny_instance(std::uint64_t seed, const TinyOptions& options = {});

WarehouseLayout small_layout(int products, int aisles, int cross_aisles, int shelves,
                             std::uint64_t catalog_seed = 7);

// Product stored at the n'th position of the placement sequence (0-based),
// i.e. the n'th product in category order.
ProductId product_at_rank(const WarehouseLayout& layout, int rank);

// Single order made of the listed products.
Order make_order(std::int64_t id, std::initializer_list<ProductId> products, int quantity = 1);

// Fresh path under the system temp directory; the file does not exist.
std::filesystem::path temp_file(const std::string& stem);

}  // namespace jobprp::testing
