#include "support.hpp"

#include <random>
#include <set>

#include <unistd.h>

namespace jobprp::testing {

const WarehouseLayout& tiny_layout() {
  static const WarehouseLayout layout = [] {
    LayoutConfig cfg;
    cfg.num_aisles = 3;
    cfg.num_cross_aisles = 3;
    cfg.num_shelves = 3;
    cfg.min_products = 104;
    return build_layout(cfg, synth_catalog(104, 7));
  }();
  return layout;
}

WarehouseLayout small_layout(int products, int aisles, int cross_aisles, int shelves,
                             std::uint64_t catalog_seed) {
  LayoutConfig cfg;
  cfg.num_aisles = aisles;
  cfg.num_cross_aisles = cross_aisles;
  cfg.num_shelves = shelves;
  cfg.min_products = products;
  return build_layout(cfg, synth_catalog(products, catalog_seed));
}

ProductId product_at_rank(const WarehouseLayout& layout, int rank) {
  const int h = layout.config.num_shelves;
  const int per_side = h * layout.slots_per_shelf;
  SlotCoord want;
  want.aisle = 1 + rank / (2 * per_side);
  want.side = (rank / per_side) % 2 == 0 ? Side::West : Side::East;
  want.slot = 1 + (rank % per_side) / h;
  want.shelf = 1 + rank % h;
  for (const auto& [id, coord] : layout.placement) {
    if (coord == want) return id;
  }
  return -1;
}

std::filesystem::path temp_file(const std::string& stem) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path();
  for (;;) {
    auto p = dir / ("jobprp-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" + stem);
    if (!std::filesystem::exists(p)) return p;
  }
}

Order make_order(std::int64_t id, std::initializer_list<ProductId> products, int quantity) {
  Order o;
  o.id = id;
  for (ProductId p : products) o.lines.push_back({p, quantity});
  o.items = quantity * static_cast<int>(o.lines.size());
  o.baskets = compute_baskets(o.items);
  return o;
}

Instance tiny_instance(std::uint64_t seed, const TinyOptions& options) {
  std::mt19937_64 rng(seed);
  const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const WarehouseLayout& layout = tiny_layout();
  for (;;) {
    const int n = pick(options.min_orders, options.max_orders);
    std::vector<Order> orders;
    std::set<ProductId> used;
    for (int i = 0; i < n; ++i) {
      Order o;
      o.id = i + 1;
      const int lines = pick(1, options.max_lines);
      std::set<ProductId> mine;
      while (static_cast<int>(mine.size()) < lines) mine.insert(pick(1, 104));
      for (ProductId p : mine) {
        const int q = pick(1, 30);
        o.lines.push_back({p, q});
        o.items += q;
        used.insert(p);
      }
      o.baskets = compute_baskets(o.items);
      orders.push_back(std::move(o));
    }
    int baskets = 0;
    for (const Order& o : orders) baskets += o.baskets;
    int max_b = 0;
    for (const Order& o : orders) max_b = std::max(max_b, o.baskets);
    const int drawn = pick(1, options.max_fleet);
    const int fleet = options.fixed_fleet > 0 ? options.fixed_fleet : drawn;
    const int capacity = std::max(max_b, (baskets + fleet - 1) / fleet + pick(0, 1));
    Instance inst = make_instance(layout, std::move(orders), capacity, fleet);
    if (static_cast<int>(inst.required_vertices().size()) > options.max_required) continue;
    inst.name = "tiny-" + std::to_string(seed);
    return inst;
  }
}

}  // namespace jobprp::testing
