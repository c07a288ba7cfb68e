#include <doctest.h>

#include <fstream>
#include <random>
#include <set>

#include "jobprp/error.hpp"
#include "jobprp/warehouse.hpp"
#include "support.hpp"

using namespace jobprp;

namespace {

LayoutConfig config(int products, int aisles, int cross, int shelves) {
  LayoutConfig c;
  c.min_products = products;
  c.num_aisles = aisles;
  c.num_cross_aisles = cross;
  c.num_shelves = shelves;
  return c;
}

}  // namespace

TEST_CASE("shelf sizing keeps empty slots to a minimum") {
  SUBCASE("104 products, 3 aisles, 2 shelves") {
    const auto layout = build_layout(config(104, 3, 3, 2), synth_catalog(104, 1));
    CHECK(layout.slots_per_shelf == 9);
    CHECK(layout.capacity == 108);
    CHECK(layout.empty_slots() == 4);
  }
  SUBCASE("1560 products, 8 aisles, 3 shelves") {
    const auto layout = build_layout(config(1560, 8, 3, 3), synth_catalog(1560, 1));
    CHECK(layout.slots_per_shelf == 33);
    CHECK(layout.capacity == 1584);
    CHECK(layout.empty_slots() == 24);
  }
  SUBCASE("exact division") {
    const auto layout = build_layout(config(12, 1, 2, 1), synth_catalog(12, 1));
    CHECK(layout.slots_per_shelf == 6);
    CHECK(layout.capacity == 12);
    CHECK(layout.empty_slots() == 0);
  }
}

TEST_CASE("default config is the eight-aisle warehouse") {
  const LayoutConfig c;
  CHECK(c.num_aisles == 8);
  CHECK(c.num_cross_aisles == 3);
  CHECK(c.num_shelves == 3);
  CHECK(slots_per_shelf(c) == 33);
}

TEST_CASE("subaisle count") {
  CHECK(subaisle_count(build_layout(config(1560, 8, 3, 3), synth_catalog(1560, 1))) == 16);
  CHECK(subaisle_count(build_layout(config(104, 3, 3, 2), synth_catalog(104, 1))) == 6);
  CHECK(subaisle_count(build_layout(config(12, 1, 2, 1), synth_catalog(12, 1))) == 1);
}

TEST_CASE("random configs: minimal slots, balanced subaisles, injective placement") {
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 200; ++trial) {
    const auto draw = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    const LayoutConfig c = config(draw(1, 600), draw(1, 6), draw(2, 5), draw(1, 4));
    const int products = draw(1, c.min_products);
    const auto layout = build_layout(c, synth_catalog(products, static_cast<std::uint64_t>(trial)));
    const int per_slot = 2 * c.num_aisles * c.num_shelves;
    INFO("trial " << trial);
    CHECK(per_slot * layout.slots_per_shelf >= c.min_products);
    CHECK(per_slot * (layout.slots_per_shelf - 1) < c.min_products);
    CHECK(layout.capacity == per_slot * layout.slots_per_shelf);

    REQUIRE(layout.subaisle_slot_counts.size() == static_cast<std::size_t>(c.num_aisles));
    for (const auto& counts : layout.subaisle_slot_counts) {
      REQUIRE(counts.size() == static_cast<std::size_t>(c.num_cross_aisles - 1));
      int sum = 0;
      for (int k : counts) sum += k;
      CHECK(sum == layout.slots_per_shelf);
      const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
      CHECK(*hi - *lo <= 1);
    }

    CHECK(layout.placement.size() == static_cast<std::size_t>(products));
    std::set<SlotCoord> used;
    for (const auto& [id, coord] : layout.placement) {
      CHECK(used.insert(coord).second);
      CHECK(coord.aisle >= 1);
      CHECK(coord.aisle <= c.num_aisles);
      CHECK(coord.shelf >= 1);
      CHECK(coord.shelf <= c.num_shelves);
      CHECK(coord.slot >= 1);
      CHECK(coord.slot <= layout.slots_per_shelf);
    }
  }
}

TEST_CASE("products are placed in category order, column by column") {
  const auto catalog = synth_catalog(104, 3);
  const auto layout = build_layout(config(104, 3, 3, 2), catalog);
  std::vector<Product> sorted(catalog.begin(), catalog.end());
  std::sort(sorted.begin(), sorted.end(), [](const Product& a, const Product& b) {
    return a.category != b.category ? a.category < b.category : a.id < b.id;
  });
  for (int rank = 0; rank < static_cast<int>(sorted.size()); ++rank) {
    CHECK(testing::product_at_rank(layout, rank) == sorted[static_cast<std::size_t>(rank)].id);
  }
  CHECK(layout.placement.at(sorted[0].id) == SlotCoord{1, Side::West, 1, 1});
  CHECK(layout.placement.at(sorted[1].id) == SlotCoord{1, Side::West, 2, 1});
  CHECK(layout.placement.at(sorted[18].id) == SlotCoord{1, Side::East, 1, 1});
}

TEST_CASE("subaisle of a slot column") {
  const auto layout = build_layout(config(104, 3, 3, 2), synth_catalog(104, 1));
  int first = 0;
  for (int slot = 1; slot <= layout.slots_per_shelf; ++slot) {
    if (layout.subaisle_of_slot(1, slot) == 1) ++first;
  }
  CHECK(first == layout.subaisle_slot_counts[0][0]);
  CHECK(layout.subaisle_of_slot(1, layout.slots_per_shelf) == 2);
  CHECK_THROWS_AS(layout.subaisle_of_slot(1, 0), InvalidInput);
}

TEST_CASE("invalid configs are rejected") {
  CHECK_THROWS_AS(validate(config(10, 2, 1, 1)), InvalidInput);
  CHECK_THROWS_AS(validate(config(0, 2, 2, 1)), InvalidInput);
  CHECK_THROWS_AS(validate(config(10, 0, 2, 1)), InvalidInput);
  LayoutConfig c = config(10, 2, 2, 1);
  c.aisle_width = 0.0;
  CHECK_THROWS_AS(validate(c), InvalidInput);
  c = config(10, 2, 2, 1);
  c.origin_offset = -1.0;
  CHECK_THROWS_AS(validate(c), InvalidInput);
  c.origin_offset = 0.0;
  CHECK_NOTHROW(validate(c));
  CHECK_THROWS_AS(build_layout(config(10, 2, 2, 1), {}), InvalidInput);
  CHECK_THROWS_AS(build_layout(config(10, 2, 2, 1), synth_catalog(13, 1)), InvalidInput);
}

TEST_CASE("catalog generation is seeded") {
  const auto a = synth_catalog(300, 5);
  const auto b = synth_catalog(300, 5);
  const auto c = synth_catalog(300, 6);
  REQUIRE(a.size() == 300);
  bool same = true;
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = same && a[i].id == b[i].id && a[i].category == b[i].category;
    differs = differs || a[i].category != c[i].category;
    CHECK(a[i].id == static_cast<ProductId>(i + 1));
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("layout JSON round trip") {
  const auto layout = build_layout(config(104, 3, 3, 2), synth_catalog(104, 1));
  const nlohmann::json j = layout;
  const auto back = j.get<WarehouseLayout>();
  CHECK(back == layout);

  nlohmann::json broken = j;
  broken["placement"][0]["slot"] = 99;
  CHECK_THROWS_AS(broken.get<WarehouseLayout>(), InvalidInput);
}

TEST_CASE("layout JSON matches the documented schema") {
  std::ifstream in(JOBPRP_DOCS_DIR "/layout.schema.json");
  REQUIRE(in);
  const auto schema = nlohmann::json::parse(in);
  const nlohmann::json j = build_layout(config(104, 3, 3, 2), synth_catalog(104, 1));

  const auto keys = [](const nlohmann::json& obj) {
    std::set<std::string> out;
    for (const auto& [k, v] : obj.items()) out.insert(k);
    return out;
  };
  const auto required = [](const nlohmann::json& s) {
    return s.at("required").get<std::set<std::string>>();
  };
  CHECK(keys(j) == required(schema));
  CHECK(keys(schema.at("properties")) == required(schema));
  const auto& defs = schema.at("$defs");
  CHECK(keys(j.at("config")) == required(defs.at("config")));
  CHECK(keys(defs.at("config").at("properties")) == required(defs.at("config")));
  REQUIRE_FALSE(j.at("placement").empty());
  for (const auto& p : j.at("placement")) {
    CHECK(keys(p) == required(defs.at("slot")));
    const auto sides = defs.at("slot").at("properties").at("side").at("enum").get<std::set<std::string>>();
    CHECK(sides.count(p.at("side").get<std::string>()) == 1);
  }
}
