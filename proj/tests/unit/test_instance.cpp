#include <doctest.h>

#include <fstream>
#include <sstream>

#include "jobprp/error.hpp"
#include "jobprp/instance.hpp"
#include "support.hpp"

using namespace jobprp;

namespace {

Purchase purchase(std::int64_t customer, std::int64_t day, std::vector<OrderLine> lines) {
  return Purchase{customer, day, std::move(lines)};
}

}  // namespace

TEST_CASE("basket arithmetic") {
  CHECK(compute_baskets(63) == 2);
  CHECK(compute_baskets(40) == 1);
  CHECK(compute_baskets(41) == 2);
  CHECK(compute_baskets(1) == 1);
  CHECK(compute_baskets(80, 40) == 2);
  CHECK(compute_baskets(81, 40) == 3);
  CHECK(compute_baskets(10, 3) == 4);
}

TEST_CASE("fleet size") {
  CHECK(fleet_size(6, 8) == 1);
  CHECK(fleet_size(8, 8) == 2);
  CHECK(fleet_size(43, 8) == 6);
  // Boundaries of ceil(x / B + 0.2): 6.4 / 8 + 0.2 = 1.0 exactly.
  CHECK(fleet_size(7, 8) == 2);
  CHECK(fleet_size(1, 5) == 1);
  CHECK(fleet_size(4, 5) == 1);
  CHECK(fleet_size(5, 5) == 2);
}

TEST_CASE("ISO dates") {
  CHECK(parse_iso_date("1970-01-01") == 0);
  CHECK(parse_iso_date("1997-01-01") == 9862);
  CHECK(parse_iso_date("1997-01-01T13:45:00") == 9862);
  CHECK(parse_iso_date("2000-03-01") - parse_iso_date("2000-02-28") == 2);
  CHECK(format_iso_date(9862) == "1997-01-01");
  for (std::int64_t d = 9000; d < 11000; d += 37) CHECK(parse_iso_date(format_iso_date(d)) == d);
  CHECK_THROWS_AS(parse_iso_date("1997-13-01"), InvalidInput);
  CHECK_THROWS_AS(parse_iso_date("yesterday"), InvalidInput);
}

TEST_CASE("combining purchases within the window") {
  SUBCASE("purchases two days apart merge") {
    const std::vector<Purchase> log{purchase(1, 101, {{10, 1}}), purchase(1, 103, {{11, 2}})};
    const auto orders = combine_orders(log, 5);
    REQUIRE(orders.size() == 1);
    CHECK(orders[0].lines.size() == 2);
    CHECK(orders[0].items == 3);
  }
  SUBCASE("quantities of a repeated product add up") {
    const std::vector<Purchase> log{purchase(1, 100, {{10, 2}}), purchase(1, 102, {{10, 3}})};
    const auto orders = combine_orders(log, 5);
    REQUIRE(orders.size() == 1);
    REQUIRE(orders[0].lines.size() == 1);
    CHECK(orders[0].lines[0] == OrderLine{10, 5});
  }
  SUBCASE("purchases outside the window are dropped") {
    const std::vector<Purchase> log{purchase(1, 100, {{10, 1}}), purchase(1, 104, {{11, 1}}),
                                    purchase(1, 105, {{12, 1}})};
    const auto orders = combine_orders(log, 5);
    REQUIRE(orders.size() == 1);
    CHECK(orders[0].lines.size() == 2);
  }
  SUBCASE("sorted by products, then items, then customer") {
    const std::vector<Purchase> log{purchase(3, 1, {{1, 1}, {2, 1}}), purchase(2, 1, {{1, 5}}),
                                    purchase(1, 1, {{1, 1}, {2, 1}}), purchase(4, 1, {{1, 1}, {3, 4}})};
    const auto orders = combine_orders(log, 5);
    REQUIRE(orders.size() == 4);
    CHECK(orders[0].id == 4);
    CHECK(orders[1].id == 1);
    CHECK(orders[2].id == 3);
    CHECK(orders[3].id == 2);
  }
  SUBCASE("baskets use the item capacity") {
    const std::vector<Purchase> log{purchase(1, 1, {{1, 63}})};
    CHECK(combine_orders(log, 5)[0].baskets == 2);
    CHECK(combine_orders(log, 5, 100)[0].baskets == 1);
  }
  CHECK_THROWS_AS(combine_orders({}, 0), InvalidInput);
}

TEST_CASE("synthetic purchase logs") {
  const auto catalog = synth_catalog(500, 2);
  OrderProfile p;
  p.num_customers = 200;
  SUBCASE("same seed, same log") {
    const auto a = synth_orders(0, p, catalog);
    const auto b = synth_orders(0, p, catalog);
    std::ostringstream sa, sb;
    write_purchase_csv(sa, a);
    write_purchase_csv(sb, b);
    CHECK(sa.str() == sb.str());
    std::ostringstream sc;
    write_purchase_csv(sc, synth_orders(1, p, catalog));
    CHECK(sc.str() != sa.str());
  }
  SUBCASE("one product per purchase") {
    p.products_geometric_p = 1.0;
    for (const Purchase& q : synth_orders(3, p, catalog)) CHECK(q.lines.size() == 1);
  }
  SUBCASE("mean products per purchase") {
    p.num_customers = 10000;
    p.purchases_per_customer_max = 1;
    p.products_geometric_p = 0.25;
    const auto log = synth_orders(4, p, catalog);
    REQUIRE(log.size() == 10000);
    double total = 0;
    for (const Purchase& q : log) total += static_cast<double>(q.lines.size());
    const double mean = total / static_cast<double>(log.size());
    CHECK(mean > 4.0 * 0.95);
    CHECK(mean < 4.0 * 1.05);
  }
  SUBCASE("dates fall in the span") {
    for (const Purchase& q : synth_orders(5, p, catalog)) {
      CHECK(q.day >= p.start_day);
      CHECK(q.day < p.start_day + p.span_days);
    }
  }
  p.products_geometric_p = 0.0;
  CHECK_THROWS_AS(synth_orders(0, p, catalog), InvalidInput);
}

TEST_CASE("purchase CSV round trip") {
  const std::vector<Purchase> log{purchase(7, 9862, {{5, 1}, {6, 3}}), purchase(8, 9863, {{5, 2}})};
  std::ostringstream out;
  write_purchase_csv(out, log);
  CHECK(out.str().rfind("customer,date,product,qty\n", 0) == 0);
  CHECK(out.str().find("7,1997-01-01,6,3") != std::string::npos);
  std::istringstream in(out.str());
  const auto back = read_purchase_csv(in);
  REQUIRE(back.size() == 2);
  CHECK(back[0].customer == 7);
  CHECK(back[0].day == 9862);
  CHECK(back[0].lines == log[0].lines);
  CHECK(back[1].lines == log[1].lines);

  std::istringstream bad_header("client,date,product,qty\n1,1997-01-01,1,1\n");
  CHECK_THROWS_AS(read_purchase_csv(bad_header), InvalidInput);
  std::istringstream bad_qty("customer,date,product,qty\n1,1997-01-01,1,zero\n");
  CHECK_THROWS_AS(read_purchase_csv(bad_qty), InvalidInput);
}

TEST_CASE("instance construction maps products to location vertices") {
  const auto& layout = testing::tiny_layout();
  const ProductId a = testing::product_at_rank(layout, 0);
  const ProductId b = testing::product_at_rank(layout, 18);  // same column, other side
  const ProductId c = testing::product_at_rank(layout, 40);
  std::vector<Order> orders{testing::make_order(1, {a, b}), testing::make_order(2, {c})};
  const Instance inst = make_instance(layout, orders, 8);
  CHECK(inst.fleet == 1);
  CHECK(inst.required_vertices().size() == 2);
  CHECK(inst.order_vertices[0].size() == 1);
  CHECK(inst.graph.location_vertices().size() == 2);
  const auto f = features(inst);
  CHECK(f.orders == 2);
  CHECK(f.total_baskets == 2);
  CHECK(f.vertices == 1 + 9 + 2);
  CHECK(f.arcs == inst.graph.num_arcs());
  const int v = inst.order_vertices[0][0];
  const auto& products = inst.graph.vertex(v).products;
  CHECK(std::find(products.begin(), products.end(), a) != products.end());
  CHECK(std::find(products.begin(), products.end(), b) != products.end());

  CHECK_THROWS_AS(make_instance(layout, {testing::make_order(1, {9999})}, 8), InvalidInput);
  CHECK_THROWS_AS(make_instance(layout, {testing::make_order(1, {a}, 400)}, 8), Infeasible);
  CHECK_THROWS_AS(make_instance(layout, {testing::make_order(1, {a}, 200), testing::make_order(2, {c}, 200)}, 8, 1),
                  Infeasible);
}

TEST_CASE("validation rejects broken instances") {
  Instance inst = testing::tiny_instance(3);
  CHECK_NOTHROW(validate(inst));
  SUBCASE("order vertex not holding its products") {
    auto locs = inst.graph.location_vertices();
    auto& vs = inst.order_vertices[0];
    for (int v : locs) {
      if (std::find(vs.begin(), vs.end(), v) == vs.end()) {
        vs = {v};
        break;
      }
    }
    CHECK_THROWS_AS(validate(inst), InvalidInput);
  }
  SUBCASE("basket mismatch") {
    inst.orders[0].baskets += 1;
    CHECK_THROWS_AS(validate(inst), InvalidInput);
  }
  SUBCASE("duplicate order id") {
    inst.orders[1].id = inst.orders[0].id;
    CHECK_THROWS_AS(validate(inst), InvalidInput);
  }
  SUBCASE("non-location vertex") {
    inst.order_vertices[0] = {inst.graph.origin()};
    CHECK_THROWS_AS(validate(inst), InvalidInput);
  }
}

TEST_CASE("instance files round trip losslessly") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = testing::tiny_instance(seed);
    const auto path = testing::temp_file("instance.json");
    save_instance(inst, path.string());
    const Instance back = load_instance(path.string());
    CHECK(nlohmann::json(back) == nlohmann::json(inst));
    CHECK(back.orders == inst.orders);
    CHECK(back.order_vertices == inst.order_vertices);
    CHECK(back.fleet == inst.fleet);
    CHECK(back.trolley_capacity == inst.trolley_capacity);
    REQUIRE(back.layout.has_value());
    CHECK(*back.layout == *inst.layout);
    std::filesystem::remove(path);
  }
}

TEST_CASE("stored feature header must match the recomputed features") {
  const Instance inst = testing::tiny_instance(4);
  nlohmann::json j = inst;
  CHECK(j.at("features").at("vertices").get<int>() == inst.graph.num_vertices());
  CHECK_NOTHROW(j.get<Instance>());
  j["features"]["arcs"] = inst.graph.num_arcs() + 2;
  CHECK_THROWS_AS(j.get<Instance>(), InvalidInput);
  j.erase("features");
  CHECK_NOTHROW(j.get<Instance>());
  j["format"] = "something-else";
  CHECK_THROWS_AS(j.get<Instance>(), InvalidInput);
  CHECK_THROWS_AS(load_instance("/nonexistent/instance.json"), InvalidInput);
}

TEST_CASE("restricting to a subset of orders shares vertex keys") {
  const Instance inst = testing::tiny_instance(12);
  const std::vector<int> pick{1, 0};
  const Instance sub = restrict_orders(inst, pick, 1);
  REQUIRE(sub.num_orders() == 2);
  CHECK(sub.orders[0] == inst.orders[1]);
  CHECK(sub.fleet == 1);
  for (int o = 0; o < 2; ++o) {
    std::set<std::int64_t> a, b;
    for (int v : sub.order_vertices[static_cast<std::size_t>(o)]) a.insert(sub.graph.vertex(v).key);
    for (int v : inst.order_vertices[static_cast<std::size_t>(pick[static_cast<std::size_t>(o)])]) {
      b.insert(inst.graph.vertex(v).key);
    }
    CHECK(a == b);
  }
}
