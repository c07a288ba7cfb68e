#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "jobprp/graph.hpp"
#include "jobprp/warehouse.hpp"

namespace jobprp {

struct OrderLine {
  ProductId product = 0;
  int quantity = 1;

  friend bool operator==(const OrderLine&, const OrderLine&) = default;
};

struct Order {
  std::int64_t id = 0;
  std::vector<OrderLine> lines;
  int items = 0;
  int baskets = 0;

  int distinct_products() const { return static_cast<int>(lines.size()); }
  friend bool operator==(const Order&, const Order&) = default;
};

// One checkout in a purchase log. `day` counts days since 1970-01-01.
struct Purchase {
  std::int64_t customer = 0;
  std::int64_t day = 0;
  std::vector<OrderLine> lines;
};

// Days since 1970-01-01 for an ISO-8601 calendar date (YYYY-MM-DD, an
// optional time part is ignored).
std::int64_t parse_iso_date(const std::string& text);
std::string format_iso_date(std::int64_t day);

// Merges every customer's purchases made within `delta_days` of their first
// purchase, then sorts by distinct products, items (both descending) and
// customer id. Baskets are computed with `basket_item_capacity`.
std::vector<Order> combine_orders(std::span<const Purchase> log, int delta_days,
                                  int basket_item_capacity = 40);

int compute_baskets(int items, int capacity = 40);
// ceil(total_baskets / B + 0.2), evaluated in integers.
int fleet_size(int total_baskets, int trolley_capacity);

struct OrderProfile {
  int num_customers = 2000;
  int purchases_per_customer_max = 6;  // uniform on 1..max
  int span_days = 60;                  // purchase dates fall in [0, span_days)
  double products_geometric_p = 0.25;  // distinct products per purchase ~ Geometric on 1,2,...
  int max_products_per_purchase = 40;
  double quantity_geometric_p = 0.5;   // units per line ~ Geometric on 1,2,...
  double popularity_skew = 0.8;        // Zipf exponent over the catalog
  std::int64_t start_day = 9862;       // 1997-01-01
};

std::vector<Purchase> synth_orders(std::uint64_t seed, const OrderProfile& profile,
                                   std::span<const Product> catalog);

std::vector<Purchase> read_purchase_csv(std::istream& in);
void write_purchase_csv(std::ostream& out, std::span<const Purchase> log);

struct Instance {
  std::string name;
  std::optional<WarehouseLayout> layout;  // absent for imported graphs
  PickingGraph graph;                     // reduced to the required locations
  std::vector<Order> orders;
  // V_o: location vertex ids of `graph` holding order o's products, ascending.
  std::vector<std::vector<int>> order_vertices;
  int trolley_capacity = 8;  // B
  int fleet = 1;             // T
  int basket_item_capacity = 40;

  int num_orders() const { return static_cast<int>(orders.size()); }
  int total_baskets() const;
  // Location vertices required by at least one order.
  std::vector<int> required_vertices() const;
};

// Throws InvalidInput or Infeasible when an Instance invariant fails.
void validate(const Instance& inst);

// Places orders on the layout's full graph and reduces it. Trolley count
// defaults to fleet_size(sum of baskets, B).
Instance make_instance(const WarehouseLayout& layout, std::vector<Order> orders,
                       int trolley_capacity = 8, std::optional<int> fleet = std::nullopt,
                       int basket_item_capacity = 40);

// Sub-instance over the listed orders (in that order) on a graph reduced to
// their locations. Vertex keys are shared with `inst.graph`.
Instance restrict_orders(const Instance& inst, std::span<const int> order_indices, int fleet);

struct InstanceFeatures {
  int orders = 0;
  int total_baskets = 0;
  int fleet = 0;
  int vertices = 0;
  int arcs = 0;
  int location_vertices = 0;
};
InstanceFeatures features(const Instance& inst);

void to_json(nlohmann::json& j, const Order& o);
void from_json(const nlohmann::json& j, Order& o);
void to_json(nlohmann::json& j, const Instance& inst);
void from_json(const nlohmann::json& j, Instance& inst);

Instance load_instance(const std::string& path);
void save_instance(const Instance& inst, const std::string& path);

}  // namespace jobprp
