#include "jobprp/instance.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "jobprp/error.hpp"

namespace jobprp {

namespace {

// Proleptic Gregorian calendar conversions.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

bool leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

template <typename T>
T parse_number(std::string_view text, const char* what) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw InvalidInput(std::string("bad ") + what + " '" + std::string(text) + "'");
  }
  return value;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) fields.push_back(trim(field));
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

std::int64_t parse_iso_date(const std::string& text) {
  const std::string date = text.substr(0, std::min<std::size_t>(text.size(), 10));
  if (date.size() != 10 || date[4] != '-' || date[7] != '-') {
    throw InvalidInput("expected YYYY-MM-DD date, got '" + text + "'");
  }
  const auto y = parse_number<std::int64_t>(std::string_view(date).substr(0, 4), "year");
  const auto m = parse_number<unsigned>(std::string_view(date).substr(5, 2), "month");
  const auto d = parse_number<unsigned>(std::string_view(date).substr(8, 2), "day");
  static constexpr unsigned month_days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12) throw InvalidInput("month out of range in '" + text + "'");
  const unsigned limit = month_days[m - 1] + (m == 2 && leap(y) ? 1 : 0);
  if (d < 1 || d > limit) throw InvalidInput("day out of range in '" + text + "'");
  return days_from_civil(y, m, d);
}

std::string format_iso_date(std::int64_t day) {
  std::int64_t y = 0;
  unsigned m = 0;
  unsigned d = 0;
  civil_from_days(day, y, m, d);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02u", static_cast<long long>(y), m, d);
  return buf;
}

int compute_baskets(int items, int capacity) {
  if (items < 1 || capacity < 1) throw InvalidInput("basket inputs must be positive");
  return (items + capacity - 1) / capacity;
}

int fleet_size(int total_baskets, int trolley_capacity) {
  if (total_baskets < 1 || trolley_capacity < 1) {
    throw InvalidInput("fleet size inputs must be positive");
  }
  // ceil(b/B + 1/5) = ceil((5b + B) / 5B)
  const std::int64_t num = 5LL * total_baskets + trolley_capacity;
  const std::int64_t den = 5LL * trolley_capacity;
  return static_cast<int>((num + den - 1) / den);
}

std::vector<Order> combine_orders(std::span<const Purchase> log, int delta_days,
                                  int basket_item_capacity) {
  if (delta_days < 1) throw InvalidInput("delta must be at least one day");
  std::map<std::int64_t, std::int64_t> first_day;
  for (const Purchase& p : log) {
    auto [it, fresh] = first_day.emplace(p.customer, p.day);
    if (!fresh) it->second = std::min(it->second, p.day);
  }
  std::map<std::int64_t, std::map<ProductId, int>> merged;
  for (const Purchase& p : log) {
    if (p.day >= first_day[p.customer] + delta_days) continue;
    auto& lines = merged[p.customer];
    for (const OrderLine& l : p.lines) {
      if (l.quantity < 1) throw InvalidInput("purchase quantity must be positive");
      lines[l.product] += l.quantity;
    }
  }
  std::vector<Order> orders;
  for (const auto& [customer, lines] : merged) {
    if (lines.empty()) continue;
    Order o;
    o.id = customer;
    for (const auto& [product, qty] : lines) {
      o.lines.push_back({product, qty});
      o.items += qty;
    }
    o.baskets = compute_baskets(o.items, basket_item_capacity);
    orders.push_back(std::move(o));
  }
  std::sort(orders.begin(), orders.end(), [](const Order& a, const Order& b) {
    if (a.distinct_products() != b.distinct_products()) {
      return a.distinct_products() > b.distinct_products();
    }
    if (a.items != b.items) return a.items > b.items;
    return a.id < b.id;
  });
  return orders;
}

std::vector<Purchase> synth_orders(std::uint64_t seed, const OrderProfile& profile,
                                   std::span<const Product> catalog) {
  if (catalog.empty()) throw InvalidInput("catalog is empty");
  if (profile.num_customers < 1 || profile.purchases_per_customer_max < 1 ||
      profile.span_days < 1 || profile.max_products_per_purchase < 1 ||
      !(profile.products_geometric_p > 0 && profile.products_geometric_p <= 1) ||
      !(profile.quantity_geometric_p > 0 && profile.quantity_geometric_p <= 1) ||
      !(profile.popularity_skew >= 0)) {
    throw InvalidInput("order profile is not well-formed");
  }
  std::mt19937_64 rng(seed);

  // Popularity ranks are a seeded permutation of the catalog.
  std::vector<std::size_t> ranked(catalog.size());
  std::iota(ranked.begin(), ranked.end(), 0);
  std::shuffle(ranked.begin(), ranked.end(), rng);
  std::vector<double> weights(catalog.size());
  for (std::size_t r = 0; r < weights.size(); ++r) {
    weights[r] = 1.0 / std::pow(static_cast<double>(r + 1), profile.popularity_skew);
  }
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::geometric_distribution<int> product_count(profile.products_geometric_p);
  std::geometric_distribution<int> quantity(profile.quantity_geometric_p);
  std::uniform_int_distribution<int> purchase_count(1, profile.purchases_per_customer_max);
  std::uniform_int_distribution<int> day(0, profile.span_days - 1);

  const int cap = std::min<int>(profile.max_products_per_purchase, static_cast<int>(catalog.size()));
  std::vector<Purchase> log;
  for (int c = 1; c <= profile.num_customers; ++c) {
    const int visits = purchase_count(rng);
    for (int v = 0; v < visits; ++v) {
      Purchase p;
      p.customer = c;
      p.day = profile.start_day + day(rng);
      const int want = std::min(cap, product_count(rng) + 1);
      std::set<ProductId> chosen;
      while (static_cast<int>(chosen.size()) < want) {
        chosen.insert(catalog[ranked[pick(rng)]].id);
      }
      for (ProductId id : chosen) p.lines.push_back({id, quantity(rng) + 1});
      log.push_back(std::move(p));
    }
  }
  std::stable_sort(log.begin(), log.end(), [](const Purchase& a, const Purchase& b) {
    return std::tie(a.day, a.customer) < std::tie(b.day, b.customer);
  });
  return log;
}

std::vector<Purchase> read_purchase_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) return {};
  const auto header = split_csv(line);
  const std::vector<std::string> expected{"customer", "date", "product", "qty"};
  if (header != expected) throw InvalidInput("purchase CSV header must be customer,date,product,qty");
  std::map<std::pair<std::int64_t, std::int64_t>, Purchase> grouped;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 4) throw InvalidInput("purchase CSV row " + std::to_string(row) + " needs 4 fields");
    const auto customer = parse_number<std::int64_t>(f[0], "customer");
    const auto day = parse_iso_date(f[1]);
    const auto product = parse_number<ProductId>(f[2], "product");
    const auto qty = parse_number<int>(f[3], "qty");
    if (qty < 1) throw InvalidInput("purchase CSV row " + std::to_string(row) + " has qty < 1");
    Purchase& p = grouped[{customer, day}];
    p.customer = customer;
    p.day = day;
    p.lines.push_back({product, qty});
  }
  std::vector<Purchase> log;
  for (auto& [key, p] : grouped) log.push_back(std::move(p));
  return log;
}

void write_purchase_csv(std::ostream& out, std::span<const Purchase> log) {
  out << "customer,date,product,qty\n";
  for (const Purchase& p : log) {
    const std::string date = format_iso_date(p.day);
    for (const OrderLine& l : p.lines) {
      out << p.customer << ',' << date << ',' << l.product << ',' << l.quantity << '\n';
    }
  }
}

int Instance::total_baskets() const {
  int total = 0;
  for (const Order& o : orders) total += o.baskets;
  return total;
}

std::vector<int> Instance::required_vertices() const {
  std::set<int> all;
  for (const auto& vs : order_vertices) all.insert(vs.begin(), vs.end());
  return {all.begin(), all.end()};
}

void validate(const Instance& inst) {
  if (inst.orders.empty()) throw InvalidInput("instance has no orders");
  if (inst.fleet < 1) throw InvalidInput("fleet size must be at least 1");
  if (inst.trolley_capacity < 1) throw InvalidInput("trolley capacity must be at least 1");
  if (inst.basket_item_capacity < 1) throw InvalidInput("basket item capacity must be positive");
  if (inst.order_vertices.size() != inst.orders.size()) {
    throw InvalidInput("every order needs a vertex list");
  }
  std::set<ProductId> stocked;
  for (const Vertex& v : inst.graph.vertices()) stocked.insert(v.products.begin(), v.products.end());
  std::set<std::int64_t> ids;
  for (std::size_t i = 0; i < inst.orders.size(); ++i) {
    const Order& o = inst.orders[i];
    if (!ids.insert(o.id).second) throw InvalidInput("duplicate order id " + std::to_string(o.id));
    if (o.lines.empty()) throw InvalidInput("order " + std::to_string(o.id) + " has no lines");
    std::set<ProductId> products;
    int items = 0;
    for (const OrderLine& l : o.lines) {
      if (l.quantity < 1) throw InvalidInput("order line quantity must be positive");
      if (!products.insert(l.product).second) {
        throw InvalidInput("order " + std::to_string(o.id) + " repeats a product");
      }
      items += l.quantity;
    }
    if (items != o.items) throw InvalidInput("order " + std::to_string(o.id) + " item count mismatch");
    if (o.baskets != compute_baskets(o.items, inst.basket_item_capacity)) {
      throw InvalidInput("order " + std::to_string(o.id) + " basket count mismatch");
    }
    if (o.baskets > inst.trolley_capacity) {
      throw Infeasible("order " + std::to_string(o.id) + " needs more baskets than a trolley holds");
    }
    const auto& vs = inst.order_vertices[i];
    if (vs.empty()) throw InvalidInput("order " + std::to_string(o.id) + " has no locations");
    for (std::size_t k = 0; k < vs.size(); ++k) {
      if (vs[k] < 0 || vs[k] >= inst.graph.num_vertices() || !inst.graph.is_location(vs[k])) {
        throw InvalidInput("order " + std::to_string(o.id) + " references a non-location vertex");
      }
      if (k > 0 && vs[k] <= vs[k - 1]) throw InvalidInput("order vertex lists must be ascending");
    }
    // Products stocked somewhere in the graph must be stocked on V_o.
    std::set<ProductId> covered;
    for (int v : vs) {
      for (ProductId p : inst.graph.vertex(v).products) {
        if (products.contains(p)) covered.insert(p);
      }
    }
    for (ProductId p : products) {
      if (!covered.contains(p) && stocked.contains(p)) {
        throw InvalidInput("order " + std::to_string(o.id) + " locations do not hold its products");
      }
    }
  }
  if (inst.total_baskets() > inst.fleet * inst.trolley_capacity) {
    throw Infeasible("orders need " + std::to_string(inst.total_baskets()) + " baskets but " +
                     std::to_string(inst.fleet) + " trolleys carry " +
                     std::to_string(inst.fleet * inst.trolley_capacity));
  }
}

Instance make_instance(const WarehouseLayout& layout, std::vector<Order> orders,
                       int trolley_capacity, std::optional<int> fleet, int basket_item_capacity) {
  const PickingGraph full = build_full_graph(layout);
  std::map<ProductId, int> where;
  for (int v : full.location_vertices()) {
    for (ProductId p : full.vertex(v).products) where[p] = v;
  }
  std::set<int> keep;
  std::vector<std::vector<int>> full_sets;
  for (const Order& o : orders) {
    std::set<int> vs;
    for (const OrderLine& l : o.lines) {
      const auto it = where.find(l.product);
      if (it == where.end()) {
        throw InvalidInput("product " + std::to_string(l.product) + " of order " +
                           std::to_string(o.id) + " is not placed in the layout");
      }
      vs.insert(it->second);
    }
    keep.insert(vs.begin(), vs.end());
    full_sets.emplace_back(vs.begin(), vs.end());
  }

  Instance inst;
  inst.layout = layout;
  inst.graph = reduce_graph(full, keep);
  for (const auto& vs : full_sets) {
    std::vector<int> mapped;
    for (int v : vs) mapped.push_back(*inst.graph.vertex_by_key(full.vertex(v).key));
    std::sort(mapped.begin(), mapped.end());
    inst.order_vertices.push_back(std::move(mapped));
  }
  inst.orders = std::move(orders);
  inst.trolley_capacity = trolley_capacity;
  inst.basket_item_capacity = basket_item_capacity;
  inst.fleet = fleet ? *fleet : fleet_size(std::max(1, inst.total_baskets()), trolley_capacity);
  validate(inst);
  return inst;
}

Instance restrict_orders(const Instance& inst, std::span<const int> order_indices, int fleet) {
  std::set<int> keep;
  for (int i : order_indices) {
    const auto& vs = inst.order_vertices.at(static_cast<std::size_t>(i));
    keep.insert(vs.begin(), vs.end());
  }
  Instance sub;
  sub.name = inst.name;
  sub.layout = inst.layout;
  sub.graph = reduce_graph(inst.graph, keep);
  for (int i : order_indices) {
    sub.orders.push_back(inst.orders[static_cast<std::size_t>(i)]);
    std::vector<int> mapped;
    for (int v : inst.order_vertices[static_cast<std::size_t>(i)]) {
      mapped.push_back(*sub.graph.vertex_by_key(inst.graph.vertex(v).key));
    }
    std::sort(mapped.begin(), mapped.end());
    sub.order_vertices.push_back(std::move(mapped));
  }
  sub.trolley_capacity = inst.trolley_capacity;
  sub.basket_item_capacity = inst.basket_item_capacity;
  sub.fleet = fleet;
  return sub;
}

InstanceFeatures features(const Instance& inst) {
  return InstanceFeatures{inst.num_orders(),
                          inst.total_baskets(),
                          inst.fleet,
                          inst.graph.num_vertices(),
                          inst.graph.num_arcs(),
                          static_cast<int>(inst.graph.location_vertices().size())};
}

void to_json(nlohmann::json& j, const Order& o) {
  nlohmann::json lines = nlohmann::json::array();
  for (const OrderLine& l : o.lines) lines.push_back({{"product", l.product}, {"qty", l.quantity}});
  j = nlohmann::json{{"id", o.id}, {"lines", std::move(lines)}, {"items", o.items}, {"baskets", o.baskets}};
}

void from_json(const nlohmann::json& j, Order& o) {
  o.id = j.at("id").get<std::int64_t>();
  o.lines.clear();
  for (const auto& l : j.at("lines")) {
    o.lines.push_back({l.at("product").get<ProductId>(), l.at("qty").get<int>()});
  }
  o.items = j.at("items").get<int>();
  o.baskets = j.at("baskets").get<int>();
}

void to_json(nlohmann::json& j, const Instance& inst) {
  nlohmann::json orders = nlohmann::json::array();
  for (std::size_t i = 0; i < inst.orders.size(); ++i) {
    nlohmann::json jo = inst.orders[i];
    std::vector<std::int64_t> keys;
    for (int v : inst.order_vertices[i]) keys.push_back(inst.graph.vertex(v).key);
    jo["vertices"] = keys;
    orders.push_back(std::move(jo));
  }
  j = nlohmann::json{{"format", "jobprp-instance"},
                     {"version", 1},
                     {"name", inst.name},
                     {"trolley_capacity", inst.trolley_capacity},
                     {"fleet", inst.fleet},
                     {"basket_item_capacity", inst.basket_item_capacity},
                     {"graph", inst.graph},
                     {"orders", std::move(orders)}};
  if (inst.layout) j["layout"] = *inst.layout;
  const InstanceFeatures f = features(inst);
  j["features"] = {{"orders", f.orders},     {"total_baskets", f.total_baskets},
                   {"fleet", f.fleet},       {"vertices", f.vertices},
                   {"arcs", f.arcs},         {"location_vertices", f.location_vertices}};
}

void from_json(const nlohmann::json& j, Instance& inst) {
  if (j.value("format", std::string{}) != "jobprp-instance") {
    throw InvalidInput("not a jobprp instance document");
  }
  if (j.value("version", 0) != 1) throw InvalidInput("unsupported instance version");
  inst = Instance{};
  inst.name = j.value("name", std::string{});
  inst.trolley_capacity = j.at("trolley_capacity").get<int>();
  inst.fleet = j.at("fleet").get<int>();
  inst.basket_item_capacity = j.value("basket_item_capacity", 40);
  inst.graph = j.at("graph").get<PickingGraph>();
  if (j.contains("layout")) inst.layout = j.at("layout").get<WarehouseLayout>();
  for (const auto& jo : j.at("orders")) {
    inst.orders.push_back(jo.get<Order>());
    std::vector<int> vs;
    for (auto key : jo.at("vertices").get<std::vector<std::int64_t>>()) {
      const auto v = inst.graph.vertex_by_key(key);
      if (!v) throw InvalidInput("order references unknown vertex key " + std::to_string(key));
      vs.push_back(*v);
    }
    std::sort(vs.begin(), vs.end());
    inst.order_vertices.push_back(std::move(vs));
  }
  validate(inst);
  if (j.contains("features")) {
    const InstanceFeatures f = features(inst);
    const auto& h = j.at("features");
    const auto check = [&](const char* field, int actual) {
      if (h.contains(field) && h.at(field).get<int>() != actual) {
        throw InvalidInput(std::string("stored feature '") + field + "' is " +
                           std::to_string(h.at(field).get<int>()) + ", recomputed " +
                           std::to_string(actual));
      }
    };
    check("orders", f.orders);
    check("total_baskets", f.total_baskets);
    check("fleet", f.fleet);
    check("vertices", f.vertices);
    check("arcs", f.arcs);
    check("location_vertices", f.location_vertices);
  }
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open instance file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput("malformed instance JSON in " + path + ": " + e.what());
  }
  return j.get<Instance>();
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write instance file " + path);
  out << nlohmann::json(inst).dump(1) << '\n';
}

}  // namespace jobprp
