#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iomanip>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "jobprp/engine.hpp"
#include "jobprp/error.hpp"
#include "jobprp/heuristics.hpp"
#include "jobprp/instance.hpp"
#include "jobprp/manifest.hpp"
#include "jobprp/render.hpp"
#include "jobprp/warehouse.hpp"

namespace {

using jobprp::Instance;
using nlohmann::json;

constexpr int kExitFailure = 1;
constexpr int kExitInfeasible = 3;

struct GenerateOptions {
  jobprp::LayoutConfig layout;
  jobprp::OrderProfile profile;
  std::uint64_t seed = 1;
  int delta = 5;
  int orders = 5;
  int capacity = 8;
  std::optional<int> fleet;
  int basket_items = 40;
  std::string purchases;
  std::string log_out;
  std::string name;
  std::string out;
};

struct SolveOptions {
  std::string instance;
  std::string mode = "ibc";
  std::string families = "all";
  bool no_reversal = false;
  bool no_symmetry = false;
  bool no_warm_start = false;
  std::string warm_start;
  double time_limit = 3600.0;
  std::vector<std::string> backend_options;
  std::string out;
  std::string csv;
  std::string lp;
  std::string cut_log;
};

struct RouteOptions {
  std::string instance;
  std::vector<int> orders;
  std::string estimator = "exact";
  double time_limit = 3600.0;
  std::string out;
};

struct BatchOptions {
  std::string instance;
  std::string variant = "i";
  double time_limit = 3600.0;
  std::string out;
  std::string csv;
};

struct AblateOptions {
  std::vector<std::string> instances;
  std::string mode = "ibc";
  double time_limit = 3600.0;
  std::string csv;
};

struct TradeoffOptions {
  std::string instance;
  std::vector<int> k;
  double time_limit = 3600.0;
  std::string csv;
};

struct RenderOptions {
  std::string instance;
  std::string solution;
  std::string out;
};

std::string manifest_path_for(const std::string& output, const std::string& requested) {
  return requested.empty() ? output + ".manifest.json" : requested;
}

void write_manifest(jobprp::RunManifest m, const std::string& path) {
  m.versions = jobprp::library_versions();
  m.versions["cli11"] = CLI11_VERSION;
  std::ofstream out(path);
  if (!out) throw jobprp::InvalidInput("cannot write manifest " + path);
  out << json(m).dump(2) << '\n';
}

void print_features(const Instance& inst) {
  const auto f = jobprp::features(inst);
  std::cout << "instance " << (inst.name.empty() ? "(unnamed)" : inst.name) << '\n'
            << "  orders        " << f.orders << '\n'
            << "  sum b_o       " << f.total_baskets << '\n'
            << "  B             " << inst.trolley_capacity << '\n'
            << "  T             " << f.fleet << '\n'
            << "  |V|           " << f.vertices << '\n'
            << "  |A|           " << f.arcs << '\n'
            << "  locations     " << f.location_vertices << '\n';
}

void append_csv(const std::string& path, const std::string& header, const std::vector<std::string>& rows) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw jobprp::InvalidInput("cannot write " + path);
  if (fresh) out << header << '\n';
  for (const auto& r : rows) out << r << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw jobprp::InvalidInput("cannot write " + path);
  out << text;
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw jobprp::InvalidInput("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw jobprp::InvalidInput("malformed JSON in " + path + ": " + e.what());
  }
}

jobprp::BackendOptions parse_backend_options(const std::vector<std::string>& items) {
  jobprp::BackendOptions out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw jobprp::InvalidInput("backend option '" + item + "' is not key=value");
    }
    out[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return out;
}

void add_layout_flags(CLI::App* cmd, GenerateOptions& o) {
  cmd->add_option("--aisles", o.layout.num_aisles, "Aisles W_A")->capture_default_str();
  cmd->add_option("--cross-aisles", o.layout.num_cross_aisles, "Cross-aisles W_C")->capture_default_str();
  cmd->add_option("--shelves", o.layout.num_shelves, "Shelves per rack")->capture_default_str();
  cmd->add_option("--products", o.layout.min_products, "Products to store")->capture_default_str();
  cmd->add_option("--aisle-width", o.layout.aisle_width, "Aisle width (m)")->capture_default_str();
  cmd->add_option("--cross-width", o.layout.cross_aisle_width, "Cross-aisle width (m)")->capture_default_str();
  cmd->add_option("--rack-depth", o.layout.rack_depth, "Rack depth (m)")->capture_default_str();
  cmd->add_option("--slot-width", o.layout.slot_width, "Slot width (m)")->capture_default_str();
  cmd->add_option("--origin-offset", o.layout.origin_offset, "Depot offset west of aisle 1 (m)")
      ->capture_default_str();
  cmd->add_option("--delta", o.delta, "Days of purchases combined per customer")->capture_default_str();
  cmd->add_option("--orders,-O", o.orders, "Number of largest combined orders kept")->capture_default_str();
  cmd->add_option("--capacity,-B", o.capacity, "Baskets per trolley")->capture_default_str();
  cmd->add_option("--fleet,-T", o.fleet, "Trolleys (default: from the basket total)");
  cmd->add_option("--basket-items", o.basket_items, "Items per basket")->capture_default_str();
  cmd->add_option("--seed", o.seed, "Seed for the catalog and the order log")->capture_default_str();
  cmd->add_option("--name", o.name, "Instance name (default: d<delta>_o<orders>)");
  cmd->add_option("--out,-o", o.out, "Instance file to write")->required();
}

json layout_snapshot(const GenerateOptions& o) {
  json j = {{"layout", json(o.layout)}, {"seed", o.seed},          {"delta", o.delta},
            {"orders", o.orders},       {"capacity", o.capacity},  {"basket_items", o.basket_items},
            {"name", o.name}};
  j["fleet"] = o.fleet ? json(*o.fleet) : json(nullptr);
  return j;
}

Instance build_instance(const GenerateOptions& o, const std::vector<jobprp::Purchase>& log,
                        const std::vector<jobprp::Product>& catalog) {
  const auto layout = jobprp::build_layout(o.layout, catalog);
  auto combined = jobprp::combine_orders(log, o.delta, o.basket_items);
  if (o.orders < 1) throw jobprp::InvalidInput("--orders must be at least 1");
  if (static_cast<int>(combined.size()) < o.orders) {
    throw jobprp::InvalidInput("the log yields only " + std::to_string(combined.size()) +
                               " combined orders");
  }
  combined.resize(static_cast<std::size_t>(o.orders));
  Instance inst = jobprp::make_instance(layout, std::move(combined), o.capacity, o.fleet, o.basket_items);
  inst.name = o.name.empty() ? "d" + std::to_string(o.delta) + "_o" + std::to_string(o.orders) : o.name;
  return inst;
}

int cmd_generate(const GenerateOptions& o, jobprp::RunManifest m, const std::string& manifest) {
  const auto catalog = jobprp::synth_catalog(o.layout.min_products, o.seed);
  std::vector<jobprp::Purchase> log;
  if (!o.purchases.empty()) {
    std::ifstream in(o.purchases);
    if (!in) throw jobprp::InvalidInput("cannot open " + o.purchases);
    log = jobprp::read_purchase_csv(in);
    m.add_input(o.purchases);
  } else {
    log = jobprp::synth_orders(o.seed, o.profile, catalog);
  }
  const Instance inst = build_instance(o, log, catalog);
  jobprp::save_instance(inst, o.out);
  m.add_output(o.out);
  if (!o.log_out.empty()) {
    std::ofstream out(o.log_out);
    if (!out) throw jobprp::InvalidInput("cannot write " + o.log_out);
    jobprp::write_purchase_csv(out, log);
    out.close();
    m.add_output(o.log_out);
  }
  m.seed = o.seed;
  print_features(inst);
  write_manifest(m, manifest_path_for(o.out, manifest));
  return 0;
}

int cmd_import(const std::string& input, const std::string& out, jobprp::RunManifest m,
               const std::string& manifest) {
  const Instance inst = jobprp::load_instance(input);
  m.add_input(input);
  print_features(inst);
  if (!out.empty()) {
    jobprp::save_instance(inst, out);
    m.add_output(out);
    write_manifest(m, manifest_path_for(out, manifest));
  }
  return 0;
}

int cmd_info(const std::string& input) {
  const Instance inst = jobprp::load_instance(input);
  print_features(inst);
  std::cout << "  orders (id: products items baskets locations)\n";
  for (int o = 0; o < inst.num_orders(); ++o) {
    const auto& ord = inst.orders[static_cast<std::size_t>(o)];
    std::cout << "    " << ord.id << ": " << ord.distinct_products() << ' ' << ord.items << ' '
              << ord.baskets << ' ' << inst.order_vertices[static_cast<std::size_t>(o)].size() << '\n';
  }
  return 0;
}

int cmd_solve(const SolveOptions& o, jobprp::RunManifest m, const std::string& manifest) {
  const Instance inst = jobprp::load_instance(o.instance);
  m.add_input(o.instance);
  jobprp::SolveConfig cfg;
  cfg.mode = jobprp::parse_mode(o.mode);
  cfg.families = jobprp::FamilySet::parse(o.families);
  cfg.symmetry = !o.no_symmetry;
  cfg.no_reversal = o.no_reversal;
  cfg.time_limit = o.time_limit;
  cfg.heuristic_start = !o.no_warm_start;
  cfg.backend_options = parse_backend_options(o.backend_options);
  if (!o.warm_start.empty()) {
    cfg.warm_start = jobprp::solution_from_json(load_json(o.warm_start), inst).plan;
    m.add_input(o.warm_start);
  }
  std::unique_ptr<std::ofstream> cut_log;
  if (!o.cut_log.empty()) {
    cut_log = std::make_unique<std::ofstream>(o.cut_log);
    if (!*cut_log) throw jobprp::InvalidInput("cannot write " + o.cut_log);
    cfg.cut_log = cut_log.get();
  }
  m.config["families_resolved"] = cfg.families.str();

  if (!o.lp.empty()) {
    jobprp::ModelOptions mo{cfg.families, cfg.symmetry, false};
    std::ofstream lp(o.lp);
    if (!lp) throw jobprp::InvalidInput("cannot write " + o.lp);
    if (cfg.no_reversal) {
      mo.no_reversal = true;
      jobprp::write_lp(lp, jobprp::apply_no_reversal(inst, mo).model);
    } else {
      jobprp::write_lp(lp, jobprp::build_model(inst, mo));
    }
  }

  const jobprp::Solution sol = jobprp::solve_jobprp(inst, cfg);
  if (cut_log) cut_log->close();
  const std::string row = jobprp::csv_row(inst.name, sol);
  std::cout << jobprp::csv_header() << '\n' << row << '\n';
  std::cout << "status " << jobprp::status_name(sol.status) << '\n';

  const std::string primary = o.out.empty() ? o.instance + ".solution.json" : o.out;
  write_text(primary, json(sol).dump(1) + "\n");
  m.add_output(primary);
  if (!o.csv.empty()) {
    append_csv(o.csv, jobprp::csv_header(), {row});
    m.add_output(o.csv);
  }
  if (!o.lp.empty()) m.add_output(o.lp);
  if (!o.cut_log.empty()) m.add_output(o.cut_log);
  write_manifest(m, manifest_path_for(primary, manifest));
  return 0;
}

int cmd_route(const RouteOptions& o, jobprp::RunManifest m, const std::string& manifest) {
  const Instance inst = jobprp::load_instance(o.instance);
  m.add_input(o.instance);
  std::vector<int> orders = o.orders;
  if (orders.empty()) {
    for (int i = 0; i < inst.num_orders(); ++i) orders.push_back(i);
  }
  std::set<int> required;
  for (int i : orders) {
    if (i < 0 || i >= inst.num_orders()) throw jobprp::InvalidInput("order index " + std::to_string(i) + " out of range");
    const auto& vs = inst.order_vertices[static_cast<std::size_t>(i)];
    required.insert(vs.begin(), vs.end());
  }
  const std::vector<int> req(required.begin(), required.end());
  jobprp::RouteResult r;
  if (o.estimator == "portfolio") {
    r = jobprp::portfolio_route(inst.graph, req);
  } else {
    r = jobprp::estimate_route(jobprp::parse_estimator(o.estimator), inst.graph, req, o.time_limit);
  }
  std::cout << "length " << jobprp::format_metres(r.length) << (r.optimal ? " (optimal)" : "") << '\n';
  const json j = {{"instance", inst.name},         {"orders", orders},
                  {"estimator", o.estimator},      {"length_dm", r.length.dm()},
                  {"length_m", r.length.in_metres()}, {"optimal", r.optimal},
                  {"walk", r.walk}};
  const std::string primary = o.out.empty() ? o.instance + ".route.json" : o.out;
  write_text(primary, j.dump(1) + "\n");
  m.add_output(primary);
  write_manifest(m, manifest_path_for(primary, manifest));
  return 0;
}

std::string batch_header() { return "instance,variant,value,T(s)"; }

int cmd_batch(const BatchOptions& o, jobprp::RunManifest m, const std::string& manifest) {
  const Instance inst = jobprp::load_instance(o.instance);
  m.add_input(o.instance);
  std::vector<jobprp::Variant> variants;
  if (o.variant == "all") {
    variants = {jobprp::Variant::I, jobprp::Variant::II, jobprp::Variant::III};
  } else {
    variants = {jobprp::parse_variant(o.variant)};
  }
  std::vector<std::string> rows;
  json solutions = json::object();
  for (auto v : variants) {
    const auto sol = jobprp::run_variant(inst, v, o.time_limit);
    std::ostringstream row;
    row << inst.name << ',' << jobprp::variant_name(v) << ',' << jobprp::format_metres(sol.ub) << ','
        << std::fixed << std::setprecision(2) << sol.seconds;
    rows.push_back(row.str());
    solutions[jobprp::variant_name(v)] = sol;
  }
  std::cout << batch_header() << '\n';
  for (const auto& r : rows) std::cout << r << '\n';

  const std::string primary = o.out.empty() ? o.instance + ".batch.json" : o.out;
  // A single variant writes a plain solution document that `render` accepts.
  write_text(primary, (variants.size() == 1 ? solutions.begin().value() : solutions).dump(1) + "\n");
  m.add_output(primary);
  if (!o.csv.empty()) {
    append_csv(o.csv, batch_header(), rows);
    m.add_output(o.csv);
  }
  write_manifest(m, manifest_path_for(primary, manifest));
  return 0;
}

int cmd_ablate(const AblateOptions& o, jobprp::RunManifest m, const std::string& manifest) {
  std::vector<std::pair<std::string, jobprp::FamilySet>> configs = {
      {"reinforced", jobprp::FamilySet::all()}, {"base", jobprp::FamilySet::none()}};
  for (auto g : jobprp::kAllCutGroups) {
    configs.emplace_back("no-" + jobprp::group_name(g), jobprp::FamilySet::all().with(g, false));
  }
  const std::string header = "config," + jobprp::csv_header();
  std::vector<std::string> rows;
  std::cout << header << '\n';
  for (const auto& path : o.instances) {
    const Instance inst = jobprp::load_instance(path);
    m.add_input(path);
    for (const auto& [name, families] : configs) {
      jobprp::SolveConfig cfg;
      cfg.mode = jobprp::parse_mode(o.mode);
      cfg.families = families;
      cfg.time_limit = o.time_limit;
      const auto sol = jobprp::solve_jobprp(inst, cfg);
      rows.push_back(name + "," + jobprp::csv_row(inst.name, sol));
      std::cout << rows.back() << std::endl;
    }
  }
  append_csv(o.csv, header, rows);
  m.add_output(o.csv);
  write_manifest(m, manifest_path_for(o.csv, manifest));
  return 0;
}

int cmd_tradeoff(const TradeoffOptions& o, jobprp::RunManifest m, const std::string& manifest) {
  const Instance inst = jobprp::load_instance(o.instance);
  m.add_input(o.instance);
  std::vector<int> ks = o.k;
  if (ks.empty()) ks = {inst.num_orders()};
  const std::string header = "instance,K,total,T(s)";
  std::vector<std::string> rows;
  std::cout << header << '\n';
  for (int k : ks) {
    jobprp::SolveConfig cfg;
    cfg.time_limit = o.time_limit;
    const auto t0 = std::chrono::steady_clock::now();
    std::string total;
    try {
      total = jobprp::format_metres(jobprp::rolling_k(inst, k, cfg).total);
    } catch (const jobprp::Infeasible& e) {
      std::cerr << "infeasible at K=" << k << ": " << e.what() << '\n';
      total = "infeasible";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream row;
    row << inst.name << ',' << k << ',' << total << ',' << std::fixed << std::setprecision(2) << secs;
    rows.push_back(row.str());
    std::cout << rows.back() << std::endl;
  }
  append_csv(o.csv, header, rows);
  m.add_output(o.csv);
  write_manifest(m, manifest_path_for(o.csv, manifest));
  return 0;
}

int cmd_render(const RenderOptions& o, jobprp::RunManifest m, const std::string& manifest) {
  const Instance inst = jobprp::load_instance(o.instance);
  m.add_input(o.instance);
  std::optional<jobprp::Solution> sol;
  if (!o.solution.empty()) {
    sol = jobprp::solution_from_json(load_json(o.solution), inst);
    m.add_input(o.solution);
  }
  write_text(o.out, jobprp::render_svg(inst, sol ? &sol->plan : nullptr));
  m.add_output(o.out);
  write_manifest(m, manifest_path_for(o.out, manifest));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint order batching and picker routing solver"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("jobprp ") + jobprp::library_versions().at("jobprp"));
  std::string manifest;

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Build an instance from a synthetic or given purchase log");
  add_layout_flags(generate, gen);
  generate->add_option("--customers", gen.profile.num_customers, "Synthetic customers")->capture_default_str();
  generate->add_option("--max-purchases", gen.profile.purchases_per_customer_max, "Purchases per customer, at most")
      ->capture_default_str();
  generate->add_option("--span-days", gen.profile.span_days, "Days covered by the synthetic log")->capture_default_str();
  generate->add_option("--products-p", gen.profile.products_geometric_p, "Geometric p of products per purchase")
      ->capture_default_str();
  generate->add_option("--quantity-p", gen.profile.quantity_geometric_p, "Geometric p of units per line")
      ->capture_default_str();
  generate->add_option("--skew", gen.profile.popularity_skew, "Zipf exponent of product popularity")
      ->capture_default_str();
  generate->add_option("--purchases", gen.purchases, "Purchase log CSV used instead of the synthetic one")
      ->check(CLI::ExistingFile);
  generate->add_option("--log-out", gen.log_out, "Also write the purchase log as CSV");
  generate->add_option("--manifest", manifest, "Manifest path (default: <out>.manifest.json)");

  std::string import_in, import_out;
  auto* import = app.add_subcommand("import", "Validate a canonical instance file and print its features");
  import->add_option("input", import_in, "Instance JSON")->required()->check(CLI::ExistingFile);
  import->add_option("--out,-o", import_out, "Rewrite in canonical form");
  import->add_option("--manifest", manifest, "Manifest path (default: <out>.manifest.json)");

  std::string info_in;
  auto* info = app.add_subcommand("info", "Print instance features");
  info->add_option("input", info_in, "Instance JSON")->required()->check(CLI::ExistingFile);

  SolveOptions so;
  auto* solve = app.add_subcommand("solve", "Solve batching and routing jointly by branch and cut");
  solve->add_option("--instance,-i", so.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  solve->add_option("--mode", so.mode, "ibc or fbc")->check(CLI::IsMember({"ibc", "fbc"}))->capture_default_str();
  solve->add_option("--families", so.families, "all, none, or a comma list of DIR,FCAV,CA,A,SUB,AVR,PT")
      ->capture_default_str();
  solve->add_flag("--no-reversal", so.no_reversal, "Forbid turning inside a subaisle");
  solve->add_flag("--no-symmetry", so.no_symmetry, "Drop the symmetry-breaking rows");
  solve->add_flag("--no-warm-start", so.no_warm_start, "Skip the savings start solution");
  solve->add_option("--warm-start", so.warm_start, "Solution JSON used as the start")->check(CLI::ExistingFile);
  solve->add_option("--time-limit", so.time_limit, "Seconds")->check(CLI::PositiveNumber)->capture_default_str();
  solve->add_option("--backend-option", so.backend_options, "key=value passed to the MILP backend");
  solve->add_option("--out,-o", so.out, "Solution JSON (default: <instance>.solution.json)");
  solve->add_option("--csv", so.csv, "Append the benchmark row to this CSV");
  solve->add_option("--lp", so.lp, "Write the initial model in LP format");
  solve->add_option("--cut-log", so.cut_log, "Write every separated connectivity row");
  solve->add_option("--manifest", manifest, "Manifest path (default: <out>.manifest.json)");

  RouteOptions ro;
  auto* route = app.add_subcommand("route", "Route one batch of orders");
  route->add_option("--instance,-i", ro.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  route->add_option("--orders", ro.orders, "Order indices (default: all)")->delimiter(',');
  route->add_option("--estimator", ro.estimator,
                    "exact, s-shape, largest-gap, combined, combined-plus or portfolio")
      ->capture_default_str();
  route->add_option("--time-limit", ro.time_limit, "Seconds for the exact router")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  route->add_option("--out,-o", ro.out, "Route JSON (default: <instance>.route.json)");
  route->add_option("--manifest", manifest, "Manifest path (default: <out>.manifest.json)");

  BatchOptions bo;
  auto* batch = app.add_subcommand("batch", "Savings batching followed by routing");
  batch->add_option("--instance,-i", bo.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  batch->add_option("--variant", bo.variant, "i, ii, iii or all")
      ->check(CLI::IsMember({"i", "ii", "iii", "all"}))
      ->capture_default_str();
  batch->add_option("--time-limit", bo.time_limit, "Seconds per exact route")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  batch->add_option("--out,-o", bo.out, "Solution JSON (default: <instance>.batch.json)");
  batch->add_option("--csv", bo.csv, "Append result rows to this CSV");
  batch->add_option("--manifest", manifest, "Manifest path (default: <out>.manifest.json)");

  AblateOptions ao;
  auto* ablate = app.add_subcommand("ablate", "Solve with each inequality group removed in turn");
  ablate->add_option("--instance,-i", ao.instances, "Instance JSON files")->required()->check(CLI::ExistingFile);
  ablate->add_option("--mode", ao.mode, "ibc or fbc")->check(CLI::IsMember({"ibc", "fbc"}))->capture_default_str();
  ablate->add_option("--time-limit", ao.time_limit, "Seconds per solve")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ablate->add_option("--csv", ao.csv, "Result CSV")->required();
  ablate->add_option("--manifest", manifest, "Manifest path (default: <csv>.manifest.json)");

  TradeoffOptions to;
  auto* tradeoff = app.add_subcommand("tradeoff", "Rolling window of K orders per trolley decision");
  tradeoff->add_option("--instance,-i", to.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  tradeoff->add_option("--k", to.k, "Window sizes (default: all orders)")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  tradeoff->add_option("--time-limit", to.time_limit, "Seconds per window solve")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tradeoff->add_option("--csv", to.csv, "Result CSV")->required();
  tradeoff->add_option("--manifest", manifest, "Manifest path (default: <csv>.manifest.json)");

  RenderOptions rdo;
  auto* render = app.add_subcommand("render", "Draw the layout and optional walks as SVG");
  render->add_option("--instance,-i", rdo.instance, "Instance JSON")->required()->check(CLI::ExistingFile);
  render->add_option("--solution,-s", rdo.solution, "Solution JSON")->check(CLI::ExistingFile);
  render->add_option("--out,-o", rdo.out, "SVG file")->required();
  render->add_option("--manifest", manifest, "Manifest path (default: <out>.manifest.json)");

  CLI11_PARSE(app, argc, argv);

  jobprp::RunManifest m;
  m.argv.assign(argv, argv + argc);
  try {
    if (generate->parsed()) {
      m.command = "generate";
      m.config = layout_snapshot(gen);
      m.config["profile"] = {{"customers", gen.profile.num_customers},
                             {"max_purchases", gen.profile.purchases_per_customer_max},
                             {"span_days", gen.profile.span_days},
                             {"products_p", gen.profile.products_geometric_p},
                             {"quantity_p", gen.profile.quantity_geometric_p},
                             {"skew", gen.profile.popularity_skew}};
      m.config["purchases"] = gen.purchases;
      return cmd_generate(gen, m, manifest);
    }
    if (import->parsed()) {
      m.command = "import";
      return cmd_import(import_in, import_out, m, manifest);
    }
    if (info->parsed()) return cmd_info(info_in);
    if (solve->parsed()) {
      m.command = "solve";
      m.config = {{"mode", so.mode},
                  {"families", so.families},
                  {"no_reversal", so.no_reversal},
                  {"symmetry", !so.no_symmetry},
                  {"heuristic_start", !so.no_warm_start},
                  {"time_limit", so.time_limit},
                  {"backend_options", so.backend_options}};
      return cmd_solve(so, m, manifest);
    }
    if (route->parsed()) {
      m.command = "route";
      m.config = {{"orders", ro.orders}, {"estimator", ro.estimator}, {"time_limit", ro.time_limit}};
      return cmd_route(ro, m, manifest);
    }
    if (batch->parsed()) {
      m.command = "batch";
      m.config = {{"variant", bo.variant}, {"time_limit", bo.time_limit}};
      return cmd_batch(bo, m, manifest);
    }
    if (ablate->parsed()) {
      m.command = "ablate";
      m.config = {{"mode", ao.mode}, {"time_limit", ao.time_limit}};
      return cmd_ablate(ao, m, manifest);
    }
    if (tradeoff->parsed()) {
      m.command = "tradeoff";
      m.config = {{"k", to.k}, {"time_limit", to.time_limit}};
      return cmd_tradeoff(to, m, manifest);
    }
    if (render->parsed()) {
      m.command = "render";
      return cmd_render(rdo, m, manifest);
    }
  } catch (const jobprp::Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const jobprp::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
