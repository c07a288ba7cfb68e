#include <doctest.h>

#include <fstream>
#include <regex>
#include <set>

#include "jobprp/error.hpp"
#include "jobprp/manifest.hpp"
#include "jobprp/oracle.hpp"
#include "jobprp/render.hpp"
#include "support.hpp"

using namespace jobprp;

namespace {

int occurrences(const std::string& text, const std::string& needle) {
  int n = 0;
  for (std::size_t pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("SVG of an instance without a plan") {
  const Instance inst = testing::tiny_instance(3);
  const std::string svg = render_svg(inst);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(occurrences(svg, "class=\"artificial\"") == 9);
  CHECK(occurrences(svg, "class=\"origin\"") == 1);
  CHECK(occurrences(svg, "class=\"location\"") == static_cast<int>(inst.graph.location_vertices().size()));
  CHECK(occurrences(svg, "class=\"rack\"") > 0);
  CHECK(occurrences(svg, "<polyline") == 0);
  CHECK(render_svg(inst) == svg);

  Instance bare = inst;
  bare.layout.reset();
  const std::string no_racks = render_svg(bare);
  CHECK(occurrences(no_racks, "class=\"rack\"") == 0);
  CHECK(occurrences(no_racks, "class=\"artificial\"") == 9);
}

TEST_CASE("SVG walks get one colour per trolley") {
  testing::TinyOptions o;
  o.min_orders = 3;
  o.max_orders = 3;
  o.fixed_fleet = 3;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = testing::tiny_instance(seed, o);
    const OracleResult r = oracle_solve(inst);
    const std::string svg = render_svg(inst, &r.plan);
    int used = 0;
    for (const Walk& w : r.plan.walks) used += !w.empty();
    CHECK(occurrences(svg, "<polyline class=\"walk\"") == used);
    const std::regex stroke(R"re(<polyline class="walk" data-trolley="(\d+)" [^>]*stroke="(#[0-9a-f]{6})")re");
    std::set<std::string> colours;
    std::set<int> trolleys;
    for (auto it = std::sregex_iterator(svg.begin(), svg.end(), stroke); it != std::sregex_iterator(); ++it) {
      trolleys.insert(std::stoi((*it)[1].str()));
      colours.insert((*it)[2].str());
    }
    CHECK(static_cast<int>(colours.size()) == used);
    CHECK(static_cast<int>(trolleys.size()) == used);
    CHECK(render_svg(inst, &r.plan) == svg);
    const Plan empty;
    CHECK(occurrences(render_svg(inst, &empty), "<polyline") == 0);
  }
}

TEST_CASE("FNV-1a hashes") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  const auto path = testing::temp_file("hash.txt");
  {
    std::ofstream out(path);
    out << "foobar";
  }
  CHECK(file_hash(path.string()) == "85944171f73967e8");
  std::filesystem::remove(path);
  CHECK_THROWS_AS(file_hash(path.string()), InvalidInput);
}

TEST_CASE("run manifests") {
  const auto in = testing::temp_file("in.txt");
  const auto out = testing::temp_file("out.txt");
  {
    std::ofstream(in) << "a";
    std::ofstream(out) << "";
  }
  RunManifest m;
  m.command = "solve";
  m.argv = {"jobprp", "solve", in.string()};
  m.config = {{"mode", "ibc"}, {"time_limit", 60.0}};
  m.seed = 42;
  m.versions = library_versions();
  m.add_input(in.string());
  m.add_output(out.string());
  REQUIRE(m.inputs.size() == 1);
  CHECK(m.inputs[0].fnv1a == "af63dc4c8601ec8c");
  CHECK(m.outputs[0].fnv1a == "cbf29ce484222325");
  CHECK(m.versions.count("jobprp") == 1);
  CHECK(m.versions.count("backend") == 1);
  CHECK(m.versions.at("backend").rfind("highs", 0) == 0);

  const nlohmann::json j = m;
  const RunManifest back = j.get<RunManifest>();
  CHECK(back.command == m.command);
  CHECK(back.argv == m.argv);
  CHECK(back.config == m.config);
  CHECK(back.seed == m.seed);
  CHECK(back.versions == m.versions);
  CHECK(nlohmann::json(back) == j);

  RunManifest unseeded;
  unseeded.command = "render";
  CHECK_FALSE(nlohmann::json(unseeded).get<RunManifest>().seed.has_value());

  std::filesystem::remove(out);
  CHECK_THROWS_AS(m.add_output(out.string()), InvalidInput);
  std::filesystem::remove(in);
}
