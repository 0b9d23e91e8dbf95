// evgraph: generate, replay, analyze and render dynamic graph event traces.

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "evgraph/commands.hpp"

namespace {

using namespace evgraph;

// Opens `path` for reading, "-" meaning standard input.
std::istream* open_input(const std::string& path, std::unique_ptr<std::ifstream>& holder) {
  if (path == "-") return &std::cin;
  holder = std::make_unique<std::ifstream>(path, std::ios::binary);
  if (!*holder) {
    std::cerr << "error: cannot open '" << path << "'\n";
    return nullptr;
  }
  return holder.get();
}

std::ostream* open_output(const std::string& path, std::unique_ptr<std::ofstream>& holder) {
  if (path.empty() || path == "-") return &std::cout;
  holder = std::make_unique<std::ofstream>(path, std::ios::binary);
  if (!*holder) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return nullptr;
  }
  return holder.get();
}

int finish_output(std::ostream& out, int rc) {
  out.flush();
  if (rc == cli::kOk && !out) {
    std::cerr << "error: write failed\n";
    return cli::kInput;
  }
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic graph event streams: generators, replay, connectivity, spanning forests, SVG"};
  app.require_subcommand(1);

  // generate ---------------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Write a generated graph as a DGS trace");
  std::string family;
  GeneratorSpec spec;
  std::string gen_out, gen_name = "generated";
  gen->add_option("family", family, "grid | torus | random | preferential")
      ->required()
      ->check(CLI::IsMember({"grid", "torus", "random", "preferential"}));
  gen->add_option("--rows", spec.rows, "Rows (grid, torus)");
  gen->add_option("--cols", spec.cols, "Columns (grid, torus)");
  gen->add_option("--n", spec.nodes, "Node count (random, preferential)");
  gen->add_option("--p", spec.probability, "Edge probability (random)");
  gen->add_option("--k", spec.per_node, "Edges per new node (preferential)");
  gen->add_option("--seed", spec.seed, "Random seed");
  gen->add_option("--name", gen_name, "Graph name written in the header");
  gen->add_option("-o,--out", gen_out, "Output file (default: stdout)");

  // replay -----------------------------------------------------------------
  auto* rep = app.add_subcommand("replay", "Replay a trace into a graph and print a summary");
  std::string rep_in;
  cli::ReplayOptions rep_opts;
  rep->add_option("input", rep_in, "DGS file, or - for stdin")->required();
  rep->add_flag("--strict", rep_opts.strict, "Abort on the first invalid event");
  rep->add_flag("--stats", rep_opts.stats, "Also print component and degree figures");

  // components -------------------------------------------------------------
  auto* comp = app.add_subcommand("components", "Connected component count while replaying");
  std::string comp_in;
  bool per_step = false;
  comp->add_option("input", comp_in, "DGS file, or - for stdin")->required();
  comp->add_flag("--per-step", per_step, "One row per step instead of only the final count");

  // forest -----------------------------------------------------------------
  auto* fst = app.add_subcommand("forest", "Run the token spanning forest and export tree metrics");
  std::string fst_in, fst_metrics;
  bool use_mobility = false;
  MobilityConfig mob;
  mob.stations = 30;
  mob.ticks = 200;
  cli::ForestOptions fst_opts;
  fst->add_option("input", fst_in, "DGS file, or - for stdin");
  fst->add_flag("--mobility", use_mobility, "Use the built-in random waypoint source instead of a file");
  fst->add_option("--stations", mob.stations, "Mobility: station count")->capture_default_str();
  fst->add_option("--width", mob.width, "Mobility: arena width (m)")->capture_default_str();
  fst->add_option("--height", mob.height, "Mobility: arena height (m)")->capture_default_str();
  fst->add_option("--radius", mob.radius, "Mobility: communication range (m)")->capture_default_str();
  fst->add_option("--vmin", mob.v_min, "Mobility: minimum speed (m/tick)")->capture_default_str();
  fst->add_option("--vmax", mob.v_max, "Mobility: maximum speed (m/tick)")->capture_default_str();
  fst->add_option("--ticks", mob.ticks, "Mobility: number of ticks")->capture_default_str();
  fst->add_option("--mobility-seed", mob.seed, "Mobility: random seed");
  fst->add_option("--steps-per-tick", fst_opts.steps_per_tick, "Forest rounds after each step")
      ->capture_default_str();
  fst->add_option("--seed", fst_opts.seed, "Forest random seed");
  fst->add_option("--metrics", fst_metrics, "CSV output for tree metrics");

  // render -----------------------------------------------------------------
  auto* ren = app.add_subcommand("render", "Render a snapshot of a trace as SVG");
  std::string ren_in, ren_out;
  cli::RenderOptions ren_opts;
  double at = 0;
  ren->add_option("input", ren_in, "DGS file, or - for stdin")->required();
  auto* at_opt = ren->add_option("--at", at, "Render the state at the end of this step (default: last)");
  ren->add_option("--canvas-width", ren_opts.spec.width, "Canvas width (px)")->capture_default_str();
  ren->add_option("--canvas-height", ren_opts.spec.height, "Canvas height (px)")->capture_default_str();
  ren->add_option("--iterations", ren_opts.spec.iterations, "Layout iterations")->capture_default_str();
  ren->add_option("--node-radius", ren_opts.spec.node_radius, "Node radius (px)")->capture_default_str();
  ren->add_option("--layout-seed", ren_opts.spec.seed, "Initial layout seed");
  ren->add_flag("--forest", ren_opts.forest, "Run the spanning forest and style tree edges and tokens");
  ren->add_option("--steps-per-tick", ren_opts.forest_opts.steps_per_tick, "Forest rounds after each step")
      ->capture_default_str();
  ren->add_option("--seed", ren_opts.forest_opts.seed, "Forest random seed");
  ren->add_option("-o,--out", ren_out, "Output SVG file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::kOk : cli::kUsage;
  }

  std::unique_ptr<std::ifstream> in_holder;
  std::unique_ptr<std::ofstream> out_holder, csv_holder;

  if (*gen) {
    if (family == "grid") spec.family = GeneratorFamily::grid;
    if (family == "torus") spec.family = GeneratorFamily::torus;
    if (family == "random") spec.family = GeneratorFamily::random;
    if (family == "preferential") spec.family = GeneratorFamily::preferential;
    if (!is_valid_identifier(gen_name)) {
      std::cerr << "error: invalid graph name '" << gen_name << "'\n";
      return cli::kUsage;
    }
    std::ostream* out = open_output(gen_out, out_holder);
    if (out == nullptr) return cli::kInput;
    return finish_output(*out, cli::cmd_generate(spec, gen_name, *out, std::cerr));
  }

  if (*rep) {
    std::istream* in = open_input(rep_in, in_holder);
    if (in == nullptr) return cli::kInput;
    return cli::cmd_replay(*in, rep_opts, std::cout, std::cerr);
  }

  if (*comp) {
    std::istream* in = open_input(comp_in, in_holder);
    if (in == nullptr) return cli::kInput;
    return cli::cmd_components(*in, per_step, std::cout, std::cerr);
  }

  if (*fst) {
    if (use_mobility == !fst_in.empty()) {
      std::cerr << "error: give either an input file or --mobility\n";
      return cli::kUsage;
    }
    std::ostream* csv = nullptr;
    if (!fst_metrics.empty()) {
      csv = open_output(fst_metrics, csv_holder);
      if (csv == nullptr) return cli::kInput;
    }
    int rc;
    if (use_mobility) {
      std::unique_ptr<MobilitySource> src;
      try {
        src = std::make_unique<MobilitySource>(mob);
      } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kUsage;
      }
      rc = cli::cmd_forest(*src, fst_opts, csv, std::cout, std::cerr);
    } else {
      std::istream* in = open_input(fst_in, in_holder);
      if (in == nullptr) return cli::kInput;
      DgsReader reader(*in);
      rc = cli::cmd_forest(reader, fst_opts, csv, std::cout, std::cerr, &reader);
    }
    return csv != nullptr ? finish_output(*csv, rc) : rc;
  }

  if (*ren) {
    if (*at_opt) ren_opts.at = at;
    std::istream* in = open_input(ren_in, in_holder);
    if (in == nullptr) return cli::kInput;
    std::ostream* out = open_output(ren_out, out_holder);
    if (out == nullptr) return cli::kInput;
    return finish_output(*out, cli::cmd_render(*in, ren_opts, *out, std::cerr));
  }
  return cli::kUsage;
}
