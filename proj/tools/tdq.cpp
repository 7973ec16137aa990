#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "tdq/experiments.hpp"
#include "tdq/gluing.hpp"
#include "tdq/half_edge_map.hpp"
#include "tdq/peeling.hpp"
#include "tdq/simple_core.hpp"
#include "tdq/tree_sampler.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// Artifacts are written to a temporary file in the target directory and
// renamed into place, so readers never observe partial output.
void write_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw tdq::Error("cannot open output file " + tmp.string());
    os << content;
    if (!os) throw tdq::Error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw tdq::ParseError("cannot open input file " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Run {
  std::string command;
  json parameters = json::object();
  std::uint64_t seed = 0;
  bool seeded = false;
  std::int32_t threads = 1;
  fs::path out_dir;
  std::vector<std::pair<std::string, std::string>> artifacts;  // name -> content

  void artifact(const std::string& name, std::string content) {
    artifacts.emplace_back(name, std::move(content));
  }

  // The manifest echoes the effective configuration and the code version.
  void flush() {
    fs::create_directories(out_dir);
    json manifest;
    manifest["command"] = command;
    manifest["parameters"] = parameters;
    if (seeded) manifest["seed"] = seed;
    manifest["threads"] = threads;
    manifest["version"] = kVersion;
    json files = json::array();
    for (const auto& [name, content] : artifacts) files.push_back(name);
    manifest["artifacts"] = files;
    for (const auto& [name, content] : artifacts) write_atomic(out_dir / name, content);
    write_atomic(out_dir / "manifest.json", manifest.dump(2) + "\n");
  }
};

std::string hemap_string(const tdq::HalfEdgeMap& m, const std::vector<std::int32_t>& marked = {},
                         const std::vector<std::int32_t>& boundary = {}) {
  std::ostringstream os;
  tdq::write_hemap(os, m, marked, boundary);
  return os.str();
}

tdq::SimpleBoundaryQuad read_quad(const std::string& path) {
  std::istringstream is(read_file(path));
  tdq::HemapFile h = tdq::read_hemap(is);
  tdq::SimpleBoundaryQuad q = tdq::detail::make_simple(std::move(h.map));
  if (!q.simple) throw tdq::InadmissibleParameters("quad in " + path + " has a pinched boundary");
  return q;
}

std::string csv_row(std::initializer_list<double> vals) {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (double v : vals) {
    if (!first) os << ',';
    os << v;
    first = false;
  }
  os << '\n';
  return os.str();
}

json fit_json(const tdq::TailFit& f) {
  return json{{"exponent", f.exponent},
              {"ci_low", f.ci_low},
              {"ci_high", f.ci_high},
              {"method", f.method},
              {"sample_count", f.sample_count}};
}

json series_json(const tdq::ScalingSeries& s) {
  json pts = json::array();
  for (const tdq::ScalingPoint& p : s.points)
    pts.push_back(json{{"f", p.f},
                       {"sigma_realized", p.sigma_realized},
                       {"value", p.value},
                       {"replicates", p.replicates}});
  return json{{"normalization", s.normalization}, {"points", pts}};
}

std::vector<std::int64_t> parse_int_list(const std::string& s) {
  std::vector<std::int64_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stoll(item));
  }
  if (out.empty()) throw tdq::InadmissibleParameters("empty integer list: '" + s + "'");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tree-decorated quadrangulation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file (command-line flags win)");
  app.allow_config_extras(CLI::config_extras_mode::error);  // unknown keys are rejected

  Run run;
  std::string out_dir = ".";
  auto* seed_opt =
      app.add_option("--seed", run.seed, "RNG seed (required for stochastic commands)");
  app.add_option("--threads", run.threads, "worker threads (results are thread-count invariant)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", out_dir, "output directory")->capture_default_str();

  // sample-tree
  std::int32_t tree_size = 10;
  std::int64_t tree_count = 1;
  auto* c_tree = app.add_subcommand("sample-tree", "uniform plane trees, parens output");
  c_tree->add_option("--size", tree_size, "number of edges")->required()->check(
      CLI::PositiveNumber);
  c_tree->add_option("--count", tree_count, "number of trees")->check(CLI::PositiveNumber);

  // sample-quad
  std::int32_t quad_f = 0, quad_l = 1;
  double quad_window = 0.25;
  auto* c_quad = app.add_subcommand("sample-quad", "uniform simple-boundary quadrangulation");
  c_quad->add_option("--faces", quad_f, "internal faces")->required();
  c_quad->add_option("--perimeter", quad_l, "half-perimeter (boundary length 2l)")->required();
  c_quad->add_option("--window", quad_window, "relative acceptance window on (faces, perimeter)")
      ->capture_default_str();

  // glue
  std::string glue_quad, glue_tree;
  auto* c_glue = app.add_subcommand("glue", "fold a tree onto a simple boundary");
  c_glue->add_option("--quad", glue_quad, "HEMAP quad file")->required();
  c_glue->add_option("--tree", glue_tree, "parens tree file")->required();

  // cut
  std::string cut_file;
  auto* c_cut = app.add_subcommand("cut", "invert the gluing on a decorated map");
  c_cut->add_option("--decorated", cut_file, "HEMAP file with marked tree half-edges")
      ->required();

  // peel
  std::int64_t peel_f = 20000;
  std::int32_t peel_spine = 10, peel_start = 1;
  auto* c_peel = app.add_subcommand("peel", "filled-in peeling of one proxy host");
  c_peel->add_option("--faces", peel_f, "host internal faces")->capture_default_str();
  c_peel->add_option("--spine", peel_spine, "decoration spine length")->capture_default_str();
  c_peel->add_option("--start", peel_start, "initial spine reach")->capture_default_str();

  // enumerate
  std::int32_t enum_f = 1, enum_l = 2;
  auto* c_enum = app.add_subcommand("enumerate", "count simple-boundary quadrangulations");
  c_enum->add_option("--faces", enum_f, "internal faces")->required();
  c_enum->add_option("--perimeter", enum_l, "half-perimeter")->required();

  // experiment
  auto* c_exp = app.add_subcommand("experiment", "statistical experiments");
  c_exp->require_subcommand(1);

  std::int64_t ov_f = 100000, ov_reps = 1000;
  std::int32_t ov_l = 949;
  auto* e_ov = c_exp->add_subcommand("overshoot", "boundary overshoot tails");
  e_ov->add_option("--f", ov_f, "internal faces")->capture_default_str();
  e_ov->add_option("--l", ov_l, "half-perimeter")->capture_default_str();
  e_ov->add_option("--replicates", ov_reps, "pooled probes")->capture_default_str();

  std::string di_grid = "1000,10000,100000";
  double di_sigma = 1.0, di_alpha = 2.0;
  std::int64_t di_reps = 50;
  auto* e_di = c_exp->add_subcommand("diameter", "decoration diameter scaling");
  e_di->add_option("--f", di_grid, "comma-separated f grid")->capture_default_str();
  e_di->add_option("--sigma", di_sigma, "boundary scale k = sigma sqrt(f)")
      ->capture_default_str();
  e_di->add_option("--alpha", di_alpha, "log exponent of the lower bound")
      ->capture_default_str();
  e_di->add_option("--replicates", di_reps, "replicates per f")->capture_default_str();

  std::string su_grid = "5,10,20,40";
  std::int32_t su_spine = 44;
  std::int64_t su_reps = 50;
  auto* e_su = c_exp->add_subcommand("subadditive", "spine distance constant");
  e_su->add_option("--n", su_grid, "comma-separated spine positions")->capture_default_str();
  e_su->add_option("--spine", su_spine, "host spine length")->capture_default_str();
  e_su->add_option("--replicates", su_reps, "replicates")->capture_default_str();

  std::string rn_ks = "50,100,200";
  double rn_gamma = 0.25, rn_sigma = 1.0, rn_alpha = 0.1;
  auto* e_rn = c_exp->add_subcommand("rn", "Radon-Nikodym bounds");
  e_rn->add_option("--k", rn_ks, "comma-separated tree sizes")->capture_default_str();
  e_rn->add_option("--gamma", rn_gamma, "unexplored fraction")->capture_default_str();
  e_rn->add_option("--sigma", rn_sigma, "boundary scale")->capture_default_str();
  e_rn->add_option("--alpha", rn_alpha, "macroscopic-event parameter")->capture_default_str();

  std::int32_t dk_small = 2000, dk_large = 8000;
  std::int64_t dk_samples = 10000;
  auto* e_dk = c_exp->add_subcommand("donsker", "contour maxima scale stability");
  e_dk->add_option("--k-small", dk_small, "smaller tree size")->capture_default_str();
  e_dk->add_option("--k-large", dk_large, "larger tree size")->capture_default_str();
  e_dk->add_option("--samples", dk_samples, "samples per scale")->capture_default_str();

  std::int64_t pt_f = 100000, pt_hosts = 150;
  std::int32_t pt_spine = 15;
  auto* e_pt = c_exp->add_subcommand("peel-tail", "peeling increment tails");
  e_pt->add_option("--f", pt_f, "host internal faces")->capture_default_str();
  e_pt->add_option("--spine", pt_spine, "host spine length")->capture_default_str();
  e_pt->add_option("--hosts", pt_hosts, "independent hosts")->capture_default_str();

  // Let --seed/--threads/--out appear after the subcommand as well.
  for (CLI::App* s : app.get_subcommands(nullptr)) {
    s->fallthrough();
    for (CLI::App* ss : s->get_subcommands(nullptr)) ss->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  run.out_dir = out_dir;
  run.seeded = seed_opt->count() > 0;

  try {
    CLI::App* sub = app.get_subcommands().front();
    CLI::App* exp = c_exp->parsed() ? c_exp->get_subcommands().front() : nullptr;
    run.command = sub->get_name() + (exp ? " " + exp->get_name() : "");

    bool stochastic = c_tree->parsed() || c_quad->parsed() || c_peel->parsed() ||
                      (exp != nullptr && exp != e_rn);
    if (stochastic && !run.seeded)
      throw tdq::InadmissibleParameters("--seed is required for stochastic commands");

    if (c_tree->parsed()) {
      run.parameters = {{"size", tree_size}, {"count", tree_count}};
      std::string out;
      for (std::int64_t i = 0; i < tree_count; ++i) {
        tdq::Rng rng = tdq::substream(run.seed, static_cast<std::uint64_t>(i));
        out += tdq::to_parens(tdq::sample_uniform_tree(tree_size, rng)) + "\n";
      }
      run.artifact("trees.paren", out);
    } else if (c_quad->parsed()) {
      run.parameters = {{"faces", quad_f}, {"perimeter", quad_l}, {"window", quad_window}};
      tdq::Rng rng = tdq::substream(run.seed, 0);
      tdq::SimpleSampleResult s =
          tdq::sample_simple_boundary_quad(quad_f, quad_l, quad_window, rng);
      run.parameters["realized_faces"] = s.quad.internal_faces;
      run.parameters["realized_perimeter"] = s.quad.half_perimeter();
      run.artifact("quad.hemap", hemap_string(s.quad.map, {}, s.quad.boundary));
    } else if (c_glue->parsed()) {
      run.parameters = {{"quad", glue_quad}, {"tree", glue_tree}};
      tdq::SimpleBoundaryQuad q = read_quad(glue_quad);
      std::string parens = read_file(glue_tree);
      while (!parens.empty() && (parens.back() == '\n' || parens.back() == '\r'))
        parens.pop_back();
      tdq::PlaneTree t = tdq::tree_from_parens(parens);
      auto [d, cert] = tdq::glue(q, t);
      run.parameters["classes"] = cert.class_count;
      run.artifact("decorated.hemap", hemap_string(d.map, d.tree_half_edges));
    } else if (c_cut->parsed()) {
      run.parameters = {{"decorated", cut_file}};
      std::istringstream is(read_file(cut_file));
      tdq::HemapFile h = tdq::read_hemap(is);
      tdq::TreeDecoratedQuad d;
      d.map = std::move(h.map);
      d.tree_half_edges = std::move(h.marked);
      auto [q, t] = tdq::cut(d);
      run.artifact("quad.hemap", hemap_string(q.map, {}, q.boundary));
      run.artifact("tree.paren", tdq::to_parens(t) + "\n");
    } else if (c_peel->parsed()) {
      run.parameters = {{"faces", peel_f}, {"spine", peel_spine}, {"start", peel_start}};
      tdq::Rng rng = tdq::substream(run.seed, 0);
      std::shared_ptr<const tdq::PeelingHost> host =
          tdq::sample_itq_proxy_host(peel_f, peel_spine, rng);
      tdq::PeelingState state = tdq::init_peeling(host, peel_start);
      std::string csv = "layer,spine_reach,increment,frontier,filled\n";
      auto count_filled = [&](const tdq::PeelingState& s) {
        std::int64_t n = 0;
        for (char c : s.filled) n += c != 0;
        return n;
      };
      csv += csv_row({0.0, static_cast<double>(state.spine_reach), 0.0,
                      static_cast<double>(state.frontier.size()),
                      static_cast<double>(count_filled(state))});
      for (;;) {
        tdq::PeelingState prev = state;
        try {
          state = tdq::peel_step(state);
        } catch (const tdq::Exhausted&) {
          break;
        }
        csv += csv_row({static_cast<double>(state.layer),
                        static_cast<double>(state.spine_reach),
                        static_cast<double>(state.spine_reach - prev.spine_reach),
                        static_cast<double>(state.frontier.size()),
                        static_cast<double>(count_filled(state))});
      }
      run.artifact("peel.csv", csv);
    } else if (c_enum->parsed()) {
      run.parameters = {{"faces", enum_f}, {"perimeter", enum_l}};
      std::size_t n = tdq::enumerate_simple_boundary_quads(enum_f, enum_l).size();
      std::cout << "count " << n << "\n";
      json j{{"faces", enum_f}, {"perimeter", enum_l}, {"count", n}};
      run.artifact("count.json", j.dump(2) + "\n");
    } else if (exp == e_ov) {
      run.parameters = {{"f", ov_f}, {"l", ov_l}, {"replicates", ov_reps}};
      tdq::OvershootExperiment ov =
          tdq::overshoot_experiment(ov_f, ov_l, ov_reps, run.seed, run.threads);
      json report{{"command", run.command}, {"parameters", run.parameters},
                  {"seed", run.seed},       {"version", kVersion},
                  {"window", ov.window},    {"quads", ov.quads},
                  {"fits",
                   {{"simple", fit_json(ov.simple_fit)},
                    {"infinite", fit_json(ov.infinite_fit)}}},
                  {"pass",
                   {{"simple_exponent_in_band", ov.simple_fit.exponent >= -1.8 &&
                                                    ov.simple_fit.exponent <= -1.2},
                    {"infinite_exponent_in_band", ov.infinite_fit.exponent >= -0.75 &&
                                                      ov.infinite_fit.exponent <= -0.3},
                    {"dominance", ov.dominance_ok}}}};
      run.artifact("report.json", report.dump(2) + "\n");
      std::string csv = "sample,simple_overshoot,infinite_overshoot\n";
      for (std::size_t i = 0; i < ov.simple_samples.size(); ++i)
        csv += csv_row({static_cast<double>(i), ov.simple_samples[i], ov.infinite_samples[i]});
      run.artifact("overshoot.csv", csv);
    } else if (exp == e_di) {
      std::vector<std::int64_t> grid = parse_int_list(di_grid);
      run.parameters = {{"f", di_grid},
                        {"sigma", di_sigma},
                        {"alpha", di_alpha},
                        {"replicates", di_reps}};
      tdq::DiameterExperiment de =
          tdq::diameter_experiment(grid, di_sigma, di_alpha, di_reps, run.seed, run.threads);
      json report{{"command", run.command},
                  {"parameters", run.parameters},
                  {"seed", run.seed},
                  {"version", kVersion},
                  {"series",
                   {{"median_normalized", series_json(de.median_normalized)},
                    {"log_adjusted", series_json(de.log_adjusted)},
                    {"lower_bound_fraction", series_json(de.lower_bound_fraction)}}},
                  {"pass",
                   {{"median_strictly_decreasing", de.monotone_decreasing},
                    {"lower_bound_95pct", de.lower_bound_ok},
                    {"tree_dominance", de.tree_dominance_ok}}}};
      run.artifact("report.json", report.dump(2) + "\n");
      std::string csv = "f,sigma_realized,median_normalized,log_adjusted,lower_fraction\n";
      for (std::size_t i = 0; i < de.median_normalized.points.size(); ++i)
        csv += csv_row({de.median_normalized.points[i].f,
                        de.median_normalized.points[i].sigma_realized,
                        de.median_normalized.points[i].value, de.log_adjusted.points[i].value,
                        de.lower_bound_fraction.points[i].value});
      run.artifact("diameter.csv", csv);
    } else if (exp == e_su) {
      std::vector<std::int64_t> grid64 = parse_int_list(su_grid);
      std::vector<std::int32_t> grid(grid64.begin(), grid64.end());
      run.parameters = {{"n", su_grid}, {"spine", su_spine}, {"replicates", su_reps}};
      tdq::SubadditiveExperiment se =
          tdq::subadditive_experiment(grid, su_spine, su_reps, run.seed, run.threads);
      bool decreasing = true;
      for (std::size_t i = 1; i < se.median_normalized.points.size(); ++i)
        if (se.median_normalized.points[i].value > se.median_normalized.points[i - 1].value)
          decreasing = false;
      json report{{"command", run.command},
                  {"parameters", run.parameters},
                  {"seed", run.seed},
                  {"version", kVersion},
                  {"series", {{"median_normalized", series_json(se.median_normalized)}}},
                  {"pass",
                   {{"bounded_by_one", se.bounded_by_one},
                    {"triangle_identity", se.triangle_ok},
                    {"median_decreasing", decreasing}}}};
      run.artifact("report.json", report.dump(2) + "\n");
      std::string csv = "n,median_normalized\n";
      for (const tdq::ScalingPoint& p : se.median_normalized.points)
        csv += csv_row({p.f, p.value});
      run.artifact("subadditive.csv", csv);
    } else if (exp == e_rn) {
      std::vector<std::int64_t> ks = parse_int_list(rn_ks);
      run.parameters = {
          {"k", rn_ks}, {"gamma", rn_gamma}, {"sigma", rn_sigma}, {"alpha", rn_alpha}};
      json rows = json::array();
      bool all_ok = true;
      std::string csv = "k,tree_ratio,tree_bound,map_chain_max,map_bound\n";
      for (std::int64_t k : ks) {
        tdq::RnReport rn = tdq::rn_bound_check(static_cast<std::int32_t>(k), rn_gamma,
                                               rn_sigma, rn_alpha);
        all_ok = all_ok && rn.tree_ok && rn.map_ok;
        rows.push_back(json{{"k", k},
                            {"tree_ratio", rn.tree_ratio},
                            {"tree_bound", rn.tree_bound},
                            {"tree_ok", rn.tree_ok},
                            {"map_chain_max", rn.map_chain_max},
                            {"map_bound", rn.map_bound},
                            {"map_ok", rn.map_ok}});
        csv += csv_row({static_cast<double>(k), rn.tree_ratio, rn.tree_bound, rn.map_chain_max,
                        rn.map_bound});
      }
      json report{{"command", run.command},
                  {"parameters", run.parameters},
                  {"version", kVersion},
                  {"results", rows},
                  {"pass", {{"all_bounds_hold", all_ok}}}};
      run.artifact("report.json", report.dump(2) + "\n");
      run.artifact("rn.csv", csv);
    } else if (exp == e_dk) {
      run.parameters = {
          {"k_small", dk_small}, {"k_large", dk_large}, {"samples", dk_samples}};
      tdq::Rng rng = tdq::substream(run.seed, 0);
      double ks = tdq::donsker_diagnostic(dk_small, dk_large, dk_samples, rng);
      json report{{"command", run.command},
                  {"parameters", run.parameters},
                  {"seed", run.seed},
                  {"version", kVersion},
                  {"ks_distance", ks},
                  {"pass", {{"ks_below_0.05", ks < 0.05}}}};
      run.artifact("report.json", report.dump(2) + "\n");
      run.artifact("donsker.csv", "k_small,k_large,samples,ks\n" +
                                      csv_row({static_cast<double>(dk_small),
                                               static_cast<double>(dk_large),
                                               static_cast<double>(dk_samples), ks}));
    } else if (exp == e_pt) {
      run.parameters = {{"f", pt_f}, {"spine", pt_spine}, {"hosts", pt_hosts}};
      tdq::PeelTailExperiment pt =
          tdq::peel_tail_experiment(pt_f, pt_spine, pt_hosts, run.seed, run.threads);
      json report{{"command", run.command},
                  {"parameters", run.parameters},
                  {"seed", run.seed},
                  {"version", kVersion},
                  {"pooled_increments", pt.pooled.increments.size()},
                  {"slope", pt.slope},
                  {"sup_a_ccdf", pt.sup_a_ccdf},
                  {"sup_a_ccdf_half_pool", pt.sup_a_ccdf_half},
                  {"pass",
                   {{"ball_containment", pt.ball_containment_ok},
                    {"slope_in_band", pt.slope >= -1.6 && pt.slope <= -0.8},
                    {"sup_stable_x2", pt.stable}}}};
      run.artifact("report.json", report.dump(2) + "\n");
      std::string csv = "a,ccdf,a_times_ccdf\n";
      for (const tdq::CcdfRow& row : pt.table)
        csv += csv_row({static_cast<double>(row.a), row.ccdf, row.a_times_ccdf});
      run.artifact("peel_tail.csv", csv);
    }
    run.flush();
  } catch (const tdq::InadmissibleParameters& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const tdq::SizeMismatch& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const tdq::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const tdq::DecorationNotATree& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const tdq::WindowTooShort& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
