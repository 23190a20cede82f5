#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "compconj/csvio.hpp"
#include "compconj/kconv.hpp"
#include "compconj/qual.hpp"
#include "compconj/scenario.hpp"

namespace {

using namespace compconj;

int emit_report(const RunReport& rep, const std::string& out_path) {
  Json j = rep.to_json();
  if (!out_path.empty()) {
    std::ofstream os(out_path);
    os << j.dump(2) << "\n";
  }
  for (const CheckEntry& c : rep.checks)
    std::cout << (c.pass ? "PASS " : "FAIL ") << rep.scenario << ":" << c.check_id
              << (c.note.empty() ? "" : "  (" + c.note + ")") << "\n";
  std::cout << (rep.all_pass() ? "OK " : "CHECK FAILURES in ") << rep.scenario
            << "  (" << rep.checks.size() << " checks, " << rep.timing_ms
            << " ms)" << "\n";
  return rep.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"compconj: grid-based convex-conjugate toolkit for composite functions"};
  app.require_subcommand(1);

  std::string name, out_path, dump_dir, scenario_path;
  double tol_scale = 1.0;
  std::vector<std::string> overrides;

  auto* ex = app.add_subcommand("example", "run a built-in example scenario");
  ex->add_option("name", name, "one of: ex51 ex51-repaired ex52 ex52-repaired ex53 nonattain-dual nonattain-primal")
      ->required();
  ex->add_option("--out", out_path, "write the JSON report here");
  ex->add_option("--dump-grids", dump_dir, "directory for CSV grid dumps");

  auto* run = app.add_subcommand("run", "run a scenario file");
  run->add_option("scenario", scenario_path, "scenario JSON path")->required();
  run->add_option("--out", out_path, "write the JSON report here");
  run->add_option("--tol-scale", tol_scale, "multiply all check tolerances");
  run->add_option("--grid-override", overrides,
                  "override a grid uniformly, e.g. x:-4:4:41");
  run->add_option("--dump-grids", dump_dir, "directory for CSV grid dumps");

  std::string fn_expr, grid_spec, dual_spec, method = "fast", csv_out;
  auto* conj = app.add_subcommand("conjugate", "conjugate of an expression on a grid");
  conj->add_option("expr", fn_expr, "function expression")->required();
  conj->add_option("--grid", grid_spec, "lo:hi:count[,lo:hi:count...]")->required();
  conj->add_option("--dual-grid", dual_spec, "lo:hi:count[,...]")->required();
  conj->add_option("--method", method, "fast | brute");
  conj->add_option("--out", csv_out, "CSV output path (default stdout)");

  auto* kconv_cmd = app.add_subcommand("kconv", "cone estimates for a scenario");
  kconv_cmd->add_option("scenario", scenario_path, "scenario JSON path")->required();

  auto* qual_cmd = app.add_subcommand("qual", "qualification battery for a scenario");
  qual_cmd->add_option("scenario", scenario_path, "scenario JSON path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    RunOptions opts;
    opts.tol_scale = tol_scale;
    opts.grid_overrides = overrides;
    opts.dump_dir = dump_dir;

    if (ex->parsed()) return emit_report(run_example(name, opts), out_path);
    if (run->parsed()) return emit_report(run_scenario_file(scenario_path, opts), out_path);

    if (conj->parsed()) {
      auto parse_axes = [](const std::string& s) {
        std::vector<Axis> axes;
        std::size_t pos = 0;
        while (pos < s.size()) {
          double lo, hi;
          int count, used = 0;
          if (std::sscanf(s.c_str() + pos, "%lf:%lf:%d%n", &lo, &hi, &count, &used) != 3)
            throw ParseError("bad grid spec '" + s + "'");
          axes.push_back(Axis{lo, hi, count});
          pos += static_cast<std::size_t>(used);
          if (pos < s.size() && s[pos] == ',') ++pos;
        }
        return Grid(axes);
      };
      Grid grid = parse_axes(grid_spec);
      Grid dual = parse_axes(dual_spec);
      GridFn h = sample(FunctionExpr::parse(fn_expr), grid);
      TransformConfig cfg;
      cfg.dual_grid = dual;
      cfg.method = method == "brute" ? TransformMethod::BruteForce
                                     : TransformMethod::FastLLT;
      GridFn star = conjugate(h, cfg);
      if (csv_out.empty()) {
        write_grid_csv(star, std::cout);
      } else {
        write_grid_csv_file(star, csv_out);
      }
      return 0;
    }

    if (kconv_cmd->parsed() || qual_cmd->parsed()) {
      std::ifstream is(scenario_path);
      if (!is) throw ParseError("cannot open " + scenario_path);
      Json spec = Json::parse(is);
      CompositeProblem p = problem_from_spec(spec);
      if (kconv_cmd->parsed()) {
        ConeEstimate kf = k_f_estimate(p.F(), p.x_grid());
        ConeEstimate hz = horizon_cone(p.g_sampled());
        Json j;
        auto rays_json = [](const Cone& c) {
          Json arr = Json::array();
          for (const Vec& r : c.rays()) {
            Json rr = Json::array();
            for (double x : r) rr.push_back(round_sig(x, 6));
            arr.push_back(rr);
          }
          return arr;
        };
        j["K_F"] = Json{{"rays", rays_json(kf.cone)}, {"tag", "estimate"}};
        j["hzn_g"] = Json{{"rays", rays_json(hz.cone)}, {"tag", "estimate"}};
        j["KF_in_minus_hzn"] = cone_subset(kf.cone, hz.cone.negated());
        std::cout << j.dump(2) << "\n";
        return 0;
      }
      std::optional<Cone> k;
      if (spec.contains("cone")) k = cone_from_json(spec["cone"], p.m());
      ConditionReport rep = qualification_battery(p, k);
      Json j = Json::array();
      for (const ConditionEntry& c : rep.entries) {
        j.push_back(Json{{"name", c.name},
                         {"paper_eq", c.eq_tag},
                         {"verdict", c.verdict == 1   ? Json(true)
                                     : c.verdict == 0 ? Json(false)
                                                      : Json("unknown")},
                         {"mode", c.exact ? "exact" : "approximate"},
                         {"witness", c.witness}});
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UnknownExample& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
