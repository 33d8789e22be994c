#include <cmath>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "loewner/capacity.hpp"
#include "loewner/coefficients.hpp"
#include "loewner/constructions.hpp"
#include "loewner/diagnostics.hpp"
#include "loewner/io.hpp"
#include "loewner/slit.hpp"
#include "loewner/trace.hpp"
#include "loewner/welding.hpp"

using namespace loewner;
using io::Json;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitConvergence = 4;

int exit_code_for(const std::string& kind) {
  if (kind == "ConvergenceError") return kExitConvergence;
  if (kind == "StepError" || kind == "CollisionError" || kind == "BranchError" ||
      kind == "ResolutionError" || kind == "ExhaustedError" || kind == "PairingError" ||
      kind == "InsufficientData")
    return kExitNumerical;
  return kExitInput;
}

/// Parameters of every command with their defaults. A run config is
/// {"schema_version", "command", "params", "out", "svg"} with params drawn
/// from this table.
Json defaults() {
  Json d;
  d["trace"] = {{"driving", ""}, {"system", ""}, {"steps", 4000}};
  d["drive"] = {{"slit", ""}, {"dcap", 1e-3}};
  d["coeffs"] = {{"slits", ""}, {"tol", 1e-4}, {"verify_steps", 0}};
  d["weld"] = {{"system", ""}, {"grid", "64x64"}, {"pairs", 16}, {"irregular_check", false}};
  d["diag"] = {{"driving", ""}, {"window", 1e-3}, {"smallest_scale", 1e-6}, {"times", Json::array()}};
  d["hcap"] = {{"slit", ""},   {"method", "chain"}, {"dcap", 1e-3},  {"resolution", 1e-3},
               {"seed", 1},    {"walkers", 100000}, {"radius", 0.0}};
  d["steer"] = {{"from", Json::array({0.0, 1.0})}, {"to", Json::array({1.0, 2.0})}, {"samples", 4096}};
  return d;
}

std::string required_path(const Json& p, const char* key) {
  const std::string path = p.value(key, std::string());
  if (path.empty()) throw InputError(std::string("--") + key + " is required");
  return path;
}

Json report_header(const std::string& command) {
  return Json{{"schema_version", io::kSchemaVersion}, {"command", command}};
}

Json numbers(const std::vector<double>& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

Json point(Point z) { return Json::array({z.real(), z.imag()}); }

Point point_from(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw InputError(std::string(what) + " must be x,y");
  return {j[0].get<double>(), j[1].get<double>()};
}

struct Output {
  std::string text;
  std::string svg;
};

Output run_trace(const Json& p) {
  const std::string driving = p.value("driving", std::string());
  const std::string system = p.value("system", std::string());
  if (driving.empty() == system.empty()) throw InputError("give exactly one of --driving and --system");
  const int steps = p.value("steps", 4000);
  if (steps < 1) throw InputError("--steps must be positive");
  TraceOptions options;
  const TraceResult r = driving.empty()
                            ? trace_multi(io::system_from_json(io::read_json(system)), steps, options)
                            : trace_single(io::driving_from_json(io::read_json(driving)), steps, options);
  std::vector<std::vector<Point>> curves;
  for (const auto& c : r.curves) curves.push_back(c.points);
  return {io::trace_csv(r), io::curves_svg(curves)};
}

Output run_drive(const Json& p) {
  const SlitPolyline slit = io::slit_from_json(io::read_json(required_path(p, "slit")));
  const PeelResult peel = drive_from_slit(slit, p.value("dcap", 1e-3));
  Json out = report_header("drive");
  out["hcap"] = 2.0 * peel.parameterized.total;
  out["horizon"] = peel.parameterized.total;
  out["pieces"] = peel.chain.size();
  out["degenerate_start"] = peel.degenerate_start;
  out["driving"] = io::to_json(peel.driving);
  return {io::dump(out), {}};
}

Output run_coeffs(const Json& p) {
  const auto slits = io::slits_from_json(io::read_json(required_path(p, "slits")));
  const CoefficientSolution sol = find_constant_coefficients(slits, p.value("tol", 1e-4));
  Json out = report_header("coeffs");
  // lambdas and drivings sit at the top level so the report doubles as a
  // system file for trace and weld.
  out["lambdas"] = numbers(sol.lambdas);
  Json drivings = Json::array();
  for (const auto& u : sol.drivings) drivings.push_back(io::to_json(u));
  out["drivings"] = std::move(drivings);
  out["horizon"] = sol.horizon;
  out["residuals"] = numbers(sol.residuals);
  out["hcaps"] = numbers(sol.hcaps);
  out["level"] = sol.level;
  out["cycles"] = sol.stats.cycles;
  out["evaluations"] = sol.stats.evaluations;
  if (const int steps = p.value("verify_steps", 0); steps > 0) {
    const VerificationReport v = verify_solution(slits, sol, steps);
    Json bounds = Json::array();
    for (bool b : v.bounds_hold) bounds.push_back(b);
    out["verification"] = {{"steps", steps},
                           {"hausdorff", numbers(v.hausdorff)},
                           {"diameters", numbers(v.diameters)},
                           {"initial_rate", numbers(v.initial_rate)},
                           {"bounds_hold", std::move(bounds)}};
  }
  return {io::dump(out), {}};
}

std::pair<int, int> parse_grid(const std::string& grid) {
  int a = 0, b = 0;
  char x = 0, extra = 0;
  if (std::sscanf(grid.c_str(), "%d%c%d%c", &a, &x, &b, &extra) != 3 || x != 'x' || a < 1 || b < 1)
    throw InputError("--grid must look like 64x64");
  return {a, b};
}

std::string verdict_name(WeldVerdict v) {
  switch (v) {
    case WeldVerdict::Welded: return "Welded";
    case WeldVerdict::NotWelded: return "NotWelded";
    case WeldVerdict::Indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

Output run_weld(const Json& p) {
  const MultiSlitSystem system = io::system_from_json(io::read_json(required_path(p, "system")));
  const auto [times, offsets] = parse_grid(p.value("grid", std::string("64x64")));
  WeldingOptions options;
  options.pairs = p.value("pairs", 16);
  options.irregular_check = p.value("irregular_check", false);
  const WeldingReport r = is_welded(system, times, offsets, options);
  Json out = report_header("weld");
  out["welded"] = r.welded;
  out["verdict"] = verdict_name(r.verdict);
  out["margin"] = r.margin;
  out["margin_floor"] = r.margin_floor;
  out["probes"] = r.probes;
  out["hits"] = r.hits;
  if (r.hits > 0) {
    out["first_hit"] = {{"tau", r.hit_tau}, {"x0", r.hit_x0}, {"time", r.hit_time}, {"driving", r.hit_index}};
  }
  Json pairs = Json::array();
  for (std::size_t k = 0; k < r.pairs.size(); ++k) {
    const auto& w = r.pairs[k];
    Json entry = {{"component", w.component}, {"center", w.center}, {"a", w.a},
                  {"b", w.b},                 {"left", numbers(w.left)}, {"right", numbers(w.right)},
                  {"hit_times", numbers(w.hit_times)}};
    if (k < r.qs_constants.size()) entry["quasisymmetry"] = r.qs_constants[k];
    pairs.push_back(std::move(entry));
  }
  out["pairs"] = std::move(pairs);
  if (!r.irregular.empty()) {
    Json checks = Json::array();
    for (const auto& c : r.irregular)
      checks.push_back({{"holds", c.holds}, {"bands", c.bands}, {"failed_scale", c.failed_scale}});
    out["irregular"] = std::move(checks);
  }
  return {io::dump(out), {}};
}

Output run_diag(const Json& p) {
  const SampledDriving u = io::driving_from_json(io::read_json(required_path(p, "driving")));
  HolderOptions options;
  options.smallest_scale = p.value("smallest_scale", 1e-6);
  options.times = p.value("times", std::vector<double>{});
  const double window = p.value("window", 1e-3);
  if (!(window > 0.0)) throw InputError("--window must be positive");
  const HolderReport r = local_holder_norms(u, window, options);

  HolderVerdict worst = HolderVerdict::Regular;
  Json verdicts = Json::array();
  for (HolderVerdict v : r.verdicts) {
    verdicts.push_back(std::string(to_string(v)));
    worst = std::max(worst, v);
  }
  Json out = report_header("diag");
  out["window"] = window;
  out["smallest_scale"] = r.smallest_scale;
  out["verdict"] = std::string(to_string(worst));
  if (u.size() >= 2 && u.times()[1] > u.times()[0]) {
    const double t1 = u.times()[1] - u.times()[0];
    const double c = (u.values()[1] - u.values()[0]) / std::sqrt(t1);
    out["initial_coefficient"] = c;
    out["approach_angle"] = approach_angle_from_coefficient(c);
  }
  out["times"] = numbers(r.times);
  out["left"] = numbers(r.left);
  out["right"] = numbers(r.right);
  out["two_sided"] = numbers(r.two_sided);
  out["liminf"] = numbers(r.liminf);
  out["limsup"] = numbers(r.limsup);
  out["thresholds"] = numbers(r.thresholds);
  out["verdicts"] = std::move(verdicts);
  return {io::dump(out), {}};
}

Output run_hcap(const Json& p) {
  const Json input = io::read_json(required_path(p, "slit"));
  const bool single = input.is_object() && input.contains("vertices");
  const std::vector<SlitPolyline> slits =
      single ? std::vector<SlitPolyline>{io::slit_from_json(input)} : io::slits_from_json(input);
  const std::string method = p.value("method", std::string("chain"));
  Json out = report_header("hcap");
  out["method"] = method;
  if (method == "chain" || method == "moment") {
    if (slits.size() != 1) throw InputError("--method " + method + " takes a single slit");
    const double dcap = p.value("dcap", 1e-3);
    if (method == "chain") {
      out["hcap"] = hcap_of_slit(slits[0], dcap);
    } else {
      out["hcap"] = hcap_moment(drive_from_slit(slits[0], dcap).chain, p.value("radius", 0.0));
    }
  } else if (method == "mc") {
    MonteCarloOptions options;
    options.seed = p.value("seed", std::uint64_t{1});
    options.walkers = p.value("walkers", std::int64_t{100000});
    options.start_radius = p.value("radius", 0.0);
    const MonteCarloEstimate e = hcap_monte_carlo(slits, options);
    out["hcap"] = e.estimate;
    out["standard_error"] = e.standard_error;
    out["walkers"] = e.walkers;
    out["seed"] = options.seed;
    out["start_radius"] = e.start_radius;
  } else if (method == "hsiz") {
    const double resolution = p.value("resolution", 1e-3);
    const double h = hsiz(slits, resolution);
    out["hsiz"] = h;
    out["resolution"] = resolution;
    // hsiz / 66 < hcap <= 7 hsiz / (2 pi).
    out["hcap_lower"] = h / 66.0;
    out["hcap_upper"] = 7.0 * h / (2.0 * kPi);
  } else {
    throw InputError("unknown --method " + method + " (chain, moment, mc, hsiz)");
  }
  return {io::dump(out), {}};
}

Output run_steer(const Json& p) {
  const Point from = point_from(p.at("from"), "--from");
  const Point to = point_from(p.at("to"), "--to");
  const SteerResult r = steer_through(from, to, p.value("samples", 4096));
  Json out = report_header("steer");
  out["from"] = point(from);
  out["to"] = point(to);
  out["t_star"] = r.t_star;
  out["slope"] = r.slope;
  out["driving"] = io::to_json(r.driving);
  return {io::dump(out), {}};
}

Output run(const Json& config) {
  if (!config.is_object()) throw InputError("config must be a JSON object");
  if (config.value("schema_version", io::kSchemaVersion) != io::kSchemaVersion)
    throw InputError("unsupported schema_version");
  const std::string command = config.value("command", std::string());
  Json params = defaults().value(command, Json());
  if (params.is_null()) throw InputError("unknown command '" + command + "'");
  if (const auto it = config.find("params"); it != config.end()) {
    if (!it->is_object()) throw InputError("params must be an object");
    for (const auto& [key, value] : it->items()) {
      if (!params.contains(key)) throw InputError("unknown parameter '" + key + "' for " + command);
      params[key] = value;
    }
  }
  if (command == "trace") return run_trace(params);
  if (command == "drive") return run_drive(params);
  if (command == "coeffs") return run_coeffs(params);
  if (command == "weld") return run_weld(params);
  if (command == "diag") return run_diag(params);
  if (command == "hcap") return run_hcap(params);
  return run_steer(params);
}

void emit(const Json& config, const Output& output) {
  const std::string out = config.value("out", std::string());
  if (out.empty() || out == "-") {
    std::cout << output.text << std::flush;
  } else {
    io::write_file_atomic(out, output.text);
  }
  const std::string svg = config.value("svg", std::string());
  if (!svg.empty()) io::write_file_atomic(svg, output.svg);
}

void report_error(bool as_json, const std::string& kind, const std::string& message, int code) {
  if (as_json) {
    std::cerr << io::dump(Json{{"kind", kind}, {"message", message}, {"exit_code", code}}, -1);
  } else {
    std::cerr << "error: " << message << '\n';
  }
}

Json point_param(const std::string& text) {
  double x = 0.0, y = 0.0;
  char comma = 0, extra = 0;
  if (std::sscanf(text.c_str(), "%lf%c%lf%c", &x, &comma, &y, &extra) != 3 || comma != ',')
    throw InputError("expected x,y but got '" + text + "'");
  return Json::array({x, y});
}

}  // namespace

int main(int argc, char** argv) {
  bool error_json = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--error-json") == 0) error_json = true;
  }
  try {
    CLI::App app{"Loewner evolution toolkit"};
    app.require_subcommand(0, 1);
    bool print_config = false;
    std::string save_config;
    std::string out;
    app.add_flag("--error-json", error_json, "Report errors as JSON on standard error");
    app.add_flag("--print-config", print_config, "Print the run config (or all defaults) and exit");
    app.add_option("--save-config", save_config, "Write the run config to this file before running");

    const Json d = defaults();
    Json params;
    std::string svg;

    auto add_out = [&](CLI::App* sub, const char* what) {
      sub->add_option("--out,-o", out, what);
    };

    auto* trace = app.add_subcommand("trace", "Trace the slits of a driving or a multi-slit system");
    std::string trace_driving, trace_system;
    int trace_steps = d["trace"]["steps"];
    trace->add_option("--driving", trace_driving, "Driving JSON");
    trace->add_option("--system", trace_system, "System JSON");
    trace->add_option("--steps", trace_steps, "Macro steps")->capture_default_str();
    trace->add_option("--svg", svg, "Also draw the traces to this SVG file");
    add_out(trace, "CSV output (default: standard output)");

    auto* drive = app.add_subcommand("drive", "Driving function of a polyline slit");
    std::string drive_slit;
    double drive_dcap = d["drive"]["dcap"];
    drive->add_option("--slit", drive_slit, "Slit JSON")->required();
    drive->add_option("--dcap", drive_dcap, "Largest hcap-time per peeled piece")->capture_default_str();
    add_out(drive, "JSON report (default: standard output)");

    auto* coeffs = app.add_subcommand("coeffs", "Constant coefficients of disjoint slits");
    std::string coeffs_slits;
    double coeffs_tol = d["coeffs"]["tol"];
    int coeffs_verify = d["coeffs"]["verify_steps"];
    coeffs->add_option("--slits", coeffs_slits, "Slit list JSON")->required();
    coeffs->add_option("--tol", coeffs_tol, "Tolerance on lambda")->capture_default_str();
    coeffs->add_option("--verify-steps", coeffs_verify, "Trace the solution with this many steps and compare (0: skip)")
        ->capture_default_str();
    add_out(coeffs, "JSON report (default: standard output)");

    auto* weld = app.add_subcommand("weld", "Welded-hull test and welding homeomorphisms");
    std::string weld_system;
    std::string weld_grid = d["weld"]["grid"];
    int weld_pairs = d["weld"]["pairs"];
    bool weld_irregular = false;
    weld->add_option("--system", weld_system, "System JSON")->required();
    weld->add_option("--grid", weld_grid, "Probe grid: start times x offsets")->capture_default_str();
    weld->add_option("--pairs", weld_pairs, "Welding pairs per component")->capture_default_str();
    weld->add_flag("--irregular-check", weld_irregular, "Also test the irregular-case pattern at t = T");
    add_out(weld, "JSON report (default: standard output)");

    auto* diag = app.add_subcommand("diag", "Local Hoelder norms of a driving");
    std::string diag_driving;
    double diag_window = d["diag"]["window"];
    double diag_smallest = d["diag"]["smallest_scale"];
    std::vector<double> diag_times;
    diag->add_option("--driving", diag_driving, "Driving JSON")->required();
    diag->add_option("--window", diag_window, "Window of the local norms")->capture_default_str();
    diag->add_option("--smallest-scale", diag_smallest, "Smallest dyadic scale")->capture_default_str();
    diag->add_option("--times", diag_times, "Evaluation times (default: the sample times)")->delimiter(',');
    add_out(diag, "JSON report (default: standard output)");

    auto* hcap = app.add_subcommand("hcap", "Half-plane capacity of slits");
    std::string hcap_slit;
    std::string hcap_method = d["hcap"]["method"];
    double hcap_dcap = d["hcap"]["dcap"];
    double hcap_resolution = d["hcap"]["resolution"];
    std::uint64_t hcap_seed = d["hcap"]["seed"];
    std::int64_t hcap_walkers = d["hcap"]["walkers"];
    double hcap_radius = d["hcap"]["radius"];
    hcap->add_option("--slit", hcap_slit, "Slit or slit list JSON")->required();
    hcap->add_option("--method", hcap_method, "Estimator")
        ->check(CLI::IsMember({"chain", "moment", "mc", "hsiz"}))
        ->capture_default_str();
    hcap->add_option("--dcap", hcap_dcap, "Peeling step (chain, moment)")->capture_default_str();
    hcap->add_option("--resolution", hcap_resolution, "Scanline spacing (hsiz)")->capture_default_str();
    hcap->add_option("--seed", hcap_seed, "Random seed (mc)")->capture_default_str();
    hcap->add_option("--walkers", hcap_walkers, "Walkers (mc)")->capture_default_str();
    hcap->add_option("--radius", hcap_radius, "Probe or start radius (moment, mc; 0: automatic)")
        ->capture_default_str();
    add_out(hcap, "JSON report (default: standard output)");

    auto* steer = app.add_subcommand("steer", "Driving whose backward flow carries one point to another");
    std::string steer_from, steer_to;
    int steer_samples = d["steer"]["samples"];
    steer->add_option("--from", steer_from, "Start point x,y")->required();
    steer->add_option("--to", steer_to, "Target point x,y")->required();
    steer->add_option("--samples", steer_samples, "Driving samples")->capture_default_str();
    add_out(steer, "JSON report (default: standard output)");

    auto* replay = app.add_subcommand("run", "Replay a saved run config");
    std::string config_path;
    replay->add_option("--config", config_path, "Run config JSON")->required();
    add_out(replay, "Override the config's output path");

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
      return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      report_error(error_json, "UsageError", e.what(), kExitInput);
      return kExitInput;
    }

    Json config;
    if (replay->parsed()) {
      config = io::read_json(config_path);
      if (!out.empty()) config["out"] = out;
    } else if (app.get_subcommands().empty()) {
      if (print_config) {
        std::cout << io::dump(Json{{"schema_version", io::kSchemaVersion}, {"defaults", d}});
        return 0;
      }
      std::cerr << app.help();
      return kExitInput;
    } else {
      const std::string command = app.get_subcommands().front()->get_name();
      if (command == "trace") {
        params = {{"driving", trace_driving}, {"system", trace_system}, {"steps", trace_steps}};
      } else if (command == "drive") {
        params = {{"slit", drive_slit}, {"dcap", drive_dcap}};
      } else if (command == "coeffs") {
        params = {{"slits", coeffs_slits}, {"tol", coeffs_tol}, {"verify_steps", coeffs_verify}};
      } else if (command == "weld") {
        params = {{"system", weld_system}, {"grid", weld_grid}, {"pairs", weld_pairs},
                  {"irregular_check", weld_irregular}};
      } else if (command == "diag") {
        params = {{"driving", diag_driving}, {"window", diag_window}, {"smallest_scale", diag_smallest},
                  {"times", diag_times}};
      } else if (command == "hcap") {
        params = {{"slit", hcap_slit}, {"method", hcap_method}, {"dcap", hcap_dcap},
                  {"resolution", hcap_resolution}, {"seed", hcap_seed}, {"walkers", hcap_walkers},
                  {"radius", hcap_radius}};
      } else {
        params = {{"from", point_param(steer_from)}, {"to", point_param(steer_to)}, {"samples", steer_samples}};
      }
      config = {{"schema_version", io::kSchemaVersion}, {"command", command}, {"params", params}};
      if (!out.empty()) config["out"] = out;
      if (!svg.empty()) config["svg"] = svg;
    }

    if (print_config) {
      std::cout << io::dump(config);
      return 0;
    }
    if (!save_config.empty()) io::write_file_atomic(save_config, io::dump(config));
    emit(config, run(config));
    return 0;
  } catch (const Error& e) {
    const int code = exit_code_for(e.kind());
    report_error(error_json, e.kind(), e.what(), code);
    return code;
  } catch (const Json::exception& e) {
    report_error(error_json, "InputError", e.what(), kExitInput);
    return kExitInput;
  } catch (const std::exception& e) {
    report_error(error_json, "InternalError", e.what(), 1);
    return 1;
  }
}
