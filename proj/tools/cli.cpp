#include "cli.hpp"

#include "chedra/error.hpp"
#include "chedra/io.hpp"
#include "chedra/linkage.hpp"
#include "chedra/net.hpp"
#include "chedra/service.hpp"
#include "chedra/validation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

namespace chedra::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string spec_path;
  std::string output;
  std::string format;
  std::optional<double> a;
  int sweep = 0;
  std::vector<double> row_scales;
  std::vector<double> col_scales;
  std::string host = "127.0.0.1";
  int port = 8787;
};

GeometryFormat pick_format(const std::string& format, const std::string& path, GeometryFormat fallback) {
  if (format == "obj") return GeometryFormat::Obj;
  if (format == "json") return GeometryFormat::Json;
  if (!path.empty() && fs::path(path).extension() == ".obj") return GeometryFormat::Obj;
  if (!path.empty() && fs::path(path).extension() == ".json") return GeometryFormat::Json;
  return fallback;
}

void write_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::InvariantError, "cannot write " + path.string());
  f << bytes;
  if (!f) throw Error(Errc::InvariantError, "write failed for " + path.string());
}

void emit(const std::string& path, const std::string& bytes, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << bytes;
    if (bytes.empty() || bytes.back() != '\n') out << '\n';
  } else {
    write_file(path, bytes);
  }
}

std::string interval_line(const char* what, const RangeInterval& r) {
  return std::string(what) + ' ' + format_number(r.lo) + ' ' + format_number(r.hi) + ' ' +
         std::string(to_string(r.lo_kind)) + ' ' + std::string(to_string(r.hi_kind)) + '\n';
}

// Interval of the net motion that contains the reference configuration.
RangeInterval home_interval(const ConeNet& net, const Tolerances& tol) {
  const auto ranges = net_flexion_range(net, tol);
  const auto home = interval_containing(ranges, net.a_ref);
  if (!home) throw Error(Errc::OutOfRange, "reference parameter lies outside every flexion interval");
  return *home;
}

void require_in_range(const ConeNet& net, double a, const Tolerances& tol) {
  const auto ranges = net_flexion_range(net, tol);
  if (interval_containing(ranges, a)) return;
  std::string msg = "a = " + format_number(a) + " is outside the flexion range";
  for (const RangeInterval& r : ranges) msg += " [" + format_number(r.lo) + ", " + format_number(r.hi) + "]";
  throw Error(Errc::OutOfRange, msg);
}

// Midpoints of n equal cells: interval ends are degenerate configurations.
std::vector<double> sweep_values(const RangeInterval& r, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(r.lo + (r.hi - r.lo) * (i + 0.5) / n);
  return out;
}

int cmd_build(const Options& o, const Tolerances& tol, std::ostream& out) {
  const NetSpec spec = load_spec(o.spec_path);
  const ConeNet net = build_net(spec, tol);
  const GeometrySnapshot g = snapshot(net);
  emit(o.output, export_geometry(g, pick_format(o.format, o.output, GeometryFormat::Json)), out);
  return g.report && !g.report->pass() ? kValidationFailure : kPass;
}

int cmd_classify(const Options& o, const Tolerances& tol, std::ostream& out, std::ostream& err) {
  const NetSpec spec = load_spec(o.spec_path);
  std::vector<Classification> labels;
  if (spec.cases.size() == 1) {
    labels.push_back(classify(resolve_linkage(spec), tol));
  } else {
    try {
      const ConeNet net = build_pnet(spec, tol);
      for (const TripleData& t : net.triples) labels.push_back(classify(t.linkage, tol));
    } catch (const Error& e) {
      if (e.code() != Errc::IncompatibleChaining) throw;
      out << to_string(CaseLabel::NotFlexible) << '\n';
      err << e.what() << '\n';
      return kValidationFailure;
    }
  }
  bool flexible = true;
  for (const Classification& c : labels) {
    out << to_string(c.label) << '\n';
    if (!c.flexible()) {
      flexible = false;
      err << c.reason << '\n';
    }
  }
  return flexible ? kPass : kValidationFailure;
}

int cmd_flex(const Options& o, const Tolerances& tol, std::ostream& out) {
  const NetSpec spec = load_spec(o.spec_path);
  const ConeNet net = build_net(spec, tol);
  if (o.a) {
    require_in_range(net, *o.a, tol);
    const FlexionState st = flex(net, *o.a, tol);
    GeometrySnapshot g = snapshot(st);
    g.report = validate_state(net, st, tol);
    emit(o.output, export_geometry(g, pick_format(o.format, o.output, GeometryFormat::Json)), out);
    return g.report->pass() ? kPass : kValidationFailure;
  }
  const RangeInterval home = home_interval(net, tol);
  const GeometryFormat fmt = pick_format(o.format, "", GeometryFormat::Obj);
  const fs::path dir = o.output.empty() ? fs::path(".") : fs::path(o.output);
  bool pass = true;
  const std::vector<double> values = sweep_values(home, o.sweep);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const FlexionState st = flex(net, values[i], tol);
    GeometrySnapshot g = snapshot(st);
    g.report = validate_state(net, st, tol);
    pass = pass && g.report->pass();
    char name[32];
    std::snprintf(name, sizeof name, "frame_%04zu.%s", i, fmt == GeometryFormat::Obj ? "obj" : "json");
    write_file(dir / name, export_geometry(g, fmt));
    out << name << ' ' << format_number(values[i]) << (g.report->pass() ? " pass" : " FAIL") << '\n';
  }
  return pass ? kPass : kValidationFailure;
}

int cmd_range(const Options& o, const Tolerances& tol, std::ostream& out) {
  const NetSpec spec = load_spec(o.spec_path);
  for (const RangeInterval& r : flexion_range(resolve_linkage(spec), tol)) out << interval_line("linkage", r);
  const ConeNet net = build_net(spec, tol);
  for (const RangeInterval& r : net_flexion_range(net, tol)) out << interval_line("net", r);
  return kPass;
}

int cmd_validate(const Options& o, const Tolerances& tol, std::ostream& out, std::ostream& err) {
  const NetSpec spec = load_spec(o.spec_path);
  Classification c;
  try {
    c = classify(resolve_linkage(spec), tol);
  } catch (const Error& e) {
    if (e.code() != Errc::MixedCases) throw;
    c.reason = e.message();
  }
  ConeNet net;
  try {
    net = build_net(spec, tol);
  } catch (const Error& e) {
    if (e.code() != Errc::IncompatibleChaining) throw;
    out << "{\"classification\":\"NotFlexible\",\"pass\":false}\n";
    err << e.what() << '\n';
    return kValidationFailure;
  }
  const GeometrySnapshot ref = snapshot(net);
  ValidationReport worst = *ref.report;
  int states = 0;
  if (const auto home = interval_containing(net_flexion_range(net, tol), net.a_ref)) {
    for (double a : sweep_values(*home, std::max(o.sweep, 1))) {
      const ValidationReport r = validate_state(net, flex(net, a, tol), tol);
      ++states;
      worst.max_planarity = std::max(worst.max_planarity, r.max_planarity);
      worst.max_isometry = std::max(worst.max_isometry, r.max_isometry);
      worst.max_collinearity = std::max(worst.max_collinearity, r.max_collinearity);
      worst.planarity_ok = worst.planarity_ok && r.planarity_ok;
      worst.isometry_ok = worst.isometry_ok && r.isometry_ok;
      worst.collinearity_ok = worst.collinearity_ok && r.collinearity_ok;
      for (int q : r.bad_quads) worst.bad_quads.push_back(q);
      for (int e : r.bad_edges) worst.bad_edges.push_back(e);
      for (int t : r.bad_tips) worst.bad_tips.push_back(t);
    }
  }
  for (auto* v : {&worst.bad_quads, &worst.bad_edges, &worst.bad_tips}) {
    std::sort(v->begin(), v->end());
    v->erase(std::unique(v->begin(), v->end()), v->end());
  }
  const bool pass = c.flexible() && worst.pass();
  out << "{\"classification\":\"" << to_string(c.label) << "\",\"max_coeff_residual\":"
      << format_number(c.max_coeff_residual) << ",\"states\":" << states
      << ",\"report\":" << report_to_json(worst) << ",\"pass\":" << (pass ? "true" : "false") << "}\n";
  if (!c.flexible()) err << c.reason << '\n';
  return pass ? kPass : kValidationFailure;
}

int cmd_parallel(const Options& o, const Tolerances& tol, std::ostream& out) {
  const NetSpec spec = load_spec(o.spec_path);
  ParallelScales scales;
  if (spec.parallel) scales = *spec.parallel;
  if (!o.row_scales.empty()) scales.row_scales = o.row_scales;
  if (!o.col_scales.empty()) scales.col_scales = o.col_scales;
  if (scales.row_scales.empty() && scales.col_scales.empty()) {
    throw Error(Errc::SchemaError, "no scales: pass --row-scales/--col-scales or a \"parallel\" block");
  }
  const ConeNet master = build_net(spec, tol);
  const ConeNet general = parallel_transfer(master, scales);
  GeometrySnapshot g;
  if (o.a) {
    require_in_range(master, *o.a, tol);
    const FlexionState st = flex_parallel(master, scales, *o.a, tol);
    g = snapshot(st);
    ValidationReport rep = check_planarity(st.vertices, tol);
    const ValidationReport iso = check_isometry(general.intrinsics, st.vertices, tol);
    rep.max_isometry = iso.max_isometry;
    rep.isometry_ok = iso.isometry_ok;
    rep.bad_edges = iso.bad_edges;
    g.report = rep;
  } else {
    g = snapshot(general);
  }
  emit(o.output, export_geometry(g, pick_format(o.format, o.output, GeometryFormat::Json)), out);
  return g.report->pass() ? kPass : kValidationFailure;
}

int cmd_serve(const Options& o, const Tolerances& tol, std::ostream& out) {
  ServiceConfig cfg;
  cfg.tolerances = tol;
  DesignService service(cfg);
  HttpServer server(service);
  const int port = server.bind(o.host, o.port);
  if (port < 0) throw Error(Errc::InvariantError, "cannot bind " + o.host + ":" + std::to_string(o.port));
  out << "listening on http://" << o.host << ':' << port << std::endl;
  return server.listen() ? kPass : kError;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Axial C-hedra and P-nets: build, classify, flex and validate"};
  app.require_subcommand(1);
  Options o;

  auto add_spec = [&](CLI::App* sub) { sub->add_option("spec", o.spec_path, "NetSpec JSON document")->required(); };
  auto add_output = [&](CLI::App* sub, const char* help) {
    sub->add_option("-o,--output", o.output, help);
    sub->add_option("--format", o.format, "json or obj (default: from the output extension)")
        ->check(CLI::IsMember({"json", "obj"}));
  };

  CLI::App* build = app.add_subcommand("build", "Build the reference net and export its geometry");
  add_spec(build);
  add_output(build, "Output file (stdout when omitted)");

  CLI::App* classify_cmd = app.add_subcommand("classify", "Print the case label of every triple");
  add_spec(classify_cmd);

  CLI::App* flex_cmd = app.add_subcommand("flex", "Configuration at one parameter or a sweep of frames");
  add_spec(flex_cmd);
  auto* a_opt = flex_cmd->add_option("--a", o.a, "Driving parameter");
  auto* sweep_opt = flex_cmd->add_option("--sweep", o.sweep, "Number of frames over the flexion interval")
                        ->check(CLI::Range(1, 100000));
  a_opt->excludes(sweep_opt);
  add_output(flex_cmd, "Output file for --a, frame directory for --sweep");

  CLI::App* range = app.add_subcommand("range", "Print the flexion intervals");
  add_spec(range);

  CLI::App* validate_cmd = app.add_subcommand("validate", "Classify, build and certify a sweep of states");
  add_spec(validate_cmd);
  o.sweep = 10;
  validate_cmd->add_option("--sweep", o.sweep, "Number of sampled states")->check(CLI::Range(1, 100000));

  CLI::App* parallel = app.add_subcommand("parallel", "Parallelism transfer to a general P-net");
  add_spec(parallel);
  parallel->add_option("--row-scales", o.row_scales, "Scale per edge of the first row");
  parallel->add_option("--col-scales", o.col_scales, "Scale per edge of the first column");
  parallel->add_option("--a", o.a, "Flex the master to this parameter first");
  add_output(parallel, "Output file (stdout when omitted)");

  CLI::App* serve = app.add_subcommand("serve", "Run the HTTP design service");
  serve->add_option("--port", o.port, "TCP port (0 picks a free one)")->check(CLI::Range(0, 65535));
  serve->add_option("--host", o.host, "Bind address");

  std::vector<std::string> argv_store{"chedra"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (std::string& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kError;
  }
  if (flex_cmd->parsed() && !o.a && !flex_cmd->count("--sweep")) {
    err << "flex: one of --a or --sweep is required\n";
    return kError;
  }

  const Tolerances tol = Tolerances::from_env();
  try {
    if (build->parsed()) return cmd_build(o, tol, out);
    if (classify_cmd->parsed()) return cmd_classify(o, tol, out, err);
    if (flex_cmd->parsed()) return cmd_flex(o, tol, out);
    if (range->parsed()) return cmd_range(o, tol, out);
    if (validate_cmd->parsed()) return cmd_validate(o, tol, out, err);
    if (parallel->parsed()) return cmd_parallel(o, tol, out);
    if (serve->parsed()) return cmd_serve(o, tol, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kError;
  }
  return kError;
}

}  // namespace chedra::cli
