#include "pairstat_cli/cli.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "pairstat/errors.hpp"
#include "pairstat/metrics.hpp"
#include "pairstat/serialization.hpp"
#include "pairstat/timebin.hpp"
#include "pairstat/tomography.hpp"
#include "pairstat/validation.hpp"
#include "pairstat/version.hpp"

namespace pairstat::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double parse_double(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError("mu-range: invalid " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

struct Options {
  std::string source;
  double mu = 0.0;
  std::string mu_range;
  double alpha_s = 0.1;
  double alpha_i = 0.1;
  double dark_s = 0.0;
  double dark_i = 0.0;
  double tail_eps = 1e-12;
  int cap = 100;
  std::string eq68_model = "coherent";
  std::uint64_t trials = 0;
  std::uint64_t seed = 1;
  std::string format = "csv";
  std::string out;
  // subcommand specific
  std::string method = "exact-series";
  std::string objective = "visibility";
  std::string in;
  bool exact_refine = false;
};

struct Resolved {
  std::string command;
  Options opt;
  std::optional<SourceKind> source;
  std::optional<Sweep> sweep;
  bool mu_given = false;
  bool alpha_given = false;
  bool dark_given = false;
  bool model_given = false;
  DetectorModel det_s, det_i;
  TruncationPolicy policy;
  HplusModel model = HplusModel::Coherent;
  Format format = Format::Csv;
  std::string argv;
};

SourceKind require_source(const Resolved& r) {
  if (!r.source) throw ConfigError(r.command + ": --source is required");
  return *r.source;
}

SourceKind require_entangled_source(const Resolved& r) {
  const SourceKind k = require_source(r);
  if (!is_entangled(k)) throw ConfigError(r.command + ": needs an entangled source");
  return k;
}

std::vector<double> mu_values(const Resolved& r, const Sweep& fallback) {
  if (r.sweep) return r.sweep->values();
  if (r.mu_given) return {r.opt.mu};
  return fallback.values();
}

double single_mu(const Resolved& r) {
  if (r.sweep) throw ConfigError(r.command + ": takes a single --mu, not --mu-range");
  if (!r.mu_given) throw ConfigError(r.command + ": --mu is required");
  return r.opt.mu;
}

RateMethod parse_method(const Resolved& r) {
  if (r.opt.method == "exact-series") return RateMethod::ExactSeries;
  if (r.opt.method == "closed-form") return RateMethod::ClosedForm;
  throw ConfigError("--method must be exact-series or closed-form");
}

Header make_header(const Resolved& r) {
  const Options& o = r.opt;
  Header h;
  h.emplace_back("pairstat", kVersion);
  h.emplace_back("command", r.command);
  h.emplace_back("argv", r.argv);
  h.emplace_back("source", r.source ? std::string(to_string(*r.source)) : "(all)");
  h.emplace_back("mu", r.sweep ? "" : r.mu_given ? format_number(o.mu) : "(default sweep)");
  h.emplace_back("mu_range", r.sweep ? r.sweep->text() : "");
  h.emplace_back("alpha_s", format_number(o.alpha_s));
  h.emplace_back("alpha_i", format_number(o.alpha_i));
  h.emplace_back("dark_s", format_number(o.dark_s));
  h.emplace_back("dark_i", format_number(o.dark_i));
  h.emplace_back("tail_eps", format_number(o.tail_eps));
  h.emplace_back("cap", std::to_string(o.cap));
  h.emplace_back("eq68_model", std::string(to_string(r.model)));
  h.emplace_back("method", o.method);
  h.emplace_back("trials", std::to_string(o.trials));
  h.emplace_back("seed", std::to_string(o.seed));
  h.emplace_back("format", o.format);
  return h;
}

int cmd_visibility_curve(const Resolved& r, std::ostream& out) {
  Table t;
  t.columns = {"mu", "v_exact_dis", "v_exact_indis", "v_approx_dis", "v_approx_indis"};
  for (double mu : mu_values(r, Sweep{})) {
    std::vector<Cell> row{mu};
    for (auto k : {SourceKind::DisEntangled, SourceKind::IndisEntangled}) {
      row.emplace_back(visibility_exact(PairSource(k, mu), r.det_s, r.det_i, r.policy).visibility);
    }
    for (auto k : {SourceKind::DisEntangled, SourceKind::IndisEntangled}) {
      row.emplace_back(visibility_approx(k, mu).visibility);
    }
    t.rows.push_back(std::move(row));
  }
  write_table(out, r.format, make_header(r), t);
  return kExitOk;
}

int cmd_concurrence_curve(const Resolved& r, std::ostream& out) {
  const RateMethod method = parse_method(r);
  Table t;
  t.columns = {"mu", "conc_dis", "conc_indis", "conc_dis_closed_form", "conc_indis_closed_form"};
  for (double mu : mu_values(r, Sweep{})) {
    std::vector<Cell> row{mu};
    for (auto k : {SourceKind::DisEntangled, SourceKind::IndisEntangled}) {
      const auto rv = assemble_r(PairSource(k, mu), r.det_s, r.det_i, r.policy, method, r.model);
      row.emplace_back(concurrence(reconstruct(rv)));
    }
    for (auto k : {SourceKind::DisEntangled, SourceKind::IndisEntangled}) {
      row.emplace_back(concurrence_closed_form(k, mu));
    }
    t.rows.push_back(std::move(row));
  }
  write_table(out, r.format, make_header(r), t);
  return kExitOk;
}

void write_density(const Resolved& r, const DensityMatrix& rho, std::ostream& out) {
  const double c = concurrence(rho);
  if (r.format == Format::Csv) {
    static constexpr const char* kBasis[] = {"HH", "HV", "VH", "VV"};
    Table t;
    t.columns = {"row", "col", "re", "im"};
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        t.rows.push_back({std::string(kBasis[i]), std::string(kBasis[j]), rho(i, j).real(), rho(i, j).imag()});
      }
    }
    Header h = make_header(r);
    h.emplace_back("concurrence", format_number(c));
    h.emplace_back("clipped_mass", format_number(rho.clipped_mass()));
    write_table(out, r.format, h, t);
    return;
  }
  std::ostringstream header;
  const Header h = make_header(r);
  header << "{";
  for (std::size_t k = 0; k < h.size(); ++k) {
    header << (k ? ", " : "") << json_string(h[k].first) << ": " << json_string(h[k].second);
  }
  header << "}";
  const std::string body = to_json(rho);
  const auto open = body.find('{');
  const auto close = body.rfind('}');
  out << "{\"header\": " << header.str() << ", " << body.substr(open + 1, close - open - 1)
      << ", \"concurrence\": " << format_number(c)
      << ", \"clipped_mass\": " << format_number(rho.clipped_mass()) << "}\n";
}

int cmd_density_matrix(const Resolved& r, std::ostream& out) {
  const SourceKind kind = require_entangled_source(r);
  const double mu = single_mu(r);
  const auto rv = assemble_r(PairSource(kind, mu), r.det_s, r.det_i, r.policy, parse_method(r), r.model);
  write_density(r, reconstruct(rv), out);
  return kExitOk;
}

int cmd_reconstruct(const Resolved& r, std::ostream& out) {
  if (r.opt.in.empty()) throw ConfigError("reconstruct: --in is required");
  std::ifstream file(r.opt.in, std::ios::binary);
  if (!file) throw ConfigError("reconstruct: cannot read '" + r.opt.in + "'");
  std::ostringstream text;
  text << file.rdbuf();
  write_density(r, reconstruct(rates_from_json(text.str())), out);
  return kExitOk;
}

int cmd_car(const Resolved& r, std::ostream& out) {
  const SourceKind kind = require_source(r);
  if (is_entangled(kind)) throw ConfigError("car: needs a correlated source");
  Table t;
  t.columns = {"mu", "r_matched", "r_unmatched", "car_exact", "car_closed_form"};
  for (double mu : mu_values(r, Sweep{0.01, 1.0, 21, true})) {
    const PairSource src(kind, mu);
    std::vector<Cell> row{mu};
    try {
      const CarResult e = car(src, r.det_s, r.det_i, r.policy, RateMethod::ExactSeries);
      row.insert(row.end(), {e.matched_rate, e.unmatched_rate, e.car});
    } catch (const std::domain_error&) {
      row.insert(row.end(), {0.0, 0.0, kNaN});
    }
    try {
      row.emplace_back(car(src, r.det_s, r.det_i, r.policy, RateMethod::ClosedForm).car);
    } catch (const std::domain_error&) {
      row.emplace_back(kNaN);
    }
    t.rows.push_back(std::move(row));
  }
  write_table(out, r.format, make_header(r), t);
  return kExitOk;
}

int cmd_timebin(const Resolved& r, std::ostream& out) {
  const SourceKind kind = require_entangled_source(r);
  Table t;
  t.columns = {"mu", "r_aa", "r_ab", "r_aplus", "r_aa_closed_form", "r_ab_closed_form",
               "r_aplus_closed_form", "visibility"};
  for (double mu : mu_values(r, Sweep{})) {
    std::vector<Cell> row{mu};
    double aa = 0.0, ab = 0.0;
    for (auto method : {RateMethod::ExactSeries, RateMethod::ClosedForm}) {
      for (auto ports : {TimebinPorts::aa, TimebinPorts::ab, TimebinPorts::aplus}) {
        const double v = timebin_rate(kind, ports, mu, r.det_s, r.det_i, method, r.policy, r.model);
        if (method == RateMethod::ExactSeries && ports == TimebinPorts::aa) aa = v;
        if (method == RateMethod::ExactSeries && ports == TimebinPorts::ab) ab = v;
        row.emplace_back(v);
      }
    }
    row.emplace_back(aa + ab > 0.0 ? (aa - ab) / (aa + ab) : 1.0);
    t.rows.push_back(std::move(row));
  }
  write_table(out, r.format, make_header(r), t);
  return kExitOk;
}

int cmd_optimize_mu(const Resolved& r, std::ostream& out) {
  const SourceKind kind = require_entangled_source(r);
  const auto objective = parse_objective(r.opt.objective);
  if (!objective) throw ConfigError("--objective must be visibility, concurrence or coincidence-visibility");
  if (r.mu_given) throw ConfigError("optimize-mu: takes --mu-range, not --mu");
  const Sweep range = r.sweep.value_or(Sweep{1e-4, 1.0, 65, true});
  if (!(range.lo > 0.0)) throw ConfigError("optimize-mu: range must start above 0");
  OptimizeOptions options;
  options.scan_points = range.points;
  options.exact_refinement = r.opt.exact_refine;
  options.policy = r.policy;
  options.model = r.model;
  const OptimizeResult res = optimize_mu(kind, r.det_s, r.det_i, *objective, {range.lo, range.hi}, options);
  Table t;
  t.columns = {"source", "objective", "mu_opt", "value", "not_unimodal", "method"};
  t.rows.push_back({std::string(to_string(kind)), std::string(to_string(*objective)), res.mu, res.value,
                    static_cast<long long>(res.not_unimodal), std::string(to_string(res.method))});
  Header h = make_header(r);
  h.emplace_back("objective", r.opt.objective);
  write_table(out, r.format, h, t);
  return kExitOk;
}

int cmd_validate(const Resolved& r, std::ostream& out) {
  ValidationConfig cfg;
  if (r.source) cfg.kinds = {*r.source};
  if (r.sweep) cfg.mus = r.sweep->values();
  if (r.mu_given) cfg.mus = {r.opt.mu};
  if (r.alpha_given) cfg.alphas = {r.opt.alpha_s};
  if (r.dark_given) cfg.darks = {r.opt.dark_s};
  if (r.model_given) cfg.models = {r.model};
  cfg.policy = r.policy;
  cfg.mc_trials = r.opt.trials;
  cfg.seed = r.opt.seed;
  const ValidationReport report = validate_grid(cfg);

  Table t;
  t.columns = {"source", "mu", "alpha", "dark", "quantity", "eq68_model", "series", "enumerated",
               "abs_diff", "tolerance", "x_max", "mc_mean", "mc_std_error", "z", "pass"};
  double max_diff = 0.0, max_z = 0.0;
  for (const auto& row : report.rows) {
    const double diff = std::abs(row.series - row.enumerated);
    max_diff = std::max(max_diff, diff);
    max_z = std::max(max_z, std::abs(row.z));
    t.rows.push_back({std::string(to_string(row.kind)), row.mu, row.alpha, row.dark,
                      std::string(oracle::to_string(row.quantity)), std::string(to_string(row.model)),
                      row.series, row.enumerated, diff, row.tolerance, static_cast<long long>(row.x_max),
                      row.mc ? row.mc->mean : kNaN, row.mc ? row.mc->std_error : kNaN,
                      row.mc ? row.z : kNaN, static_cast<long long>(row.pass())});
  }
  Header h = make_header(r);
  h.emplace_back("rows", std::to_string(report.rows.size()));
  h.emplace_back("max_abs_diff", format_number(max_diff));
  h.emplace_back("max_abs_z", r.opt.trials > 0 ? format_number(max_z) : "(no monte carlo)");
  h.emplace_back("result", report.all_pass() ? "PASS" : "FAIL");
  write_table(out, r.format, h, t);
  return report.all_pass() ? kExitOk : kExitValidationFailed;
}

Resolved resolve(const std::string& command, const Options& o, const CLI::App& app) {
  Resolved r;
  r.command = command;
  r.opt = o;
  if (!o.source.empty()) {
    r.source = parse_source_kind(o.source);
    if (!r.source) {
      throw ConfigError("--source must be indis-entangled, dis-entangled, dis-correlated or thermal-correlated");
    }
  }
  r.mu_given = app.count("--mu") > 0;
  if (!o.mu_range.empty()) r.sweep = parse_sweep(o.mu_range);
  if (r.mu_given && r.sweep) throw ConfigError("--mu and --mu-range are mutually exclusive");
  if (r.mu_given && !(o.mu >= 0.0 && std::isfinite(o.mu))) throw ConfigError("--mu must be finite and >= 0");
  r.alpha_given = app.count("--alpha-s") > 0;
  r.dark_given = app.count("--dark-s") > 0;
  r.model_given = app.count("--eq68-model") > 0;

  r.det_s = {o.alpha_s, o.dark_s, ClickModel::Exact};
  r.det_i = {o.alpha_i, o.dark_i, ClickModel::Exact};
  try {
    r.det_s.validate();
    r.det_i.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  r.policy = {o.tail_eps, o.cap};
  try {
    r.policy.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto model = parse_hplus_model(o.eq68_model);
  if (!model) throw ConfigError("--eq68-model must be coherent or independent");
  r.model = *model;
  if (o.format == "csv") {
    r.format = Format::Csv;
  } else if (o.format == "json") {
    r.format = Format::Json;
  } else {
    throw ConfigError("--format must be csv or json");
  }
  return r;
}

}  // namespace

std::vector<double> Sweep::values() const {
  std::vector<double> v(points);
  for (int k = 0; k < points; ++k) {
    if (k == 0) {
      v[k] = lo;
    } else if (k == points - 1) {
      v[k] = hi;
    } else if (log) {
      v[k] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * k / (points - 1));
    } else {
      v[k] = lo + (hi - lo) * k / (points - 1);
    }
  }
  return v;
}

std::string Sweep::text() const {
  return format_number(lo) + ":" + format_number(hi) + ":" + std::to_string(points) + (log ? ":log" : "");
}

Sweep parse_sweep(std::string_view text) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto colon = text.find(':', start);
    parts.push_back(text.substr(start, colon == std::string_view::npos ? colon : colon - start));
    if (colon == std::string_view::npos) break;
    start = colon + 1;
  }
  if (parts.size() < 3 || parts.size() > 4 || (parts.size() == 4 && parts[3] != "log" && parts[3] != "lin")) {
    throw ConfigError("mu-range: expected LO:HI:N[:log], got '" + std::string(text) + "'");
  }
  Sweep s;
  s.lo = parse_double(parts[0], "LO");
  s.hi = parse_double(parts[1], "HI");
  int n = 0;
  const auto [ptr, ec] = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), n);
  if (ec != std::errc() || ptr != parts[2].data() + parts[2].size()) {
    throw ConfigError("mu-range: invalid N '" + std::string(parts[2]) + "'");
  }
  s.points = n;
  s.log = parts.size() == 4 && parts[3] == "log";
  if (s.points < 2) throw ConfigError("mu-range: points >= 2 required");
  if (!(s.lo < s.hi)) throw ConfigError("mu-range: LO < HI required (points >= 2 must be distinct)");
  if (s.lo < 0.0) throw ConfigError("mu-range: mu must be >= 0");
  if (s.log && !(s.lo > 0.0)) throw ConfigError("mu-range: a log sweep needs LO > 0");
  return s;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Photon-pair source statistics: visibilities, CAR, tomography and oracle checks.",
               "pairstat"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Options o;
  app.add_option("--source", o.source,
                 "indis-entangled | dis-entangled | dis-correlated | thermal-correlated");
  app.add_option("--mu", o.mu, "mean pair number per pulse");
  app.add_option("--mu-range", o.mu_range, "sweep LO:HI:N[:log]");
  app.add_option("--alpha-s", o.alpha_s, "signal collection efficiency")->capture_default_str();
  app.add_option("--alpha-i", o.alpha_i, "idler collection efficiency")->capture_default_str();
  app.add_option("--dark-s", o.dark_s, "signal dark-count probability")->capture_default_str();
  app.add_option("--dark-i", o.dark_i, "idler dark-count probability")->capture_default_str();
  app.add_option("--tail-eps", o.tail_eps, "series truncation tolerance")->capture_default_str();
  app.add_option("--cap", o.cap, "maximum series length")->capture_default_str();
  app.add_option("--eq68-model", o.eq68_model, "H+ model for single-mode pairs: coherent | independent")
      ->capture_default_str();
  app.add_option("--trials", o.trials, "Monte-Carlo trials (validate; 0 = enumeration only)")
      ->capture_default_str();
  app.add_option("--seed", o.seed, "Monte-Carlo seed")->capture_default_str();
  app.add_option("--format", o.format, "csv | json")->capture_default_str();
  app.add_option("--out", o.out, "output file (default stdout)");

  auto* vis = app.add_subcommand("visibility-curve", "exact and approximate visibility vs mu");
  auto* conc = app.add_subcommand("concurrence-curve", "concurrence from simulated tomography vs mu");
  auto* dm = app.add_subcommand("density-matrix", "reconstructed density matrix at one mu");
  auto* rec = app.add_subcommand("reconstruct", "density matrix from a measured 16-rate vector");
  auto* carc = app.add_subcommand("car", "coincidence-to-accidental ratio vs mu");
  auto* tb = app.add_subcommand("timebin", "time-bin central-slot rates vs mu");
  auto* opt = app.add_subcommand("optimize-mu", "mean pair number maximizing an objective");
  auto* val = app.add_subcommand("validate", "series vs enumeration / Monte-Carlo oracle grid");
  for (auto* sub : {conc, dm}) {
    sub->add_option("--method", o.method, "exact-series | closed-form")->capture_default_str();
  }
  rec->add_option("--in", o.in, "JSON file {\"r\": [16 numbers]}");
  opt->add_option("--objective", o.objective, "visibility | concurrence | coincidence-visibility")
      ->capture_default_str();
  opt->add_flag("--exact-refine", o.exact_refine, "refine the optimum on the exact series");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  std::string joined;
  for (std::size_t k = 1; k < args.size(); ++k) joined += (k > 1 ? " " : "") + args[k];

  const CLI::App* sub = app.get_subcommands().front();
  try {
    Resolved r = resolve(sub->get_name(), o, app);
    r.argv = joined;
    std::ofstream file;
    std::ostream* target = &out;
    if (!o.out.empty()) {
      file.open(o.out, std::ios::binary | std::ios::trunc);
      if (!file) throw ConfigError("cannot open --out file '" + o.out + "'");
      target = &file;
    }
    if (sub == vis) return cmd_visibility_curve(r, *target);
    if (sub == conc) return cmd_concurrence_curve(r, *target);
    if (sub == dm) return cmd_density_matrix(r, *target);
    if (sub == rec) return cmd_reconstruct(r, *target);
    if (sub == carc) return cmd_car(r, *target);
    if (sub == tb) return cmd_timebin(r, *target);
    if (sub == opt) return cmd_optimize_mu(r, *target);
    if (sub == val) return cmd_validate(r, *target);
  } catch (const std::exception& e) {
    // Bad flags, out-of-range values and series that cannot be truncated
    // under the requested cap all land here.
    err << "pairstat: " << e.what() << "\n";
    return kExitConfigError;
  }
  return kExitConfigError;
}

}  // namespace pairstat::cli
