#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>

#include "ptsym/continuation.hpp"
#include "ptsym/errors.hpp"
#include "ptsym/potential.hpp"
#include "ptsym/rpm.hpp"
#include "ptsym/spectral.hpp"

namespace ptsym::cli {

namespace {

using Row = std::vector<std::string>;

std::string fmt(int v) { return std::to_string(v); }
std::string fmt(std::size_t v) { return std::to_string(v); }
std::string fmt(double v) { return format_double(v); }

std::string family_label(const FamilySelector& f) {
  return std::to_string(f.alpha_ref) + (f.branch_sign > 0 ? "+" : "-");
}

// Collects metadata, header and rows, then writes them in CSV order.
class Table {
 public:
  void meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }
  void header(Row h) { header_ = std::move(h); }
  void row(Row r) { rows_.push_back(std::move(r)); }

  void write(std::ostream& os) const {
    for (const auto& [k, v] : meta_) os << "# " << k << "=" << v << '\n';
    write_row(os, header_);
    for (const auto& r : rows_) write_row(os, r);
  }

 private:
  static void write_row(std::ostream& os, const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) os << ',';
      os << r[i];
    }
    os << '\n';
  }

  std::vector<std::pair<std::string, std::string>> meta_;
  Row header_;
  std::vector<Row> rows_;
};

struct PlotCurve {
  std::string using_expr;
  std::string title;
  std::string style = "lines";
};

struct PlotSpec {
  std::string xlabel;
  std::string ylabel;
  std::optional<std::pair<double, double>> xrange;
  std::vector<PlotCurve> curves;
};

void write_plot(const std::string& path, const std::string& csv_path, const PlotSpec& spec) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DomainError("cannot open plot script " + path);
  std::string png = csv_path;
  if (auto dot = png.rfind('.'); dot != std::string::npos) png.erase(dot);
  png += ".png";
  os << "# gnuplot script; reads " << csv_path << '\n';
  os << "set datafile separator ','\n";
  os << "set datafile commentschars '#'\n";
  os << "set terminal pngcairo size 900,600\n";
  os << "set output '" << png << "'\n";
  os << "set key outside right\n";
  os << "set xlabel '" << spec.xlabel << "'\n";
  os << "set ylabel '" << spec.ylabel << "'\n";
  if (spec.xrange) os << "set xrange [" << fmt(spec.xrange->first) << ":" << fmt(spec.xrange->second) << "]\n";
  os << "plot \\\n";
  for (std::size_t i = 0; i < spec.curves.size(); ++i) {
    const auto& c = spec.curves[i];
    os << "  '" << csv_path << "' using " << c.using_expr << " with " << c.style << " title '" << c.title
       << "'" << (i + 1 < spec.curves.size() ? ", \\\n" : "\n");
  }
}

// Options shared by several subcommands.
struct Physics {
  double alpha = 2.0;
  double beta = 0.0;
  int family = 2;
  int branch = 1;
  FamilySelector selector() const { return {family, branch}; }
  PotentialParams params() const { return {alpha, beta}; }
};

struct Output {
  std::string output;
  std::string plot;
};

void add_physics(CLI::App* app, Physics& p, bool with_alpha) {
  if (with_alpha) app->add_option("--alpha", p.alpha, "exponent of (i sinh x)")->capture_default_str();
  app->add_option("--beta", p.beta, "exponent of cosh x")->capture_default_str();
  app->add_option("--family", p.family, "reference exponent alpha_R of the family (2, 6, 10, ...)")
      ->capture_default_str();
  app->add_option("--branch", p.branch, "sign branch of the asymptotic exponent (+1 or -1)")->capture_default_str();
}

void add_output(CLI::App* app, Output& o, bool with_plot) {
  app->add_option("-o,--output", o.output, "CSV file (default: standard output)");
  if (with_plot) app->add_option("--plot", o.plot, "write a gnuplot script for the CSV to this path");
}

void echo_options(const CLI::App* app, Table& t) {
  t.meta("command", app->get_name());
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config" || name == "output" || name == "plot") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& res = opt->results();
      value = res.empty() ? "true" : res.back();
    } else {
      value = opt->get_default_str();
    }
    if (value.empty()) value = "unset";
    t.meta(name, value);
  }
}

class Sink {
 public:
  Sink(const Output& o, std::ostream& fallback) : path_(o.output) {
    if (!path_.empty()) {
      file_ = std::make_unique<std::ofstream>(path_, std::ios::binary);
      if (!*file_) throw DomainError("cannot open output file " + path_);
    }
    os_ = file_ ? file_.get() : &fallback;
  }
  std::ostream& stream() { return *os_; }

 private:
  std::string path_;
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_;
};

void emit(const Table& t, const Output& o, std::ostream& out, const std::optional<PlotSpec>& plot) {
  Sink sink(o, out);
  t.write(sink.stream());
  sink.stream().flush();
  if (!o.plot.empty() && plot) {
    if (o.output.empty()) throw DomainError("--plot needs --output so the script can reference the CSV");
    write_plot(o.plot, o.output, *plot);
  }
}

ScanOptions scan_options(double step, bool serial) {
  ScanOptions s;
  s.scan_step = step;
  s.execution = serial ? Execution::serial : Execution::parallel;
  return s;
}

// ---- solve ---------------------------------------------------------------

struct SolveConfig {
  Physics phys;
  std::size_t n = 4000;
  std::optional<double> x_max;
  std::optional<double> y;
  double e_min = -5.0;
  double e_max = 20.0;
  double scan_step = 0.05;
  int levels = 0;
  bool log_derivative = false;
  bool serial = false;
  Output out;
};

int cmd_solve(const CLI::App* app, const SolveConfig& c, std::ostream& out, std::ostream& err) {
  const PotentialParams p = c.phys.params();
  const FamilySelector f = c.phys.selector();
  p.validate();
  f.validate();
  if (!(c.e_min < c.e_max)) throw DomainError("e-min must be below e-max");
  const double y = c.y ? *c.y : optimal_shift(p, f).y;
  const double x_max = c.x_max ? *c.x_max : default_x_max(p, f, y);
  const GridPolicy policy{x_max, c.n, y};
  grid_for(p, f, policy).validate();
  auto levels = confirmed_real_eigenvalues(p, f, policy, c.e_min, c.e_max, scan_options(c.scan_step, c.serial));
  if (c.levels > 0 && levels.size() > static_cast<std::size_t>(c.levels)) levels.resize(c.levels);

  Table t;
  echo_options(app, t);
  t.meta("y_used", fmt(y));
  t.meta("x_max_used", fmt(x_max));
  Row header{"level_index", "E", "y_used", "n", "x_max", "est_error", "E_extrapolated"};
  if (c.log_derivative) header.push_back("center_log_derivative");
  t.header(header);
  const auto op = c.log_derivative ? std::optional(operator_for(p, f, policy)) : std::nullopt;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& l = levels[i];
    Row r{fmt(i + 1), fmt(l.energy), fmt(y), fmt(c.n), fmt(x_max), fmt(l.est_error), fmt(richardson(l.coarse, l.energy))};
    if (c.log_derivative) r.push_back(fmt(eigenvector(*op, l.energy).log_derivative_at_center().real()));
    t.row(r);
  }
  if (levels.empty()) err << "warning: no real eigenvalues on this contour\n";
  emit(t, c.out, out, std::nullopt);
  return ok;
}

// ---- sweep ---------------------------------------------------------------

struct SweepConfig {
  Physics phys;
  std::optional<double> alpha_from;
  double alpha_to = 1.0;
  double alpha_step = 0.01;
  int levels = 6;
  std::size_t n = 2000;
  double x_max = 8.0;
  std::optional<double> y;
  std::optional<double> e_min;
  std::optional<double> e_max;
  double scan_step = 0.05;
  bool serial = false;
  Output out;
};

const Row sweep_header{"beta", "family", "path", "level_index", "alpha", "E", "event", "partner"};

std::string path_label(const std::optional<double>& y) {
  if (!y) return "optimal";
  return *y == 0.0 ? "real" : "y=" + fmt(*y);
}

// Appends one sweep to the table; returns the number of collapsed tracks.
int append_sweep(Table& t, const SweepResult& s, double beta, const std::optional<double>& y) {
  int collapsed = 0;
  for (const auto& tr : s.tracks) {
    const std::string fam = family_label(tr.family);
    for (const auto& pt : tr.points)
      t.row({fmt(beta), fam, path_label(y), fmt(tr.level_index), fmt(pt.alpha), fmt(pt.energy), "", ""});
    for (const auto& ev : tr.events) {
      t.row({fmt(beta), fam, path_label(y), fmt(tr.level_index), fmt(ev.alpha), fmt(ev.energy), to_string(ev.kind),
             ev.partner > 0 ? fmt(ev.partner) : ""});
      if (ev.kind == EventKind::step_collapse) ++collapsed;
    }
  }
  return collapsed;
}

SweepResult run_sweep(const SweepConfig& c) {
  const FamilySelector f = c.phys.selector();
  f.validate();
  SweepOptions o;
  o.alpha_from = c.alpha_from ? *c.alpha_from : static_cast<double>(f.alpha_ref);
  o.alpha_to = c.alpha_to;
  o.alpha_step = c.alpha_step;
  o.levels = c.levels;
  o.grid = GridPolicy{c.x_max, c.n, c.y};
  o.scan = scan_options(c.scan_step, c.serial);
  o.e_min = c.e_min;
  o.e_max = c.e_max;
  PotentialParams p{o.alpha_from, c.phys.beta};
  p.validate();
  return continuation_sweep(f, p, o);
}

PlotSpec sweep_plot(const Table& t, const std::vector<std::tuple<double, std::string, std::string, int>>& groups,
                    std::optional<std::pair<double, double>> xrange) {
  (void)t;
  PlotSpec spec{"alpha", "E", xrange, {}};
  for (const auto& [beta, fam, path, level] : groups) {
    std::ostringstream u;
    u << "(($1==" << fmt(beta) << " && strcol(2) eq '" << fam << "' && strcol(3) eq '" << path << "' && $4==" << level
      << " && strcol(7) eq '') ? $5 : 1/0):6";
    std::ostringstream title;
    title << "beta=" << fmt(beta) << " " << fam << " " << path << " level " << level;
    spec.curves.push_back({u.str(), title.str(), "lines"});
  }
  return spec;
}

void collect_groups(const SweepResult& s, double beta, const std::optional<double>& y,
                    std::vector<std::tuple<double, std::string, std::string, int>>& groups) {
  for (const auto& tr : s.tracks) {
    auto g = std::make_tuple(beta, family_label(tr.family), path_label(y), tr.level_index);
    if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
  }
}

int cmd_sweep(const CLI::App* app, const SweepConfig& c, std::ostream& out, std::ostream& err) {
  const SweepResult s = run_sweep(c);
  Table t;
  echo_options(app, t);
  t.meta("e_window", fmt(s.e_min) + ":" + fmt(s.e_max));
  t.header(sweep_header);
  const int collapsed = append_sweep(t, s, c.phys.beta, c.y);
  std::vector<std::tuple<double, std::string, std::string, int>> groups;
  collect_groups(s, c.phys.beta, c.y, groups);
  emit(t, c.out, out, sweep_plot(t, groups, std::nullopt));
  if (collapsed > 0) {
    err << "error: " << collapsed << " track(s) terminated by step collapse; CSV is partial\n";
    return numerical_failure;
  }
  return ok;
}

// ---- contour -------------------------------------------------------------

struct ContourConfig {
  Physics phys;
  double alpha_from = 0.5;
  double alpha_to = 10.0;
  double alpha_step = 0.1;
  Output out;
};

void append_contour(Table& t, const ContourConfig& c) {
  const FamilySelector f = c.phys.selector();
  f.validate();
  if (!(c.alpha_step > 0.0) || c.alpha_to < c.alpha_from) throw DomainError("invalid alpha range");
  const auto steps = static_cast<long>(std::floor((c.alpha_to - c.alpha_from) / c.alpha_step + 1e-9));
  for (long k = 0; k <= steps; ++k) {
    const double a = c.alpha_from + static_cast<double>(k) * c.alpha_step;
    const PotentialParams p{a, c.phys.beta};
    try {
      const ContourSpec spec = optimal_shift(p, f);
      t.row({fmt(a), fmt(spec.y), fmt(spec.y_plus), fmt(spec.y_minus), fmt(unclamped_optimal_shift(p, f)),
             fmt(spec.theta)});
    } catch (const DomainError&) {
    }
  }
}

PlotSpec contour_plot() {
  return {"alpha",
          "y",
          std::nullopt,
          {{"1:2", "optimal y", "lines"}, {"1:3", "y+", "lines dashtype 2"}, {"1:4", "y-", "lines dashtype 2"}}};
}

int cmd_contour(const CLI::App* app, const ContourConfig& c, std::ostream& out, std::ostream&) {
  Table t;
  echo_options(app, t);
  t.header({"alpha", "y_opt", "y_plus", "y_minus", "y_unclamped", "theta"});
  append_contour(t, c);
  emit(t, c.out, out, contour_plot());
  return ok;
}

// ---- veff ----------------------------------------------------------------

struct VeffConfig {
  Physics phys;
  std::optional<double> y;
  double x_min = -3.0;
  double x_max = 3.0;
  std::size_t points = 601;
  Output out;
};

void append_veff(Table& t, const VeffConfig& c) {
  const PotentialParams p = c.phys.params();
  p.validate();
  if (!(c.x_min < c.x_max) || c.points < 2) throw DomainError("invalid x range");
  const double y = c.y ? *c.y : optimal_shift(p, c.phys.selector()).y;
  std::vector<double> xs(c.points);
  for (std::size_t k = 0; k < c.points; ++k)
    xs[k] = k + 1 == c.points ? c.x_max
                              : c.x_min + (c.x_max - c.x_min) * static_cast<double>(k) / static_cast<double>(c.points - 1);
  for (const auto& s : effective_potential(p, y, xs))
    t.row({fmt(c.phys.alpha), fmt(y), fmt(s.z.real()), fmt(s.v.real()), fmt(s.v.imag())});
}

PlotSpec veff_plot(const std::vector<double>& alphas) {
  PlotSpec spec{"x", "V_eff", std::nullopt, {}};
  for (double a : alphas) {
    spec.curves.push_back({"($1==" + fmt(a) + " ? $3 : 1/0):4", "Re, alpha=" + fmt(a), "lines"});
    spec.curves.push_back({"($1==" + fmt(a) + " ? $3 : 1/0):5", "Im, alpha=" + fmt(a), "lines dashtype 2"});
  }
  return spec;
}

int cmd_veff(const CLI::App* app, const VeffConfig& c, std::ostream& out, std::ostream&) {
  Table t;
  echo_options(app, t);
  t.header({"alpha", "y", "x", "re_v", "im_v"});
  append_veff(t, c);
  emit(t, c.out, out, veff_plot({c.phys.alpha}));
  return ok;
}

// ---- rpm -----------------------------------------------------------------

struct RpmConfig {
  Physics phys;
  std::string transform = "iq";
  int dmin = 2;
  int dmax = 8;
  unsigned precision = 60;
  std::optional<double> seed_e;
  std::optional<double> seed_f0;
  double seed_tolerance = 1e-6;
  int level = 1;
  std::optional<int> shift;
  int s = 0;
  std::size_t n = 4000;
  int digits = 20;
  Output out;
};

struct FdLevel {
  double energy;
  FamilySelector family;
  double y;
};

// Real levels of all families admissible at alpha, confirmed under refinement.
std::vector<FdLevel> fd_spectrum(const PotentialParams& p, std::size_t n, double e_max) {
  std::vector<FdLevel> out;
  for (const FamilySelector f : {FamilySelector{2, 1}, FamilySelector{6, 1}, FamilySelector{6, -1}}) {
    double y = 0.0;
    try {
      y = optimal_shift(p, f).y;
    } catch (const DomainError&) {
      continue;
    }
    const GridPolicy g{default_x_max(p, f, y), n, y};
    for (const auto& l : confirmed_real_eigenvalues(p, f, g, -5.0, e_max)) {
      const double e = richardson(l.coarse, l.energy);
      const bool dup = std::any_of(out.begin(), out.end(), [&](const FdLevel& o) { return std::abs(o.energy - e) < 1e-5; });
      if (!dup) out.push_back({e, f, y});
    }
  }
  std::sort(out.begin(), out.end(), [](const FdLevel& a, const FdLevel& b) { return a.energy < b.energy; });
  return out;
}

std::optional<int> fd_index(const std::vector<FdLevel>& levels, double e, double tol) {
  for (std::size_t i = 0; i < levels.size(); ++i)
    if (std::abs(levels[i].energy - e) <= tol) return static_cast<int>(i) + 1;
  return std::nullopt;
}

// -i psi'(0)/psi(0) needs the line through x = 0, so the level is recomputed
// on the real axis, which must lie inside the family's window.
double fd_log_derivative(const PotentialParams& p, const FdLevel& l, std::size_t n) {
  const ContourSpec spec = optimal_shift(p, l.family);
  if (spec.y_minus > 0.0 || spec.y_plus < 0.0)
    throw NumericalError("the real axis is outside the contour window; pass --seed-f0");
  const GridPolicy g{default_x_max(p, l.family, 0.0), n, 0.0};
  const auto op = operator_for(p, l.family, g);
  const auto roots = find_real_eigenvalues(op, l.energy - 0.05, l.energy + 0.05);
  if (roots.empty()) throw NumericalError("finite-difference level vanished while seeding f0");
  double best = roots.front();
  for (double r : roots)
    if (std::abs(r - l.energy) < std::abs(best - l.energy)) best = r;
  return eigenvector(op, best).log_derivative_at_center().real();
}

rpm::RpmProblem make_problem(const RpmConfig& c) {
  const PotentialParams p = c.phys.params();
  rpm::RpmProblem prob;
  if (c.transform == "iq") {
    prob = rpm::transform_iq(p);
  } else if (c.transform == "u") {
    prob = rpm::transform_u(p);
  } else {
    throw DomainError("transform must be iq or u");
  }
  prob.precision = c.precision;
  if (c.shift) prob.shift_d = *c.shift;
  prob.s = c.s;
  prob.hankel_dim = c.dmax;
  prob.validate();
  return prob;
}

const Row rpm_header{"alpha", "beta", "transform", "D", "E", "f0", "converged_digits", "fd_level", "status"};

// Runs one convergence table; returns rows appended and a note.
std::string append_rpm(Table& t, const RpmConfig& c) {
  if (c.dmin < 1 || c.dmax < c.dmin) throw DomainError("invalid Hankel dimension range");
  const PotentialParams p = c.phys.params();
  rpm::RpmProblem prob = make_problem(c);
  const auto fd = fd_spectrum(p, c.n, 30.0);
  rpm::Seeds seeds{0.0, std::nullopt, c.seed_tolerance};
  if (c.seed_e) {
    seeds.energy = *c.seed_e;
  } else {
    if (c.level < 1 || static_cast<std::size_t>(c.level) > fd.size())
      throw NumericalError("no finite-difference level " + std::to_string(c.level) + " to seed from");
    seeds.energy = fd[static_cast<std::size_t>(c.level) - 1].energy;
  }
  if (prob.kind == rpm::Kind::nonsymmetric) {
    if (c.seed_f0) {
      seeds.f0 = *c.seed_f0;
    } else {
      const FdLevel* nearest = nullptr;
      for (const auto& l : fd)
        if (!nearest || std::abs(l.energy - seeds.energy) < std::abs(nearest->energy - seeds.energy)) nearest = &l;
      if (!nearest) throw NumericalError("no finite-difference level to seed f0 from");
      seeds.f0 = fd_log_derivative(p, *nearest, c.n);
    }
  }
  const auto rows = rpm::convergence_table(prob, c.dmin, c.dmax, seeds);
  std::optional<double> last;
  for (const auto& r : rows) {
    if (!r.result) {
      t.row({fmt(c.phys.alpha), fmt(c.phys.beta), c.transform, fmt(r.dim), "", "", "", "", "no_convergence"});
      continue;
    }
    const double e = static_cast<double>(r.result->energy);
    const auto idx = fd_index(fd, e, 1e-4);
    last = e;
    t.row({fmt(c.phys.alpha), fmt(c.phys.beta), c.transform, fmt(r.dim), rpm::to_string(r.result->energy, c.digits),
           r.result->f0 ? rpm::to_string(*r.result->f0, c.digits) : "", fmt(r.result->converged_digits),
           idx ? fmt(*idx) : "", "ok"});
  }
  std::ostringstream note;
  note << "seed_E=" << fmt(seeds.energy);
  if (seeds.f0) note << " seed_f0=" << fmt(*seeds.f0);
  if (last) {
    const auto idx = fd_index(fd, *last, 1e-4);
    if (idx && *idx > 1) note << " converged to level " << *idx << " of the finite-difference spectrum (not the ground state)";
  }
  return note.str();
}

int cmd_rpm(const CLI::App* app, const RpmConfig& c, std::ostream& out, std::ostream&) {
  Table body;
  body.header(rpm_header);
  const std::string note = append_rpm(body, c);
  Table t;
  echo_options(app, t);
  t.meta("note", note);
  t.header(rpm_header);
  std::ostringstream tmp;
  body.write(tmp);
  // Re-emit rows from body after the metadata.
  std::istringstream lines(tmp.str());
  std::string line;
  std::getline(lines, line);
  Sink sink(c.out, out);
  t.write(sink.stream());
  while (std::getline(lines, line)) sink.stream() << line << '\n';
  return ok;
}

// ---- table presets -------------------------------------------------------

struct TableConfig {
  std::string preset;
  std::size_t n = 2000;
  bool serial = false;
  Output out;
};

int preset_sweeps(const TableConfig& c, std::ostream& out, std::ostream& err, Table& t,
                  const std::vector<std::pair<SweepConfig, std::string>>& runs,
                  std::optional<std::pair<double, double>> xrange) {
  t.header(sweep_header);
  int collapsed = 0;
  std::vector<std::tuple<double, std::string, std::string, int>> groups;
  for (const auto& [sc, label] : runs) {
    t.meta("run", label);
    const SweepResult s = run_sweep(sc);
    collapsed += append_sweep(t, s, sc.phys.beta, sc.y);
    collect_groups(s, sc.phys.beta, sc.y, groups);
  }
  emit(t, c.out, out, sweep_plot(t, groups, xrange));
  if (collapsed > 0) {
    err << "error: " << collapsed << " track(s) terminated by step collapse; CSV is partial\n";
    return numerical_failure;
  }
  return ok;
}

SweepConfig sweep_cfg(const TableConfig& c, double beta, int family, int branch, double from, double to, double step,
                      int levels, std::optional<double> y) {
  SweepConfig s;
  s.phys.beta = beta;
  s.phys.family = family;
  s.phys.branch = branch;
  s.alpha_from = from;
  s.alpha_to = to;
  s.alpha_step = step;
  s.levels = levels;
  s.n = c.n;
  s.y = y;
  s.serial = c.serial;
  return s;
}

std::string describe(const SweepConfig& s) {
  std::ostringstream os;
  os << "sweep beta=" << fmt(s.phys.beta) << " family=" << s.phys.family << (s.phys.branch > 0 ? "+" : "-")
     << " alpha=" << fmt(*s.alpha_from) << ".." << fmt(s.alpha_to) << " step=" << fmt(s.alpha_step)
     << " levels=" << s.levels << " path=" << path_label(s.y);
  return os.str();
}

int cmd_table(const TableConfig& c, std::ostream& out, std::ostream& err) {
  Table t;
  t.meta("command", "table");
  t.meta("preset", c.preset);
  t.meta("n", fmt(c.n));
  std::vector<std::pair<SweepConfig, std::string>> runs;
  auto add = [&](SweepConfig s) { runs.emplace_back(s, describe(s)); };

  if (c.preset == "fig1") {
    add(sweep_cfg(c, 0, 2, 1, 2, 1, 0.02, 1, 0.0));
    add(sweep_cfg(c, 0, 2, 1, 2, 3.9, 0.02, 1, 0.0));
    add(sweep_cfg(c, 0, 6, 1, 6, 4.1, 0.02, 1, 0.0));
    add(sweep_cfg(c, 0, 6, 1, 6, 7.9, 0.02, 1, 0.0));
    add(sweep_cfg(c, 0, 2, 1, 2, 8, 0.02, 1, std::nullopt));
    return preset_sweeps(c, out, err, t, runs, std::nullopt);
  }
  if (c.preset == "fig3") {
    add(sweep_cfg(c, 0, 2, 1, 2, 1, 0.02, 4, std::nullopt));
    add(sweep_cfg(c, 0, 2, 1, 2, 8, 0.02, 4, std::nullopt));
    add(sweep_cfg(c, 0, 6, 1, 6, 4.1, 0.02, 4, std::nullopt));
    add(sweep_cfg(c, 0, 6, 1, 6, 8, 0.02, 4, std::nullopt));
    return preset_sweeps(c, out, err, t, runs, std::nullopt);
  }
  if (c.preset == "fig4") {
    add(sweep_cfg(c, 0, 2, 1, 2, 0.95, 0.005, 9, std::nullopt));
    return preset_sweeps(c, out, err, t, runs, std::make_pair(0.95, 1.3));
  }
  if (c.preset == "fig6") {
    for (double beta : {0.5, 0.25, 0.0, -0.25}) add(sweep_cfg(c, beta, 2, 1, 2, 1, 0.01, 5, std::nullopt));
    return preset_sweeps(c, out, err, t, runs, std::nullopt);
  }
  if (c.preset == "fig2") {
    ContourConfig cc;
    cc.alpha_from = 0.5;
    cc.alpha_to = 10.0;
    cc.alpha_step = 0.05;
    t.header({"alpha", "y_opt", "y_plus", "y_minus", "y_unclamped", "theta"});
    append_contour(t, cc);
    emit(t, c.out, out, contour_plot());
    return ok;
  }
  if (c.preset == "fig5") {
    t.header({"alpha", "y", "x", "re_v", "im_v"});
    for (double a : {2.0, 3.0, 4.0}) {
      VeffConfig vc;
      vc.phys.alpha = a;
      append_veff(t, vc);
    }
    emit(t, c.out, out, veff_plot({2.0, 3.0, 4.0}));
    return ok;
  }
  std::vector<RpmConfig> rpm_runs;
  auto rpm_cfg = [&](double alpha, const std::string& transform, int dmin, int dmax, int level) {
    RpmConfig r;
    r.phys.alpha = alpha;
    r.transform = transform;
    r.dmin = dmin;
    r.dmax = dmax;
    r.level = level;
    return r;
  };
  if (c.preset == "table2") {
    rpm_runs.push_back(rpm_cfg(2, "iq", 2, 8, 1));
  } else if (c.preset == "table3") {
    rpm_runs.push_back(rpm_cfg(1, "iq", 2, 5, 1));
    rpm_runs.push_back(rpm_cfg(3, "iq", 2, 6, 1));
  } else if (c.preset == "table4") {
    rpm_runs.push_back(rpm_cfg(1, "u", 2, 8, 1));
    // Seeded at the second finite-difference level: the u-coordinate Hankel
    // roots do not approach the ground state for alpha = 3.
    rpm_runs.push_back(rpm_cfg(3, "u", 2, 8, 2));
  } else {
    throw DomainError("unknown preset '" + c.preset + "' (fig1..fig6, table2..table4)");
  }
  Table body;
  body.header(rpm_header);
  for (const auto& r : rpm_runs) {
    const std::string note = append_rpm(body, r);
    t.meta("run", "rpm alpha=" + fmt(r.phys.alpha) + " transform=" + r.transform + " D=" + fmt(r.dmin) + ".." +
                      fmt(r.dmax) + " " + note);
  }
  t.header(rpm_header);
  std::ostringstream tmp;
  body.write(tmp);
  std::istringstream lines(tmp.str());
  std::string line;
  std::getline(lines, line);
  Sink sink(c.out, out);
  t.write(sink.stream());
  while (std::getline(lines, line)) sink.stream() << line << '\n';
  return ok;
}

std::string normalize_key(std::string k) {
  std::replace(k.begin(), k.end(), '_', '-');
  return k;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Finds --config in the arguments and expands it into flag tokens placed
// before the explicit flags, so explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (!path) return args;
  std::ifstream in(*path);
  if (!in) throw DomainError("cannot read config file " + *path);
  std::vector<std::string> out{args.front()};
  for (const auto& [k, v] : parse_config(in)) out.push_back("--" + k + "=" + v);
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::pair<std::string, std::string>> parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = normalize_key(trim(line.substr(0, eq)));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw DomainError("config line " + std::to_string(lineno) + ": empty key or value");
    out.emplace_back(key, value);
  }
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Real spectra of the PT-symmetric potential -(i sinh x)^alpha cosh^beta x", "ptsym"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  std::string config_path;

  SolveConfig solve;
  auto* s = app.add_subcommand("solve", "real eigenvalues on one contour");
  add_physics(s, solve.phys, true);
  s->add_option("--n", solve.n, "interior grid points")->capture_default_str();
  s->add_option("--x-max", solve.x_max, "half-width of the grid (default: from the decay estimate)");
  s->add_option("--y", solve.y, "imaginary shift of the contour (default: optimal)");
  s->add_option("--e-min", solve.e_min, "lower end of the energy window")->capture_default_str();
  s->add_option("--e-max", solve.e_max, "upper end of the energy window")->capture_default_str();
  s->add_option("--scan-step", solve.scan_step, "energy scan step")->capture_default_str();
  s->add_option("--levels", solve.levels, "maximum number of rows (0: all)")->capture_default_str();
  s->add_flag("--log-derivative", solve.log_derivative, "add -i psi'(0)/psi(0) from inverse iteration");
  s->add_flag("--serial", solve.serial, "use the serial reference kernels");
  add_output(s, solve.out, false);

  SweepConfig sweep;
  auto* w = app.add_subcommand("sweep", "follow levels through an alpha range");
  add_physics(w, sweep.phys, false);
  w->add_option("--alpha-from", sweep.alpha_from, "start alpha (default: the family's alpha_R)");
  w->add_option("--alpha-to", sweep.alpha_to, "end alpha")->capture_default_str();
  w->add_option("--alpha-step", sweep.alpha_step, "alpha step")->capture_default_str();
  w->add_option("--levels", sweep.levels, "levels seeded at the start")->capture_default_str();
  w->add_option("--n", sweep.n, "interior grid points")->capture_default_str();
  w->add_option("--x-max", sweep.x_max, "half-width of the grid")->capture_default_str();
  w->add_option("--y", sweep.y, "fixed imaginary shift (default: optimal at every alpha)");
  w->add_option("--e-min", sweep.e_min, "lower end of the energy window");
  w->add_option("--e-max", sweep.e_max, "upper end of the energy window");
  w->add_option("--scan-step", sweep.scan_step, "energy scan step")->capture_default_str();
  w->add_flag("--serial", sweep.serial, "use the serial reference kernels");
  add_output(w, sweep.out, true);

  ContourConfig contour;
  auto* k = app.add_subcommand("contour", "optimal shift and admissible window versus alpha");
  add_physics(k, contour.phys, false);
  k->add_option("--alpha-from", contour.alpha_from, "first alpha")->capture_default_str();
  k->add_option("--alpha-to", contour.alpha_to, "last alpha")->capture_default_str();
  k->add_option("--alpha-step", contour.alpha_step, "alpha step")->capture_default_str();
  add_output(k, contour.out, true);

  VeffConfig veff;
  auto* v = app.add_subcommand("veff", "effective potential V(x + i y)");
  add_physics(v, veff.phys, true);
  v->add_option("--y", veff.y, "imaginary shift (default: optimal)");
  v->add_option("--x-min", veff.x_min, "left end of the sampled x range")->capture_default_str();
  v->add_option("--x-max", veff.x_max, "right end of the sampled x range")->capture_default_str();
  v->add_option("--points", veff.points, "number of samples")->capture_default_str();
  add_output(v, veff.out, true);

  RpmConfig rpmc;
  auto* r = app.add_subcommand("rpm", "Riccati-Pade convergence table");
  add_physics(r, rpmc.phys, true);
  r->add_option("--transform", rpmc.transform, "iq or u")->capture_default_str();
  r->add_option("--dmin", rpmc.dmin, "smallest Hankel dimension")->capture_default_str();
  r->add_option("--dmax", rpmc.dmax, "largest Hankel dimension")->capture_default_str();
  r->add_option("--precision", rpmc.precision, "decimal digits (>= 60)")->capture_default_str();
  r->add_option("--seed-e", rpmc.seed_e, "energy seed (default: finite-difference level)");
  r->add_option("--seed-f0", rpmc.seed_f0, "f0 seed (default: finite-difference eigenvector)");
  r->add_option("--seed-tolerance", rpmc.seed_tolerance, "absolute uncertainty of the energy seed")
      ->capture_default_str();
  r->add_option("--level", rpmc.level, "finite-difference level used as seed (1 = lowest)")->capture_default_str();
  r->add_option("--shift", rpmc.shift, "Hankel offset d");
  r->add_option("--s", rpmc.s, "regularization index (symmetric problems)")->capture_default_str();
  r->add_option("--n", rpmc.n, "grid points of the seeding solve")->capture_default_str();
  r->add_option("--digits", rpmc.digits, "decimals printed")->capture_default_str();
  add_output(r, rpmc.out, false);

  TableConfig table;
  auto* tb = app.add_subcommand("table", "named reproduction presets");
  tb->add_option("preset", table.preset, "fig1..fig6, table2..table4")->required();
  tb->add_option("--n", table.n, "interior grid points for sweeps")->capture_default_str();
  tb->add_flag("--serial", table.serial, "use the serial reference kernels");
  add_output(tb, table.out, true);

  for (auto* sub : {s, w, k, v, r, tb}) sub->add_option("--config", config_path, "flat key = value file");

  try {
    const auto args = raw_args.empty() ? raw_args : expand_config(raw_args);
    std::vector<std::string> argv_store{"ptsym"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_store) argv.push_back(a.c_str());
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return invalid_config;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return invalid_config;
  }

  try {
    if (s->parsed()) return cmd_solve(s, solve, out, err);
    if (w->parsed()) return cmd_sweep(w, sweep, out, err);
    if (k->parsed()) return cmd_contour(k, contour, out, err);
    if (v->parsed()) return cmd_veff(v, veff, out, err);
    if (r->parsed()) return cmd_rpm(r, rpmc, out, err);
    if (tb->parsed()) return cmd_table(table, out, err);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return invalid_config;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return numerical_failure;
  }
  return invalid_config;
}

}  // namespace ptsym::cli
