#include "vortex/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "vortex/analysis.hpp"

namespace vortex::cli {

namespace fs = std::filesystem;

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string model_of(const std::string& command) {
  if (command == "solve-log-zero") return "log-zero";
  if (command == "solve-log-plateau") return "log-plateau";
  if (command == "solve-sat-constrained") return "sat-constrained";
  throw DomainError("unknown solve command '" + command + "'");
}

std::string command_of(const std::string& model) {
  if (model == "log-zero" || model == "log-plateau" || model == "sat-constrained") return "solve-" + model;
  throw DomainError("sweep: model must be one of log-zero, log-plateau, sat-constrained (got '" + model + "')");
}

double required(const RunSpec& spec, const std::string& key) {
  if (!spec.has(key)) throw DomainError("missing required parameter " + key);
  return spec.number(key, 0.0);
}

void write_file(const fs::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to " + path.string() + " failed");
}

fs::path out_dir(const RunSpec& spec) {
  if (spec.has("out_dir")) return spec.get("out_dir", ".");
  if (const char* env = std::getenv("VORTEX_OUT_DIR"); env && *env) return env;
  return ".";
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string opt_double(const std::optional<double>& x) { return x ? format_double(*x) : "none"; }
std::string opt_bool(const std::optional<bool>& x) { return x ? (*x ? "true" : "false") : "none"; }

struct Outcome {
  ResultRecord record;
  std::optional<SolveReport> report;
  std::optional<VortexProblem<double>> problem;
};

Outcome solve_spec(const std::string& command, const RunSpec& spec) {
  Outcome o;
  o.record.model = model_of(command);
  o.record.n = int(spec.integer("n", 1));
  o.record.seed = spec.integer("seed", 0);
  const auto problem = problem_from_spec(command, spec);
  const auto config = config_from_spec(command, spec);
  SolveReport rep = solve(problem, config);
  auto& rec = o.record;
  rec.omega = rep.omega;
  rec.energy = rep.energy;
  rec.power = rep.power;
  rec.grad_norm = rep.grad_norm;
  rec.el_residual_norm = rep.el_residual_norm;
  rec.iterations = rep.iterations;
  rec.converged = rep.converged;
  if (rep.decay) rec.decay_rate = rep.decay->rate;
  if (!problem.is_logarithmic()) {
    const auto& sat = problem.saturable();
    const auto bound = omega_bound(sat.s, sat.gamma, problem.n, std::get<PowerConstrained<double>>(problem.regime).P0);
    rec.bound_lower = bound.lower;
    rec.bound_check = check_omega_in_bound(rep, bound);
  }
  if (!rep.converged) rec.note = rep.message;
  o.report = std::move(rep);
  o.problem = problem;
  return o;
}

void emit_solve(const fs::path& dir, const std::string& prefix, const Outcome& o) {
  write_file(dir / (prefix + "_profile.csv"), profile_table(*o.report, *o.problem));
  write_file(dir / (prefix + "_result.txt"), result_document(o.record));
}

int run_solve(const RunSpec& spec, std::ostream& log) {
  const Outcome o = solve_spec(spec.command, spec);
  const fs::path dir = out_dir(spec);
  const std::string prefix = spec.get("prefix", o.record.model);
  emit_solve(dir, prefix, o);
  log << result_document(o.record);
  if (!o.record.converged) {
    log << "not converged: " << o.report->message << "\n";
    return kNotConverged;
  }
  return kOk;
}

int run_sweep(const RunSpec& spec, std::ostream& log) {
  const std::string model = spec.get("model", "");
  const std::string command = command_of(model);
  const std::string param = spec.get("param", "");
  if (param.empty()) throw DomainError("sweep: param=<key> required");
  const std::vector<double> values = spec.list("values");
  if (values.empty()) throw DomainError("sweep: values=<v1,v2,...> required");
  std::vector<double> seeds = spec.has("seeds") ? spec.list("seeds") : std::vector<double>{double(spec.integer("seed", 0))};
  if (seeds.empty()) seeds.push_back(0.0);

  struct Row {
    double value;
    long seed;
    RunSpec spec;
    Outcome outcome;
  };
  std::vector<Row> rows;
  for (double v : values)
    for (double s : seeds) {
      Row row{v, long(s), spec, {}};
      row.spec.command = command;
      row.spec.values[param] = format_double(v);
      row.spec.values["seed"] = std::to_string(long(s));
      rows.push_back(std::move(row));
    }

  auto work = [&](Row& row) {
    try {
      row.outcome = solve_spec(command, row.spec);
    } catch (const std::exception& e) {
      row.outcome = {};
      row.outcome.record.model = model;
      row.outcome.record.n = int(row.spec.integer("n", 1));
      row.outcome.record.seed = row.seed;
      const double nan = std::nan("");
      row.outcome.record.omega = param == "omega" ? row.value : nan;
      row.outcome.record.energy = nan;
      row.outcome.record.grad_norm = nan;
      row.outcome.record.el_residual_norm = nan;
      row.outcome.record.converged = false;
      row.outcome.record.note = e.what();
    }
  };
  const long jobs = std::max(1L, spec.integer("jobs", 1));
  if (jobs == 1) {
    for (auto& row : rows) work(row);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (long j = 0; j < jobs; ++j)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next++) < rows.size();) work(rows[i]);
      });
    for (auto& t : pool) t.join();
  }

  const fs::path dir = out_dir(spec);
  const std::string prefix = spec.get("prefix", "sweep");
  std::ostringstream table;
  table << "param,value,seed,model,n,omega,energy,power,grad_norm,el_residual_norm,iterations,converged,decay_rate,"
           "bound_lower,bound_check,note\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i].outcome.record;
    table << param << ',' << format_double(rows[i].value) << ',' << rows[i].seed << ',' << r.model << ',' << r.n << ','
          << format_double(r.omega) << ',' << format_double(r.energy) << ',' << opt_double(r.power) << ','
          << format_double(r.grad_norm) << ',' << format_double(r.el_residual_norm) << ',' << r.iterations << ','
          << (r.converged ? "true" : "false") << ',' << opt_double(r.decay_rate) << ',' << opt_double(r.bound_lower)
          << ',' << opt_bool(r.bound_check) << ',' << csv_quote(r.note) << '\n';
    const std::string row_prefix = prefix + "_row" + std::to_string(i);
    if (rows[i].outcome.report) emit_solve(dir, row_prefix, rows[i].outcome);
    else write_file(dir / (row_prefix + "_result.txt"), result_document(r));
  }
  write_file(dir / (prefix + "_sweep.csv"), table.str());

  // best energy over seeds for every parameter value, then overall
  std::ostringstream summary;
  std::optional<std::size_t> overall;
  for (double v : values) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].value != v || !rows[i].outcome.record.converged) continue;
      if (!best || rows[i].outcome.record.energy < rows[best.value()].outcome.record.energy) best = i;
    }
    summary << param << '=' << format_double(v);
    if (best) {
      summary << " best_seed=" << rows[*best].seed << " best_energy=" << format_double(rows[*best].outcome.record.energy)
              << '\n';
      if (!overall || rows[*best].outcome.record.energy < rows[*overall].outcome.record.energy) overall = best;
    } else {
      summary << " best=none\n";
    }
  }
  if (overall)
    summary << "overall " << param << '=' << format_double(rows[*overall].value) << " seed=" << rows[*overall].seed
            << " energy=" << format_double(rows[*overall].outcome.record.energy) << '\n';
  else
    summary << "overall none\n";
  write_file(dir / (prefix + "_summary.txt"), summary.str());
  log << table.str() << summary.str();
  return kOk;
}

// Pure-math certificates that need no solve.
int run_verify(const RunSpec& spec, std::ostream& log) {
  int failures = 0;
  auto line = [&](bool ok, const std::string& name, const std::string& detail) {
    log << (ok ? "PASS " : "FAIL ") << name << "  " << detail << '\n';
    if (!ok) ++failures;
  };
  const auto draws = spec.integer("draws", 100000);
  std::mt19937_64 gen(static_cast<std::uint64_t>(spec.integer("seed", 12345)));
  std::uniform_real_distribution<double> ut(-10.0, 10.0), us(0.01, 10.0), ug(2.01, 10.0);

  double qmin = INFINITY;
  for (long i = 0; i < draws; ++i) qmin = std::min(qmin, q_aux(ut(gen), us(gen), ug(gen)));
  line(qmin >= 0.0 && q_aux(0.0, 1.0, 3.0) == 0.0, "q_nonnegative", "min q over " + std::to_string(draws) + " draws = " + format_double(qmin));

  const auto tent = tent_certificate(1.0, 3.0, 1, 1.0, 1.0, 4000);
  const double prel = std::abs(tent.power - tent.power_exact) / tent.power_exact;
  line(prel <= 1e-6, "tent_power", "P = " + format_double(tent.power) + " vs 4π/3, relative " + format_double(prel));
  line(tent.bound_holds, "tent_action_bound", "J(u0) = " + format_double(tent.action) + " <= " + format_double(tent.action_bound));
  const double brel = std::abs(tent.optimized_bound_numeric - tent.optimized_bound) / tent.optimized_bound;
  line(brel <= 1e-10, "tent_optimized_bound", "min over b = " + format_double(tent.optimized_bound_numeric) +
                                                   " closed form " + format_double(tent.optimized_bound));

  std::uniform_real_distribution<double> bs(0.1, 5.0), bg(2.1, 6.0);
  double worst = 0.0;
  for (int i = 0; i < 21; ++i) {
    const double s = i == 0 ? 1.0 : bs(gen), g = i == 0 ? 3.0 : bg(gen);
    const double closed = omega_bound(s, g, 1, 1.0).saturation_term;
    worst = std::max(worst, std::abs(saturation_max_by_search(s, g) - closed) / closed);
  }
  line(worst <= 1e-6, "bound_first_term", "grid search vs closed form, worst relative " + format_double(worst));
  return failures == 0 ? kOk : kNotConverged;
}

}  // namespace

std::string RunSpec::get(const std::string& key, const std::string& fallback) const {
  const auto it = values.find(key);
  return it == values.end() ? fallback : it->second;
}

double RunSpec::number(const std::string& key, double fallback) const {
  const auto it = values.find(key);
  if (it == values.end()) return fallback;
  try {
    std::size_t pos = 0;
    const double x = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw DomainError("parameter " + key + " must be a number (got '" + it->second + "')");
  }
}

long RunSpec::integer(const std::string& key, long fallback) const {
  const double x = number(key, double(fallback));
  if (x != std::floor(x)) throw DomainError("parameter " + key + " must be an integer");
  return long(x);
}

bool RunSpec::flag(const std::string& key, bool fallback) const {
  const std::string v = get(key, fallback ? "true" : "false");
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw DomainError("parameter " + key + " must be true or false (got '" + v + "')");
}

std::vector<double> RunSpec::list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(get(key, ""));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    RunSpec one;
    one.values[key] = item;
    out.push_back(one.number(key, 0.0));
  }
  return out;
}

std::map<std::string, std::string> read_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read spec file " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError(path + ":" + std::to_string(lineno) + ": expected key = value");
    out[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return out;
}

RunSpec parse_args(const std::vector<std::string>& args) {
  RunSpec spec;
  std::map<std::string, std::string> cli;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto eq = args[i].find('=');
    if (eq == std::string::npos) {
      if (!spec.command.empty()) throw DomainError("exactly one command expected (got '" + spec.command + "' and '" + args[i] + "')");
      spec.command = args[i];
      continue;
    }
    cli[trim(args[i].substr(0, eq))] = trim(args[i].substr(eq + 1));
  }
  if (const auto it = cli.find("spec"); it != cli.end()) spec.values = read_spec_file(it->second);
  for (const auto& [k, v] : cli) spec.values[k] = v;
  if (spec.command.empty()) spec.command = spec.get("command", "");
  spec.values.erase("spec");
  spec.values.erase("command");
  return spec;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string result_document(const ResultRecord& r) {
  std::ostringstream o;
  o << "model=" << r.model << '\n'
    << "n=" << r.n << '\n'
    << "omega=" << format_double(r.omega) << '\n'
    << "energy=" << format_double(r.energy) << '\n'
    << "power=" << opt_double(r.power) << '\n'
    << "grad_norm=" << format_double(r.grad_norm) << '\n'
    << "el_residual_norm=" << format_double(r.el_residual_norm) << '\n'
    << "iterations=" << r.iterations << '\n'
    << "converged=" << (r.converged ? "true" : "false") << '\n'
    << "decay_rate=" << opt_double(r.decay_rate) << '\n'
    << "bound_lower=" << opt_double(r.bound_lower) << '\n'
    << "bound_check=" << opt_bool(r.bound_check) << '\n'
    << "seed=" << r.seed << '\n';
  if (!r.note.empty()) o << "note=" << r.note << '\n';
  return o.str();
}

std::string profile_table(const SolveReport& report, const VortexProblem<double>& problem) {
  const auto res = el_residual(problem, report.profile, report.omega);
  std::string out = "r,u,residual\n";
  for (Eigen::Index i = 0; i < report.profile.size(); ++i)
    out += format_double(report.profile.r(i)) + ',' + format_double(report.profile[i]) + ',' + format_double(res[i]) + '\n';
  return out;
}

VortexProblem<double> problem_from_spec(const std::string& command, const RunSpec& spec) {
  const int n = int(spec.integer("n", 1));
  const std::string model = model_of(command);
  if (model == "log-zero") {
    std::optional<double> mu;
    if (spec.has("mu")) mu = spec.number("mu", 0.0);
    return log_zero_problem(spec.number("alpha", 1.0), spec.number("beta", 1.0), n, required(spec, "omega"),
                            spec.number("R", 20.0), mu);
  }
  if (model == "log-plateau")
    return log_plateau_problem(spec.number("alpha", 1.0), spec.number("beta", 1.0), n, required(spec, "omega"),
                               spec.number("R", 40.0));
  return sat_constrained_problem(spec.number("s", 1.0), spec.number("gamma", 3.0), n, required(spec, "P0"),
                                 spec.number("R", 20.0));
}

SolverConfig config_from_spec(const std::string& command, const RunSpec& spec) {
  (void)command;
  SolverConfig c;
  c.cells = spec.integer("N", 4000);
  const std::string grading = spec.get("grading", "uniform");
  if (grading == "geometric") c.grading = Grading<double>::geometric(spec.number("ratio", 1.0));
  else if (grading != "uniform") throw DomainError("grading must be uniform or geometric");
  c.max_iters = int(spec.integer("max_iters", c.max_iters));
  c.grad_tol = spec.number("grad_tol", c.grad_tol);
  c.armijo.c = spec.number("armijo_c", c.armijo.c);
  c.armijo.ratio = spec.number("armijo_ratio", c.armijo.ratio);
  c.armijo.max_backtracks = int(spec.integer("max_backtracks", c.armijo.max_backtracks));
  c.nonneg_projection = spec.flag("nonneg", c.nonneg_projection);
  c.preconditioned = spec.flag("preconditioned", c.preconditioned);
  c.truncation_doublings = int(spec.integer("truncation_doublings", 0));
  const std::string init = spec.get("init", "default");
  if (init == "trial") c.init = TrialInit{spec.number("trial_k", 0.0), spec.number("trial_lambda", 0.0), spec.number("trial_radius", 0.0)};
  else if (init == "tent") c.init = TentInit{spec.number("tent_a", 1.0), spec.number("tent_b", 1.0)};
  else if (init == "random") c.init = RandomInit{static_cast<std::uint64_t>(spec.integer("seed", 0)), spec.number("amplitude", 1.0)};
  else if (init != "default") throw DomainError("init must be default, trial, tent or random");
  c.validate();
  return c;
}

int run(const RunSpec& spec, std::ostream& log) {
  try {
    if (spec.command == "verify") return run_verify(spec, log);
    if (spec.command == "sweep") return run_sweep(spec, log);
    if (spec.command.rfind("solve-", 0) == 0) return run_solve(spec, log);
    throw DomainError("unknown command '" + spec.command +
                      "' (expected solve-log-zero, solve-log-plateau, solve-sat-constrained, verify or sweep)");
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kIo;
  } catch (const DomainError& e) {
    log << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const SolveError& e) {
    log << "error: " << e.what() << '\n';
    return kNotConverged;
  }
}

int main(const std::vector<std::string>& args, std::ostream& log) {
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    log << "usage: vortex <command> [key=value ...] [spec=FILE]\n"
           "commands: solve-log-zero solve-log-plateau solve-sat-constrained verify sweep\n";
    return args.empty() ? kValidation : kOk;
  }
  try {
    return run(parse_args(args), log);
  } catch (const IoError& e) {
    log << "error: " << e.what() << '\n';
    return kIo;
  } catch (const DomainError& e) {
    log << "error: " << e.what() << '\n';
    return kValidation;
  }
}

}  // namespace vortex::cli
