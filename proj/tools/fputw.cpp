// fputw: command-line driver for the traveling-wave and lattice computations.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "fputw/checkpoint.hpp"
#include "fputw/diatomic.hpp"
#include "fputw/dispersion.hpp"
#include "fputw/lattice.hpp"
#include "fputw/monatomic.hpp"

namespace fs = std::filesystem;
using namespace fputw;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Settings {
  std::string out = ".";
  std::string ckpt;
  double length = 32.0;
  int mesh = 0;  // 0: module default
  int gauss = 3;

  std::optional<double> kappa, sigma, m, mu, beta;
  std::string fix;
  std::string vary = "mu";
  std::optional<double> from, to, step;
  std::string guess, seed_ckpt, ic;
  bool landscape = false;

  double horizon = 5000.0;
  double dt = 1e-3;
  double recenter = 60.0;
  double width = 1e-7;
};

// Collects written files and produces the manifest on exit.
class Run {
 public:
  Run(std::string command, std::vector<std::string> args) : command_(std::move(command)), args_(std::move(args)) {}

  void set_dir(const std::string& dir) {
    dir_ = dir;
    fs::create_directories(dir_);
  }
  std::string path(const std::string& name) const { return (fs::path(dir_) / name).string(); }
  void wrote(const std::string& file) { files_.push_back(file); }
  void note(const std::string& key, nlohmann::json value) { extra_[key] = std::move(value); }

  void finish(const std::string& status, const std::string& reason = "", const std::string& message = "") {
    if (dir_.empty()) return;
    nlohmann::json j;
    j["tool"] = "fputw";
    j["command"] = command_;
    j["args"] = args_;
    j["status"] = status;
    if (!reason.empty()) j["reason"] = reason;
    if (!message.empty()) j["message"] = message;
    j["files"] = files_;
    for (auto& [k, v] : extra_.items()) j[k] = v;
    j["finished_at"] = static_cast<long long>(std::time(nullptr));
    std::ofstream(path("manifest.json")) << j.dump(2) << '\n';
  }

 private:
  std::string command_;
  std::vector<std::string> args_;
  std::string dir_;
  std::vector<std::string> files_;
  nlohmann::json extra_ = nlohmann::json::object();
};

class CsvFile {
 public:
  CsvFile(Run& run, const std::string& name, const std::string& header) : path_(run.path(name)), out_(path_) {
    if (!out_) throw CheckpointError(CheckpointError::Kind::Io, "cannot write " + path_);
    out_ << header << '\n';
    run.wrote(path_);
  }
  void row(const std::string& r) { out_ << r << '\n' << std::flush; }

 private:
  std::string path_;
  std::ofstream out_;
};

double require(const std::optional<double>& v, const char* flag) {
  if (!v) throw UsageError(std::string("missing required option ") + flag);
  return *v;
}

double mass_parameter(const Settings& s) {
  if (s.m && s.mu) throw UsageError("give exactly one of --m and --mu");
  if (s.m) {
    if (!(*s.m > 0.0)) throw UsageError("--m must be positive");
    return 1.0 / *s.m - 1.0;
  }
  if (s.mu) return *s.mu;
  throw UsageError("one of --m or --mu is required");
}

std::pair<diatomic::FixedParam, double> parse_fix(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw UsageError("--fix expects name=value, got '" + spec + "'");
  try {
    return {diatomic::parse_fixed(spec.substr(0, eq)), std::stod(spec.substr(eq + 1))};
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  } catch (const std::exception&) {
    throw UsageError("--fix value is not a number: '" + spec + "'");
  }
}

monatomic::SolverOptions mono_options(const Settings& s) {
  monatomic::SolverOptions o;
  o.length = s.length;
  if (s.mesh > 0) o.intervals = s.mesh;
  o.gauss = s.gauss;
  return o;
}

diatomic::Options di_options(const Settings& s) {
  diatomic::Options o;
  o.length = s.length;
  if (s.mesh > 0) o.intervals = s.mesh;
  o.gauss = s.gauss;
  return o;
}

std::string ckpt_path(Run& run, const Settings& s, const std::string& fallback) {
  return s.ckpt.empty() ? run.path(fallback) : s.ckpt;
}

template <class T>
void save_ckpt(Run& run, const std::string& path, const T& obj) {
  io::save(path, obj);
  run.wrote(path);
}

diatomic::DiatomicWave load_wave(const std::string& path) {
  return io::diatomic_from_text(io::read_file(path));
}

std::string wave_row(const diatomic::DiatomicWave& w, bool landscape) {
  const diatomic::DiatomicWave v = landscape && w.scalars.mu < 0.0 ? diatomic::symmetry_transform(w) : w;
  return diatomic::branch_csv_row(diatomic::summarize(v));
}

// Monatomic seed continued in mu from 0 to the requested value.
diatomic::DiatomicWave wave_from_seed(double kappa, double mu, const diatomic::Options& opt) {
  const auto mono = monatomic::solve_profile(kappa, {opt.length, opt.intervals, opt.gauss, opt.newton});
  auto w = diatomic::solve_wave(kappa, diatomic::FixedParam::Mu, 0.0, diatomic::seed_from_monatomic(mono, opt), opt);
  if (mu == 0.0) return w;
  diatomic::BranchTarget target{diatomic::FixedParam::Mu, std::min(mu, 0.0), std::max(mu, 0.0)};
  const double step = std::copysign(std::min(0.01, std::abs(mu)), mu);
  auto br = diatomic::continue_branch(w, diatomic::FixedParam::Mu, step, target, {}, opt);
  if (!br.last) throw NonConvergence("continuation produced no point", 0.0, 0);
  // land exactly on the requested mass from the nearest point
  return diatomic::solve_wave(kappa, diatomic::FixedParam::Mu, mu, *br.last, opt);
}

// ---- subcommands ---------------------------------------------------------------

void cmd_mono_scan(Run& run, const Settings& s) {
  const double from = require(s.from, "--from"), to = require(s.to, "--to"), step = require(s.step, "--step");
  if (!(step > 0.0) || to < from) throw UsageError("need --from <= --to and a positive --step");
  CsvFile csv(run, "mono_scan.csv", monatomic::scan_csv_header());
  std::optional<monatomic::JostSolution> last;
  monatomic::kappa_scan(from, to, step, mono_options(s), [&](const monatomic::ScanRow& row, const monatomic::JostSolution& j) {
    csv.row(monatomic::scan_csv_row(row));
    last = j;
  });
  if (last) save_ckpt(run, ckpt_path(run, s, "mono_scan_last.ckpt"), *last);
}

monatomic::JostSolution jost_at(const Settings& s) {
  const double kappa = require(s.kappa, "--kappa");
  const auto opt = mono_options(s);
  const auto wave = monatomic::solve_profile(kappa, opt);
  return monatomic::solve_jost(wave, opt);
}

void cmd_jost(Run& run, const Settings& s) {
  const auto j = jost_at(s);
  CsvFile csv(run, "jost.csv", "kappa,sigma,omega_ups,theta_ups,beta_ups,omega_theta_over_kappa,newton_iters");
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d", j.kappa, j.system.params()[0], j.omega,
                j.theta, j.beta, j.omega * j.theta / j.kappa, j.report.iterations);
  csv.row(buf);
  save_ckpt(run, ckpt_path(run, s, "jost.ckpt"), j);
}

void cmd_kc(Run& run, const Settings& s) {
  monatomic::JostSolution j;
  if (!s.guess.empty())
    j = io::jost_from_text(io::read_file(s.guess));
  else
    j = jost_at(s);
  const auto a = monatomic::amplitude_coefficient(j, j.kappa);
  monatomic::ScanRow row{j.kappa, j.system.params()[0], j.omega, j.theta, j.beta, a, j.report.iterations};
  CsvFile csv(run, "kc.csv", monatomic::scan_csv_header());
  csv.row(monatomic::scan_csv_row(row));
}

void cmd_periodic(Run& run, const Settings& s) {
  const double sigma = require(s.sigma, "--sigma");
  const double mu = mass_parameter(s);
  const double beta = s.beta.value_or(0.0);
  const auto opt = di_options(s);
  // ramp beta from the linear mode
  diatomic::PeriodicRipple r = diatomic::solve_periodic(sigma, mu, 0.0, opt);
  const int ramps = beta == 0.0 ? 0 : std::max(1, static_cast<int>(std::ceil(std::abs(beta) / 0.01)));
  for (int k = 1; k <= ramps; ++k) r = diatomic::solve_periodic(sigma, mu, beta * k / ramps, opt, &r);
  CsvFile csv(run, "periodic.csv",
              "sigma,m,mu,beta_P,omega_P,omega,alpha_P,orientation,orientation_flip,newton_iters,resid");
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%.17g", sigma,
                r.scalars.m(), mu, r.scalars.beta, r.scalars.omega, diatomic::ripple_frequency(r), r.alpha,
                r.orientation, r.orientation_flip ? 1 : 0, r.report.iterations, r.report.residual);
  csv.row(buf);
  save_ckpt(run, ckpt_path(run, s, "periodic.ckpt"), r);
}

void cmd_wave(Run& run, const Settings& s) {
  const double kappa = require(s.kappa, "--kappa");
  const auto opt = di_options(s);
  diatomic::DiatomicWave w;
  if (s.fix.empty()) throw UsageError("wave needs --fix name=value");
  const auto [fixed, value] = parse_fix(s.fix);
  if (!s.guess.empty()) {
    w = diatomic::solve_wave(kappa, fixed, value, load_wave(s.guess), opt);
  } else if (fixed == diatomic::FixedParam::Mu) {
    w = wave_from_seed(kappa, value, opt);
  } else {
    throw UsageError("fixing " + diatomic::to_string(fixed) + " needs a starting wave (--guess)");
  }
  CsvFile csv(run, "wave.csv", diatomic::branch_csv_header());
  csv.row(wave_row(w, s.landscape));
  save_ckpt(run, ckpt_path(run, s, "wave.ckpt"), w);
}

diatomic::DiatomicWave starting_wave(const Settings& s, const diatomic::Options& opt) {
  if (!s.seed_ckpt.empty()) return load_wave(s.seed_ckpt);
  const double kappa = require(s.kappa, "--kappa");
  const double mu = s.m || s.mu ? mass_parameter(s) : 0.0;
  return wave_from_seed(kappa, mu, opt);
}

void cmd_branch(Run& run, const Settings& s) {
  const auto opt = di_options(s);
  const auto vary = diatomic::parse_fixed(s.vary);
  auto seed = starting_wave(s, opt);
  if (seed.fixed != vary) seed = diatomic::solve_wave(seed.kappa, vary, seed.scalars.get(vary), seed, opt);
  const double to = require(s.to, "--to");
  const double start = seed.scalars.get(vary);
  const double step = std::copysign(s.step.value_or(0.01), to - start);
  diatomic::BranchTarget target{vary, std::min(start, to), std::max(start, to)};
  CsvFile csv(run, "branch.csv", diatomic::branch_csv_header());
  csv.row(wave_row(seed, s.landscape));
  const std::string ck = ckpt_path(run, s, "branch_last.ckpt");
  std::size_t rows = 1;
  auto br = diatomic::continue_branch(seed, vary, step, target, {}, opt, [&](const diatomic::DiatomicWave& w) {
    csv.row(wave_row(w, s.landscape));
    ++rows;
    io::save(ck, w);
  });
  if (rows > 1) run.wrote(ck);
  nlohmann::json folds = nlohmann::json::array(), signs = nlohmann::json::array();
  for (const auto& f : br.folds) folds.push_back({{"index", f.index}, {"param", diatomic::to_string(f.param)}});
  for (auto i : br.sign_changes) signs.push_back(i);
  run.note("termination", br.termination);
  run.note("folds", folds);
  run.note("alpha_sign_changes", signs);
}

void cmd_solitary(Run& run, const Settings& s) {
  const auto opt = di_options(s);
  const double kappa = require(s.kappa, "--kappa");
  auto seed = s.seed_ckpt.empty() ? wave_from_seed(kappa, 0.0, opt) : load_wave(s.seed_ckpt);
  if (seed.fixed != diatomic::FixedParam::Mu)
    seed = diatomic::solve_wave(seed.kappa, diatomic::FixedParam::Mu, seed.scalars.mu, seed, opt);
  const double to = s.to.value_or(-0.95);
  const double step = std::copysign(s.step.value_or(0.01), to - seed.scalars.mu);
  std::optional<diatomic::DiatomicWave> prev;
  std::optional<std::pair<diatomic::DiatomicWave, diatomic::DiatomicWave>> bracket;
  prev = seed;
  diatomic::BranchTarget target{diatomic::FixedParam::Mu, std::min(to, seed.scalars.mu), std::max(to, seed.scalars.mu)};
  try {
    diatomic::continue_branch(seed, diatomic::FixedParam::Mu, step, target, {}, opt,
                              [&](const diatomic::DiatomicWave& w) {
                                if (!bracket && prev && prev->alpha * w.alpha < 0.0 &&
                                    w.fixed == diatomic::FixedParam::Mu && prev->fixed == diatomic::FixedParam::Mu) {
                                  bracket.emplace(*prev, w);
                                  throw diatomic::BranchTerminated("bracket", "sign change found");
                                }
                                prev = w;
                              });
  } catch (const diatomic::BranchTerminated& e) {
    if (e.reason() != "bracket") throw;
  }
  if (!bracket) throw NoBracket("no alpha_P sign change between mu = " + std::to_string(seed.scalars.mu) +
                                " and " + std::to_string(to));
  const auto r = diatomic::find_solitary(bracket->first, bracket->second, diatomic::FixedParam::Mu, s.width, opt);
  CsvFile csv(run, "solitary.csv", diatomic::branch_csv_header());
  csv.row(wave_row(r.wave, s.landscape));
  run.note("bracket", {r.lo, r.hi});
  run.note("bisection_steps", r.bisection_steps);
  save_ckpt(run, ckpt_path(run, s, "solitary.ckpt"), r.wave);
}

void cmd_cross_section(Run& run, const Settings& s) {
  const auto opt = di_options(s);
  const double sigma = require(s.sigma, "--sigma");
  const double from = require(s.from, "--from"), to = require(s.to, "--to");
  const double step = std::abs(s.step.value_or(0.125));
  if (!(step > 0.0)) throw UsageError("--step must be positive");
  Settings seed_settings = s;
  seed_settings.kappa = from;
  auto w = starting_wave(seed_settings, opt);
  if (std::abs(w.kappa - from) > 1e-12) w = diatomic::solve_wave_at_kappa(from, w, opt);
  // bring sigma to the cut with mu free
  if (w.fixed != diatomic::FixedParam::Sigma) {
    const double start = w.scalars.sigma;
    if (start != sigma) {
      diatomic::BranchTarget target{diatomic::FixedParam::Sigma, std::min(start, sigma), std::max(start, sigma)};
      auto br = diatomic::continue_branch(
          diatomic::solve_wave(w.kappa, diatomic::FixedParam::Sigma, start, w, opt), diatomic::FixedParam::Sigma,
          std::copysign(0.01, sigma - start), target, {}, opt);
      w = *br.last;
    }
    w = diatomic::solve_wave(w.kappa, diatomic::FixedParam::Sigma, sigma, w, opt);
  }
  CsvFile csv(run, "cross_section.csv", diatomic::branch_csv_header());
  csv.row(wave_row(w, s.landscape));
  const double dir = to >= from ? 1.0 : -1.0;
  const int count = static_cast<int>(std::floor(std::abs(to - from) / step + 1e-9));
  for (int k = 1; k <= count; ++k) {
    w = diatomic::solve_wave_at_kappa(from + dir * k * step, w, opt);
    csv.row(wave_row(w, s.landscape));
  }
  save_ckpt(run, ckpt_path(run, s, "cross_section_last.ckpt"), w);
}

void cmd_simulate(Run& run, const Settings& s) {
  lattice::SimConfig cfg;
  cfg.horizon = s.horizon;
  cfg.dt = s.dt;
  cfg.recenter_period = s.recenter;
  try {
    cfg.validate();
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }
  lattice::LatticeState state;
  std::vector<std::string> warnings;
  if (!s.ic.empty()) {
    const std::string text = io::read_file(s.ic);
    if (text.rfind("fputw-checkpoint", 0) == 0) {
      const auto kind = io::peek_kind(text);
      if (kind == io::ObjectKind::Diatomic) {
        auto w = io::diatomic_from_text(text);
        if (s.landscape && w.scalars.mu < 0.0) w = diatomic::symmetry_transform(w);
        state = lattice::sample_initial_condition(w, 400, 200, &warnings);
      } else if (kind == io::ObjectKind::Monatomic || kind == io::ObjectKind::Jost) {
        const auto mono = kind == io::ObjectKind::Monatomic
                              ? io::monatomic_from_text(text)
                              : monatomic::wave_from_jost(io::jost_from_text(text), io::jost_from_text(text).kappa);
        const double k = mono.kappa;
        auto phi = std::make_shared<PiecewiseSolution>(mono.phi);
        state = lattice::sample_initial_condition([phi, k](double xi) { return k * k * phi->value(0, k * xi); },
                                                  mono.sigma, 400, 200, &warnings);
      } else {
        throw UsageError("checkpoint kind " + io::to_string(kind) + " cannot seed a simulation");
      }
    } else {
      const double mu = s.m || s.mu ? mass_parameter(s) : 0.0;
      state = lattice::read_text_state(s.ic, 1.0 / (1.0 + mu));
    }
  } else {
    const double kappa = require(s.kappa, "--kappa");
    const auto mono = monatomic::solve_profile(kappa, mono_options(s));
    auto phi = std::make_shared<PiecewiseSolution>(mono.phi);
    state = lattice::sample_initial_condition([phi, kappa](double xi) { return kappa * kappa * phi->value(0, kappa * xi); },
                                              mono.sigma, 400, 200, &warnings);
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
  CsvFile csv(run, "diagnostics.csv", lattice::diagnostics_csv_header());
  auto series = lattice::run_simulation(state, cfg, [&](const lattice::DiagnosticRow& r) {
    csv.row(lattice::diagnostics_csv_row(r));
  });
  run.note("energy_alarms", series.alarms);
  run.note("warnings", warnings);
}

void cmd_transform(Run& run, const Settings& s) {
  const std::string in = !s.guess.empty() ? s.guess : s.seed_ckpt;
  if (in.empty()) throw UsageError("transform needs --guess <ckpt>");
  const auto w = diatomic::symmetry_transform(load_wave(in));
  CsvFile csv(run, "transform.csv", diatomic::branch_csv_header());
  csv.row(diatomic::branch_csv_row(diatomic::summarize(w)));
  save_ckpt(run, ckpt_path(run, s, "transform.ckpt"), w);
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const NonConvergence*>(&e)) return "NonConvergence";
  if (dynamic_cast<const SingularJacobian*>(&e)) return "SingularJacobian";
  if (dynamic_cast<const NoBracket*>(&e)) return "NoBracket";
  if (dynamic_cast<const DegenerateNormalization*>(&e)) return "DegenerateNormalization";
  if (dynamic_cast<const UnreliableQuadrature*>(&e)) return "UnreliableQuadrature";
  if (dynamic_cast<const NonFinite*>(&e)) return "NonFinite";
  if (dynamic_cast<const diatomic::BranchTerminated*>(&e)) return "BranchTerminated";
  if (auto* c = dynamic_cast<const CheckpointError*>(&e)) {
    switch (c->kind()) {
      case CheckpointError::Kind::Corrupt:
        return "CheckpointCorrupt";
      case CheckpointError::Kind::VersionMismatch:
        return "VersionMismatch";
      case CheckpointError::Kind::Io:
        return "Io";
    }
  }
  if (dynamic_cast<const ContractViolation*>(&e)) return "ContractViolation";
  return "Error";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Traveling waves in diatomic FPUT lattices"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key = value configuration file with one [section] per subcommand");
  Settings s;

  app.add_option("--out", s.out, "output directory (FPUTW_OUT overrides)");
  app.add_option("--ckpt", s.ckpt, "checkpoint path to write");
  app.add_option("--L", s.length, "half-length of the computational interval");
  app.add_option("--mesh", s.mesh, "number of mesh intervals");
  app.add_option("--gauss", s.gauss, "Gauss points per interval")->check(CLI::Range(1, 8));
  app.add_flag("--landscape", s.landscape, "report diatomic results in the m <= 1 representation");

  auto add_kappa = [&](CLI::App* c) { c->add_option("--kappa", s.kappa, "solitary amplitude parameter"); };
  auto add_mass = [&](CLI::App* c) {
    c->add_option("--m", s.m, "mass ratio");
    c->add_option("--mu", s.mu, "mass parameter 1/m - 1");
  };
  auto add_range = [&](CLI::App* c) {
    c->add_option("--from", s.from);
    c->add_option("--to", s.to);
    c->add_option("--step", s.step);
  };

  auto* mono = app.add_subcommand("mono-scan", "monatomic waves, Jost solutions and K over a kappa range");
  add_range(mono);
  auto* jost = app.add_subcommand("jost", "Jost solution at one kappa");
  add_kappa(jost);
  auto* kc = app.add_subcommand("kc", "amplitude coefficient at one kappa");
  add_kappa(kc);
  kc->add_option("--guess", s.guess, "Jost checkpoint");
  auto* per = app.add_subcommand("periodic", "nonlinear periodic ripple");
  per->add_option("--sigma", s.sigma);
  add_mass(per);
  per->add_option("--beta-P", s.beta);
  auto* wave = app.add_subcommand("wave", "one diatomic wave");
  add_kappa(wave);
  wave->add_option("--fix", s.fix, "sigma|mu|beta_P=value");
  wave->add_option("--guess", s.guess, "starting diatomic checkpoint");
  auto* branch = app.add_subcommand("branch", "natural-parameter continuation of an iso-kappa branch");
  add_kappa(branch);
  add_mass(branch);
  add_range(branch);
  branch->add_option("--vary", s.vary, "continued scalar (sigma, mu, beta_P)");
  branch->add_option("--seed-ckpt", s.seed_ckpt);
  auto* sol = app.add_subcommand("solitary", "locate the alpha_P = 0 wave on an iso-kappa branch");
  add_kappa(sol);
  add_range(sol);
  sol->add_option("--seed-ckpt", s.seed_ckpt);
  sol->add_option("--width", s.width, "bisection width in mu");
  auto* cross = app.add_subcommand("cross-section", "kappa scan at fixed sigma");
  cross->add_option("--sigma", s.sigma);
  add_range(cross);
  add_mass(cross);
  cross->add_option("--seed-ckpt", s.seed_ckpt);
  auto* sim = app.add_subcommand("simulate", "lattice time integration with core-loss diagnostics");
  sim->add_option("--ic", s.ic, "diatomic/monatomic checkpoint or [r]/[p] text file");
  add_kappa(sim);
  add_mass(sim);
  sim->add_option("--T", s.horizon);
  sim->add_option("--dt", s.dt);
  sim->add_option("--recenter-period", s.recenter);
  auto* tr = app.add_subcommand("transform", "apply the m <-> 1/m symmetry to a diatomic checkpoint");
  tr->add_option("--guess,--seed-ckpt", s.guess);

  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (const char* env = std::getenv("FPUTW_OUT"); env && *env) s.out = env;

  CLI::App* chosen = app.get_subcommands().front();
  Run run(chosen->get_name(), args);
  try {
    run.set_dir(s.out);
    const std::string name = chosen->get_name();
    if (name == "mono-scan") cmd_mono_scan(run, s);
    else if (name == "jost") cmd_jost(run, s);
    else if (name == "kc") cmd_kc(run, s);
    else if (name == "periodic") cmd_periodic(run, s);
    else if (name == "wave") cmd_wave(run, s);
    else if (name == "branch") cmd_branch(run, s);
    else if (name == "solitary") cmd_solitary(run, s);
    else if (name == "cross-section") cmd_cross_section(run, s);
    else if (name == "simulate") cmd_simulate(run, s);
    else if (name == "transform") cmd_transform(run, s);
    run.finish("ok");
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    run.finish("usage", "Usage", e.what());
    return 2;
  } catch (const Error& e) {
    const std::string kind = error_kind(e);
    std::cerr << "error: " << kind << ": " << e.what() << '\n';
    run.finish("failed", kind, e.what());
    return kind == "ContractViolation" ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    run.finish("failed", "Error", e.what());
    return 1;
  }
}
