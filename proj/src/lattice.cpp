#include "fputw/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include "fputw/diatomic.hpp"

namespace fputw::lattice {

void SimConfig::validate() const {
  if (!(dt > 0.0) || dt > 1e-3 * (1.0 + 1e-12))
    throw ContractViolation("SimConfig: dt must lie in (0, 1e-3]");
  if (!(horizon > 0.0) || !(recenter_period > 0.0) || !(sample_stride > 0.0) || !(drift_threshold > 0.0) ||
      window_onset <= 0 || window_width <= 0 || core_half_width <= 0 || baseline_time < 0.0)
    throw ContractViolation("SimConfig: all settings must be positive");
}

void rhs(const LatticeState& s, std::vector<double>& dr, std::vector<double>& dp) {
  const int n = s.size();
  dr.resize(n);
  dp.resize(n);
  double f_prev = 0.0;
  for (int i = 0; i < n; ++i) {
    const double f = force(s.r[i]);
    dr[i] = (i + 1 < n ? s.p[i + 1] : 0.0) - s.p[i];
    dp[i] = (f - f_prev) / s.mass_at(i + 1);
    f_prev = f;
  }
}

Rk4::Rk4(int sites) {
  for (int k = 0; k < 4; ++k) {
    kr_[k].resize(sites);
    kp_[k].resize(sites);
  }
  tr_.resize(sites);
  tp_.resize(sites);
}

void Rk4::step(LatticeState& s, double dt) {
  const int n = s.size();
  LatticeState stage = s;
  static constexpr double a[4] = {0.0, 0.5, 0.5, 1.0};
  for (int k = 0; k < 4; ++k) {
    if (k > 0)
      for (int i = 0; i < n; ++i) {
        stage.r[i] = s.r[i] + a[k] * dt * kr_[k - 1][i];
        stage.p[i] = s.p[i] + a[k] * dt * kp_[k - 1][i];
      }
    rhs(k == 0 ? s : stage, kr_[k], kp_[k]);
  }
  bool finite = true;
  for (int i = 0; i < n; ++i) {
    s.r[i] += dt / 6.0 * (kr_[0][i] + 2.0 * kr_[1][i] + 2.0 * kr_[2][i] + kr_[3][i]);
    s.p[i] += dt / 6.0 * (kp_[0][i] + 2.0 * kp_[1][i] + 2.0 * kp_[2][i] + kp_[3][i]);
    finite = finite && std::isfinite(s.r[i]) && std::isfinite(s.p[i]);
  }
  s.t += dt;
  if (!finite) throw NonFinite("lattice state overflowed at t = " + std::to_string(s.t));
}

LatticeState rk4_step(const LatticeState& s, double dt) {
  if (!(dt > 0.0) || dt > 1e-3 * (1.0 + 1e-12)) throw ContractViolation("rk4_step: dt must lie in (0, 1e-3]");
  LatticeState out = s;
  Rk4(s.size()).step(out, dt);
  return out;
}

double energy(const LatticeState& s, int first, int last) {
  first = std::max(first, 1);
  last = std::min(last, s.size());
  double e = 0.0;
  for (int j = first; j <= last; ++j) {
    const double p = s.p[j - 1];
    e += 0.5 * s.mass_at(j) * p * p + potential(s.r[j - 1]);
  }
  return e;
}

double energy(const LatticeState& s) { return energy(s, 1, s.size()); }

CoreWindow core_window(const LatticeState& s, int half_width) {
  int peak = 0;
  double best = 0.0;
  for (int j = 1; j <= s.size(); ++j)
    if (std::abs(s.r[j - 1]) > best) {
      best = std::abs(s.r[j - 1]);
      peak = j;
    }
  if (peak == 0) throw ContractViolation("core_window: state is identically zero");
  return {peak, std::max(1, peak - half_width), std::min(s.size(), peak + half_width)};
}

double window_factor(int i, int onset, int width) {
  const double y = std::max(static_cast<double>(i - onset) / width, 0.0);
  if (y >= 1.0) return 0.0;
  if (y == 0.0) return 1.0;
  return std::exp(-y * y / (1.0 - y * y));
}

int recenter_and_window(LatticeState& s, const SimConfig& cfg) {
  const int n = s.size();
  int shift = 0;
  bool any = std::any_of(s.r.begin(), s.r.end(), [](double v) { return v != 0.0; });
  if (any) {
    shift = n / 2 - core_window(s, cfg.core_half_width).peak;
    shift -= shift % 2;  // keep odd sites on odd sites
  }
  if (shift != 0) {
    auto move = [&](std::vector<double>& v) {
      std::vector<double> out(n, 0.0);
      for (int i = 0; i < n; ++i) {
        const int src = i - shift;
        if (src >= 0 && src < n) out[i] = v[src];
      }
      v.swap(out);
    };
    move(s.r);
    move(s.p);
  }
  for (int j = cfg.window_onset + 1; j <= n; ++j) {
    const double f = window_factor(j, cfg.window_onset, cfg.window_width);
    s.r[j - 1] *= f;
    s.p[j - 1] *= f;
  }
  return shift;
}

double DiagnosticSeries::gamma_at(double time) const {
  double g = std::numeric_limits<double>::quiet_NaN();
  for (const auto& row : rows) {
    if (row.t > time + 1e-9) break;
    g = row.gamma_core;
  }
  return g;
}

void diagnostics_update(const LatticeState& s, DiagnosticSeries& series, const SimConfig& cfg, long shift_total,
                        bool alarm) {
  DiagnosticRow row;
  row.t = s.t;
  row.energy_full = energy(s);
  row.shift_total = shift_total;
  row.alarm = alarm;
  row.gamma_core = std::numeric_limits<double>::quiet_NaN();
  const bool any = std::any_of(s.r.begin(), s.r.end(), [](double v) { return v != 0.0; });
  if (any) {
    const CoreWindow w = core_window(s, cfg.core_half_width);
    row.energy_core = energy(s, w.first, w.last);
    for (int j = 1; j <= s.size(); ++j)
      if (!w.contains(j)) row.outer_amplitude = std::max(row.outer_amplitude, std::abs(s.r[j - 1]));
  }
  if (!series.has_baseline && s.t >= cfg.baseline_time - 1e-9) {
    series.has_baseline = true;
    series.baseline_energy = row.energy_core;
    series.baseline_time = s.t;
  }
  if (series.has_baseline)
    row.gamma_core = series.baseline_energy != 0.0
                         ? (series.baseline_energy - row.energy_core) / series.baseline_energy
                         : 0.0;
  series.rows.push_back(row);
}

TravelingProfiles momentum_profiles(std::function<double(double)> r_odd, std::function<double(double)> r_even,
                                    double c, double m, double xi_lo, double xi_hi, double h) {
  if (!(c > 0.0) || !(m > 0.0) || !(h > 0.0) || !(xi_hi > xi_lo))
    throw ContractViolation("momentum_profiles: invalid arguments");
  const int steps = static_cast<int>(std::ceil((xi_hi - xi_lo) / h));
  h = (xi_hi - xi_lo) / steps;
  auto po = std::make_shared<std::vector<double>>(steps + 1, 0.0);
  auto pe = std::make_shared<std::vector<double>>(steps + 1, 0.0);
  auto d_odd = [&](double x) { return (force(r_odd(x)) - force(r_even(x - 1.0))) / c; };
  auto d_even = [&](double x) { return (force(r_even(x)) - force(r_odd(x - 1.0))) / (m * c); };
  double fo = d_odd(xi_lo), fe = d_even(xi_lo);
  for (int k = 1; k <= steps; ++k) {
    const double x = xi_lo + k * h;
    const double go = d_odd(x), ge = d_even(x);
    (*po)[k] = (*po)[k - 1] + 0.5 * h * (fo + go);
    (*pe)[k] = (*pe)[k - 1] + 0.5 * h * (fe + ge);
    fo = go;
    fe = ge;
  }
  auto lookup = [xi_lo, h, steps](std::shared_ptr<std::vector<double>> tab) {
    return [tab, xi_lo, h, steps](double x) {
      const double u = (x - xi_lo) / h;
      if (u <= 0.0) return 0.0;
      if (u >= steps) return tab->back();
      const int k = static_cast<int>(u);
      const double w = u - k;
      return (1.0 - w) * (*tab)[k] + w * (*tab)[std::min(k + 1, steps)];
    };
  };
  return {std::move(r_odd), std::move(r_even), lookup(po), lookup(pe)};
}

LatticeState sample_initial_condition(std::function<double(double)> r_odd, std::function<double(double)> r_even,
                                      double c, double m, int sites, int peak, std::vector<std::string>* warnings) {
  if (sites < 2 || peak < 1 || peak > sites) throw ContractViolation("sample_initial_condition: bad grid");
  // integer nodes coincide with the quadrature grid
  const double lo = 1.0 - peak - 8.0, hi = static_cast<double>(sites - peak) + 1.0;
  const TravelingProfiles tp = momentum_profiles(std::move(r_odd), std::move(r_even), c, m, lo, hi, 1.0 / 1024.0);
  LatticeState s(sites, m);
  double top = 0.0;
  for (int j = 1; j <= sites; ++j) {
    const double xi = j - peak;
    s.r[j - 1] = j % 2 ? tp.r_odd(xi) : tp.r_even(xi);
    s.p[j - 1] = j % 2 ? tp.p_odd(xi) : tp.p_even(xi);
    top = std::max(top, std::abs(s.r[j - 1]));
  }
  if (warnings && top > 0.0) {
    const double edge = std::max(std::abs(s.r.front()), std::abs(s.r.back()));
    if (edge > 1e-6 * top) warnings->push_back("initial profile does not decay at the grid edge");
  }
  return s;
}

LatticeState sample_initial_condition(const diatomic::DiatomicWave& wave, int sites, int peak,
                                      std::vector<std::string>* warnings) {
  auto prof = diatomic::reconstruct_displacement_profiles(wave, true);
  return sample_initial_condition(prof.r_odd, prof.r_even, wave.scalars.sigma, wave.scalars.m(), sites, peak,
                                  warnings);
}

LatticeState sample_initial_condition(std::function<double(double)> profile, double c, int sites, int peak,
                                      std::vector<std::string>* warnings) {
  return sample_initial_condition(profile, profile, c, 1.0, sites, peak, warnings);
}

DiagnosticSeries run_simulation(LatticeState state, const SimConfig& cfg,
                                const std::function<void(const DiagnosticRow&)>& on_row) {
  cfg.validate();
  const long total = std::lround(cfg.horizon / cfg.dt);
  const long stride = std::max(1L, std::lround(cfg.sample_stride / cfg.dt));
  const long period = std::max(1L, std::lround(cfg.recenter_period / cfg.dt));
  const double t0 = state.t;
  DiagnosticSeries series;
  Rk4 rk(state.size());
  long shift_total = 0;
  bool pending_alarm = false;
  double reference = energy(state);

  auto sample = [&] {
    diagnostics_update(state, series, cfg, shift_total, pending_alarm);
    pending_alarm = false;
    if (on_row) on_row(series.rows.back());
  };
  auto check_drift = [&] {
    const double e = energy(state);
    const double scale = std::abs(reference) > 0.0 ? std::abs(reference) : 1.0;
    if (std::abs(e - reference) / scale > cfg.drift_threshold) {
      ++series.alarms;
      pending_alarm = true;
    }
  };

  sample();
  for (long k = 1; k <= total; ++k) {
    rk.step(state, cfg.dt);
    state.t = t0 + k * cfg.dt;
    if (k % period == 0) {
      check_drift();
      const int s = recenter_and_window(state, cfg);
      shift_total += s;
      series.shifts.emplace_back(state.t, s);
      reference = energy(state);
    }
    if (k % stride == 0) sample();
  }
  if (total % period != 0) check_drift();
  if (pending_alarm && !series.rows.empty()) series.rows.back().alarm = true;
  return series;
}

std::string diagnostics_csv_header() { return "t,E_full,E_core,Gamma_core,A_out,shift_total,alarm"; }

std::string diagnostics_csv_row(const DiagnosticRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%ld,%d", row.t, row.energy_full, row.energy_core,
                row.gamma_core, row.outer_amplitude, row.shift_total, row.alarm ? 1 : 0);
  return buf;
}

LatticeState read_text_state(const std::string& path, double default_mass) {
  std::ifstream in(path);
  if (!in) throw CheckpointError(CheckpointError::Kind::Io, "cannot open " + path);
  std::vector<std::pair<int, double>> rs, ps;
  std::vector<std::pair<int, double>>* cur = nullptr;
  double mass = default_mass;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "[r]") {
      cur = &rs;
    } else if (first == "[p]") {
      cur = &ps;
    } else if (first == "mass") {
      if (!(ls >> mass)) throw CheckpointError(CheckpointError::Kind::Corrupt, path + ": bad mass line");
    } else {
      double v = 0.0;
      int j = 0;
      try {
        j = std::stoi(first);
      } catch (const std::exception&) {
        throw CheckpointError(CheckpointError::Kind::Corrupt, path + ":" + std::to_string(lineno) + ": bad index");
      }
      if (!cur || !(ls >> v) || j < 1)
        throw CheckpointError(CheckpointError::Kind::Corrupt, path + ":" + std::to_string(lineno) + ": bad entry");
      cur->emplace_back(j, v);
    }
  }
  int n = 0;
  for (auto& e : rs) n = std::max(n, e.first);
  for (auto& e : ps) n = std::max(n, e.first);
  if (n == 0) throw CheckpointError(CheckpointError::Kind::Corrupt, path + ": no lattice data");
  LatticeState s(n, mass);
  for (auto& [j, v] : rs) s.r[j - 1] = v;
  for (auto& [j, v] : ps) s.p[j - 1] = v;
  return s;
}

void write_text_state(const std::string& path, const LatticeState& s) {
  std::ofstream out(path);
  if (!out) throw CheckpointError(CheckpointError::Kind::Io, "cannot write " + path);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", s.mass);
  out << "mass " << buf << "\n[r]\n";
  for (int j = 1; j <= s.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", s.r[j - 1]);
    out << j << ' ' << buf << '\n';
  }
  out << "[p]\n";
  for (int j = 1; j <= s.size(); ++j) {
    std::snprintf(buf, sizeof buf, "%.17g", s.p[j - 1]);
    out << j << ' ' << buf << '\n';
  }
}

}  // namespace fputw::lattice
