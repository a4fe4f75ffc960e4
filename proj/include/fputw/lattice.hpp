#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fputw/errors.hpp"

namespace fputw::diatomic {
struct DiatomicWave;
}

namespace fputw::lattice {

inline double force(double r) { return r + r * r; }
inline double potential(double r) { return 0.5 * r * r + r * r * r / 3.0; }

/// Sites j = 1..N stored at index j - 1; odd sites carry mass 1, even sites mass m.
struct LatticeState {
  std::vector<double> r;
  std::vector<double> p;
  double mass = 1.0;
  double t = 0.0;

  LatticeState() = default;
  LatticeState(int sites, double m) : r(sites, 0.0), p(sites, 0.0), mass(m) {}
  int size() const noexcept { return static_cast<int>(r.size()); }
  double mass_at(int j) const noexcept { return j % 2 ? 1.0 : mass; }
};

struct SimConfig {
  double dt = 1e-3;
  double horizon = 5000.0;
  double recenter_period = 60.0;
  int window_onset = 300;
  int window_width = 100;
  int core_half_width = 20;
  double drift_threshold = 1e-5;
  double sample_stride = 1.0;
  double baseline_time = 100.0;

  /// Throws ContractViolation on non-positive entries or dt above 1e-3.
  void validate() const;
};

class EnergyDriftAlarm : public Error {
 public:
  using Error::Error;
};

/// (dr/dt, dp/dt) with zero ghost sites beyond both ends.
void rhs(const LatticeState& s, std::vector<double>& dr, std::vector<double>& dp);

/// Classical RK4 step with reusable stage storage.
class Rk4 {
 public:
  explicit Rk4(int sites = 0);
  void step(LatticeState& s, double dt);

 private:
  std::vector<double> kr_[4], kp_[4], tr_, tp_;
};

/// One RK4 step; throws NonFinite when the new state overflows.
LatticeState rk4_step(const LatticeState& s, double dt);

/// Energy over sites first..last (1-based, inclusive, clipped to the grid).
double energy(const LatticeState& s, int first, int last);
double energy(const LatticeState& s);

struct CoreWindow {
  int peak = 0;
  int first = 0;
  int last = 0;
  bool contains(int j) const noexcept { return j >= first && j <= last; }
};

/// Sites within `half_width` of the first maximiser of |r_j|. Throws on an all-zero state.
CoreWindow core_window(const LatticeState& s, int half_width = 20);

/// exp(-y^2 / (1 - y^2)) with y = max((i - onset) / width, 0); exactly 0 once y >= 1.
double window_factor(int i, int onset = 300, int width = 100);

/// Shifts the state so the peak sits at site N/2 (by an even number of sites,
/// preserving the mass pattern), zero-fills vacated sites and applies the window.
/// Returns the applied shift (positive means rightwards).
int recenter_and_window(LatticeState& s, const SimConfig& cfg = {});

struct DiagnosticRow {
  double t = 0.0;
  double energy_full = 0.0;
  double energy_core = 0.0;
  double gamma_core = 0.0;  ///< NaN before the baseline sample
  double outer_amplitude = 0.0;
  long shift_total = 0;
  bool alarm = false;
};

struct DiagnosticSeries {
  std::vector<DiagnosticRow> rows;
  bool has_baseline = false;
  double baseline_energy = 0.0;
  double baseline_time = 0.0;
  std::vector<std::pair<double, int>> shifts;
  int alarms = 0;

  /// Gamma_core at the last sample with t <= `time` (NaN when none is available).
  double gamma_at(double time) const;
};

/// Appends one row; the first sample at or after `cfg.baseline_time` fixes the
/// core-energy baseline.
void diagnostics_update(const LatticeState& s, DiagnosticSeries& series, const SimConfig& cfg, long shift_total,
                        bool alarm);

/// Traveling-wave profiles r_o, r_e and the momentum profiles built from
/// m_j c p' = F(r_j(xi)) - F(r_{j-1}(xi - 1)) by cumulative trapezoid
/// integration from the left tail.
struct TravelingProfiles {
  std::function<double(double)> r_odd;
  std::function<double(double)> r_even;
  std::function<double(double)> p_odd;
  std::function<double(double)> p_even;
};

TravelingProfiles momentum_profiles(std::function<double(double)> r_odd, std::function<double(double)> r_even,
                                    double c, double m, double xi_lo, double xi_hi, double h = 1e-3);

/// r_j = r_{o/e}(j - peak), p_j from momentum_profiles. Warnings (non-decaying
/// tails) are appended to `warnings` when given.
LatticeState sample_initial_condition(std::function<double(double)> r_odd, std::function<double(double)> r_even,
                                      double c, double m, int sites = 400, int peak = 200,
                                      std::vector<std::string>* warnings = nullptr);

/// Uses only the solitary part kappa^2 V of the wave, in the wave's own mass representation.
LatticeState sample_initial_condition(const diatomic::DiatomicWave& wave, int sites = 400, int peak = 200,
                                      std::vector<std::string>* warnings = nullptr);

/// Monatomic profile kappa^2 Phi(kappa xi) on a unit-mass chain.
LatticeState sample_initial_condition(std::function<double(double)> profile, double c, int sites = 400,
                                      int peak = 200, std::vector<std::string>* warnings = nullptr);

/// Integrates to cfg.horizon. Recentering happens every cfg.recenter_period;
/// diagnostics every cfg.sample_stride. `on_row` sees each row as it is produced.
DiagnosticSeries run_simulation(LatticeState state, const SimConfig& cfg = {},
                                const std::function<void(const DiagnosticRow&)>& on_row = {});

std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticRow& row);

/// Plain-text initial data: "[r]" and "[p]" sections of "j value" lines; "mass" line optional.
LatticeState read_text_state(const std::string& path, double default_mass);
void write_text_state(const std::string& path, const LatticeState& s);

}  // namespace fputw::lattice
