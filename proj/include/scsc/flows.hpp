#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "scsc/adjacency.hpp"

namespace scsc {

struct Velocity {
  double u = 0.0;
  double v = 0.0;
};

struct Position {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Position&, const Position&) = default;
};

struct Rect {
  double x_min, x_max, y_min, y_max;
  bool contains(Position p) const { return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max; }
};

enum class QuadEddyVariant {
  verbatim,         ///< v = -pi A cos(pi f) cos(pi y) (2ax + b), as printed
  divergence_free,  ///< v = +pi A cos(pi f) sin(pi y) (2ax + b), from psi = A sin(pi f) sin(pi y)
};

/// Unsteady four-cell flow on x in [0, 2], y in [-1, 1], dimensionless time.
struct QuadEddyParams {
  double amplitude = 0.1;     // A
  double epsilon = 0.1;       // oscillation amplitude
  double omega = 0.6283185307179586;  // 2 pi / 10
  QuadEddyVariant variant = QuadEddyVariant::divergence_free;

  static constexpr Rect domain{0.0, 2.0, -1.0, 1.0};
  void validate() const;
};

/// Bickley jet in SI units (m, s), periodic in x with period `period_x`.
struct BickleyParams {
  double jet_speed = 62.66;     // U, m/s
  double length_scale = 1.77e6; // L, m
  double r0 = 6.371e6;          // k_n = 2n / r0, m
  std::array<double, 3> phase_speed_factor{0.1446, 0.205, 0.461};  // c_n / U
  std::array<double, 3> epsilon{0.0075, 0.15, 0.3};
  double period_x = 2.0e7;
  double y_min = -3.0e6;
  double y_max = 3.0e6;

  double phase_speed(std::size_t k) const { return phase_speed_factor[k] * jet_speed; }
  /// sigma_n = c_n - c_3.
  double shifted_speed(std::size_t k) const { return phase_speed(k) - phase_speed(2); }
  double wavenumber(std::size_t k) const { return 2.0 * static_cast<double>(k + 1) / r0; }
  Rect domain() const { return {0.0, period_x, y_min, y_max}; }
  void validate() const;
};

inline constexpr double kSecondsPerDay = 86400.0;

struct FlowSpec {
  std::variant<QuadEddyParams, BickleyParams> model;
  double t0 = 0.0;
  double t1 = 40.0;  // dimensionless for the quadruple eddy, seconds for Bickley
  std::size_t n_steps = 401;

  void validate() const;
};

Velocity quad_eddy_velocity(double x, double y, double t, const QuadEddyParams& params);
/// psi = A sin(pi f) sin(pi y); the divergence-free variant derives from it.
double quad_eddy_streamfunction(double x, double y, double t, const QuadEddyParams& params);

/// (u, v) = (-d psi/dy, d psi/dx) from closed-form derivatives. x is wrapped
/// into [0, period_x) first.
Velocity bickley_velocity(double x, double y, double t, const BickleyParams& params);
double bickley_streamfunction(double x, double y, double t, const BickleyParams& params);

using VelocityField = std::function<Velocity(double x, double y, double t)>;

struct IntegratorOptions {
  std::size_t substeps = 10;  // RK steps per stored interval
  unsigned threads = 1;
};

/// One fixed Cash-Karp fifth-order step.
Position rk5_step(const VelocityField& field, Position p, double t, double h);

/// Integrates every particle with fixed-step fifth-order Cash-Karp Runge-Kutta
/// and stores positions at n_steps evenly spaced times in [t0, t1]. Bickley
/// x-coordinates are stored unwrapped and the period is recorded on the
/// ensemble.
TrajectoryEnsemble advect(const FlowSpec& flow, const std::vector<Position>& initial,
                          const IntegratorOptions& options = {});

/// Same integration for an arbitrary field (no domain checks, no periods).
TrajectoryEnsemble advect_field(const VelocityField& field, double t0, double t1, std::size_t n_steps,
                                const std::vector<Position>& initial, const IntegratorOptions& options = {});

/// n points i.i.d. uniform in `domain`. Particle i draws from mt19937_64
/// seeded with seed_seq{seed_lo, seed_hi, i}, so output is portable and
/// independent of evaluation order.
std::vector<Position> seed_uniform(std::size_t n, const Rect& domain, std::uint64_t seed);

/// Random-noise control: every position i.i.d. uniform on (0, 1)^2, times 0..T-1.
TrajectoryEnsemble noise_ensemble(std::size_t n, std::size_t n_times, std::uint64_t seed, unsigned threads = 1);

}  // namespace scsc
