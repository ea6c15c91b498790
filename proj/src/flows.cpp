#include "scsc/flows.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "scsc/error.hpp"
#include "scsc/parallel.hpp"

namespace scsc {
namespace {

constexpr double kPi = std::numbers::pi;

// Uniform double in [0, 1) from the top 53 bits.
double unit_double(std::mt19937_64& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

// Uniform double in (0, 1).
double open_unit_double(std::mt19937_64& engine) {
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

std::mt19937_64 particle_engine(std::uint64_t seed, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(std::uint64_t{index} >> 32)};
  return std::mt19937_64(seq);
}

struct QuadEddyTerms {
  double a, b, f;
};

QuadEddyTerms quad_terms(double x, double t, const QuadEddyParams& params) {
  const double s = std::sin(params.omega * t);
  const double a = params.epsilon * s;
  const double b = 1.0 - 2.0 * params.epsilon * s;
  return {a, b, a * x * x + b * x};
}

}  // namespace

void QuadEddyParams::validate() const {
  if (!(amplitude > 0.0)) throw ValidationError("quadruple-eddy amplitude A must be positive");
  if (!(epsilon >= 0.0 && epsilon < 0.5)) throw ValidationError("quadruple-eddy epsilon must lie in [0, 0.5)");
  if (!(omega > 0.0)) throw ValidationError("quadruple-eddy omega must be positive");
}

void BickleyParams::validate() const {
  if (!(jet_speed > 0.0 && length_scale > 0.0 && r0 > 0.0)) {
    throw ValidationError("Bickley U, L and r0 must be positive");
  }
  if (!(period_x > 0.0 && y_max > y_min)) throw ValidationError("Bickley domain is empty");
}

void FlowSpec::validate() const {
  if (!(t1 > t0)) throw ValidationError("flow time span must satisfy t1 > t0");
  if (n_steps < 2) throw ValidationError("flow needs at least two stored time steps");
  std::visit([](const auto& p) { p.validate(); }, model);
}

Velocity quad_eddy_velocity(double x, double y, double t, const QuadEddyParams& params) {
  const auto [a, b, f] = quad_terms(x, t, params);
  const double pa = kPi * params.amplitude;
  const double slope = 2.0 * a * x + b;
  const double u = -pa * std::sin(kPi * f) * std::cos(kPi * y);
  if (params.variant == QuadEddyVariant::verbatim) {
    return {u, -pa * std::cos(kPi * f) * std::cos(kPi * y) * slope};
  }
  return {u, pa * std::cos(kPi * f) * std::sin(kPi * y) * slope};
}

double quad_eddy_streamfunction(double x, double y, double t, const QuadEddyParams& params) {
  const auto terms = quad_terms(x, t, params);
  return params.amplitude * std::sin(kPi * terms.f) * std::sin(kPi * y);
}

Velocity bickley_velocity(double x, double y, double t, const BickleyParams& params) {
  x -= params.period_x * std::floor(x / params.period_x);
  const double eta = y / params.length_scale;
  const double sech = 1.0 / std::cosh(eta);
  const double sech2 = sech * sech;
  const double th = std::tanh(eta);
  double cos_sum = 0.0;
  double sin_sum = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double kn = params.wavenumber(k);
    const double phase = kn * (x - params.shifted_speed(k) * t);
    cos_sum += params.epsilon[k] * std::cos(phase);
    sin_sum += params.epsilon[k] * kn * std::sin(phase);
  }
  const double big_u = params.jet_speed;
  const double u = -params.phase_speed(2) + big_u * sech2 + 2.0 * big_u * sech2 * th * cos_sum;
  const double v = -big_u * params.length_scale * sech2 * sin_sum;
  return {u, v};
}

double bickley_streamfunction(double x, double y, double t, const BickleyParams& params) {
  x -= params.period_x * std::floor(x / params.period_x);
  const double eta = y / params.length_scale;
  const double sech = 1.0 / std::cosh(eta);
  double cos_sum = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    cos_sum += params.epsilon[k] * std::cos(params.wavenumber(k) * (x - params.shifted_speed(k) * t));
  }
  const double ul = params.jet_speed * params.length_scale;
  return params.phase_speed(2) * y - ul * std::tanh(eta) + ul * sech * sech * cos_sum;
}

Position rk5_step(const VelocityField& field, Position p, double t, double h) {
  auto eval = [&](double dt, double dx, double dy) {
    const Velocity w = field(p.x + dx, p.y + dy, t + dt);
    return Position{w.u, w.v};
  };
  const Position k1 = eval(0.0, 0.0, 0.0);
  const Position k2 = eval(h / 5.0, h * (k1.x / 5.0), h * (k1.y / 5.0));
  const Position k3 = eval(3.0 * h / 10.0, h * (3.0 / 40.0 * k1.x + 9.0 / 40.0 * k2.x),
                           h * (3.0 / 40.0 * k1.y + 9.0 / 40.0 * k2.y));
  const Position k4 = eval(3.0 * h / 5.0, h * (0.3 * k1.x - 0.9 * k2.x + 1.2 * k3.x),
                           h * (0.3 * k1.y - 0.9 * k2.y + 1.2 * k3.y));
  const Position k5 = eval(h, h * (-11.0 / 54.0 * k1.x + 2.5 * k2.x - 70.0 / 27.0 * k3.x + 35.0 / 27.0 * k4.x),
                           h * (-11.0 / 54.0 * k1.y + 2.5 * k2.y - 70.0 / 27.0 * k3.y + 35.0 / 27.0 * k4.y));
  const Position k6 = eval(7.0 * h / 8.0,
                           h * (1631.0 / 55296.0 * k1.x + 175.0 / 512.0 * k2.x + 575.0 / 13824.0 * k3.x +
                                44275.0 / 110592.0 * k4.x + 253.0 / 4096.0 * k5.x),
                           h * (1631.0 / 55296.0 * k1.y + 175.0 / 512.0 * k2.y + 575.0 / 13824.0 * k3.y +
                                44275.0 / 110592.0 * k4.y + 253.0 / 4096.0 * k5.y));
  return {p.x + h * (37.0 / 378.0 * k1.x + 250.0 / 621.0 * k3.x + 125.0 / 594.0 * k4.x + 512.0 / 1771.0 * k6.x),
          p.y + h * (37.0 / 378.0 * k1.y + 250.0 / 621.0 * k3.y + 125.0 / 594.0 * k4.y + 512.0 / 1771.0 * k6.y)};
}

TrajectoryEnsemble advect_field(const VelocityField& field, double t0, double t1, std::size_t n_steps,
                                const std::vector<Position>& initial, const IntegratorOptions& options) {
  if (!(t1 > t0)) throw ValidationError("advection needs t1 > t0");
  if (n_steps < 2) throw ValidationError("advection needs at least two stored time steps");
  if (options.substeps < 1) throw ValidationError("advection needs at least one substep");
  if (initial.empty()) throw ValidationError("advection needs at least one particle");
  const std::size_t n = initial.size();
  const std::size_t per_interval = options.substeps;
  const std::size_t total_steps = (n_steps - 1) * per_interval;
  const double span = t1 - t0;
  const double h = span / static_cast<double>(total_steps);

  std::vector<double> times(n_steps);
  for (std::size_t s = 0; s < n_steps; ++s) {
    times[s] = (s + 1 == n_steps) ? t1 : t0 + span * static_cast<double>(s) / static_cast<double>(n_steps - 1);
  }
  std::vector<double> positions(n * n_steps * 2);
  parallel_for(n, options.threads, [&](std::size_t i) {
    Position p = initial[i];
    double* out = positions.data() + i * n_steps * 2;
    out[0] = p.x;
    out[1] = p.y;
    std::size_t step = 0;
    for (std::size_t s = 1; s < n_steps; ++s) {
      for (std::size_t sub = 0; sub < per_interval; ++sub, ++step) {
        const double t = t0 + span * static_cast<double>(step) / static_cast<double>(total_steps);
        p = rk5_step(field, p, t, h);
      }
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
        std::ostringstream msg;
        msg << "particle " << i << " left the finite range at t = " << times[s];
        throw NumericalError(msg.str());
      }
      out[2 * s] = p.x;
      out[2 * s + 1] = p.y;
    }
  });
  return TrajectoryEnsemble(n, n_steps, 2, std::move(positions), std::move(times));
}

TrajectoryEnsemble advect(const FlowSpec& flow, const std::vector<Position>& initial,
                          const IntegratorOptions& options) {
  flow.validate();
  return std::visit(
      [&](const auto& params) -> TrajectoryEnsemble {
        using P = std::decay_t<decltype(params)>;
        const Rect domain = [&] {
          if constexpr (std::is_same_v<P, QuadEddyParams>) {
            return P::domain;
          } else {
            return params.domain();
          }
        }();
        for (std::size_t i = 0; i < initial.size(); ++i) {
          if (!domain.contains(initial[i])) {
            std::ostringstream msg;
            msg << "initial position of particle " << i << " (" << initial[i].x << ", " << initial[i].y
                << ") lies outside the model domain";
            throw ValidationError(msg.str());
          }
        }
        if constexpr (std::is_same_v<P, QuadEddyParams>) {
          VelocityField field = [params](double x, double y, double t) { return quad_eddy_velocity(x, y, t, params); };
          return advect_field(field, flow.t0, flow.t1, flow.n_steps, initial, options);
        } else {
          VelocityField field = [params](double x, double y, double t) { return bickley_velocity(x, y, t, params); };
          auto raw = advect_field(field, flow.t0, flow.t1, flow.n_steps, initial, options);
          std::vector<double> pos(raw.positions().begin(), raw.positions().end());
          std::vector<double> times(raw.times().begin(), raw.times().end());
          return TrajectoryEnsemble(raw.n_states(), raw.n_times(), 2, std::move(pos), std::move(times),
                                    {params.period_x, std::nullopt});
        }
      },
      flow.model);
}

std::vector<Position> seed_uniform(std::size_t n, const Rect& domain, std::uint64_t seed) {
  if (n < 1) throw ValidationError("seed_uniform needs n >= 1");
  if (!(domain.x_max > domain.x_min && domain.y_max > domain.y_min)) throw ValidationError("seeding domain is empty");
  std::vector<Position> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto engine = particle_engine(seed, i);
    const double ux = unit_double(engine);
    const double uy = unit_double(engine);
    out[i] = {domain.x_min + (domain.x_max - domain.x_min) * ux, domain.y_min + (domain.y_max - domain.y_min) * uy};
  }
  return out;
}

TrajectoryEnsemble noise_ensemble(std::size_t n, std::size_t n_times, std::uint64_t seed, unsigned threads) {
  if (n < 1 || n_times < 1) throw ValidationError("noise ensemble needs n >= 1 and T >= 1");
  std::vector<double> positions(n * n_times * 2);
  parallel_for(n, threads, [&](std::size_t i) {
    auto engine = particle_engine(seed, i);
    double* out = positions.data() + i * n_times * 2;
    for (std::size_t k = 0; k < n_times * 2; ++k) out[k] = open_unit_double(engine);
  });
  std::vector<double> times(n_times);
  for (std::size_t t = 0; t < n_times; ++t) times[t] = static_cast<double>(t);
  return TrajectoryEnsemble(n, n_times, 2, std::move(positions), std::move(times));
}

}  // namespace scsc
