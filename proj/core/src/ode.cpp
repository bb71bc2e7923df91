#include "blowup/ode.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <utility>

#include "blowup/error.hpp"

namespace blowup {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0,
                 kA63 = 46732.0 / 5247.0, kA64 = 49.0 / 176.0,
                 kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0,
                 kE4 = 71.0 / 1920.0, kE5 = -17253.0 / 339200.0,
                 kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;

// Relative step below which a time step counts as underflow.
constexpr double kUnderflowRatio = 1e-14;
// Refinement raises the threshold by this factor per level.
constexpr double kLevelFactor = 1e3;
// Largest level the refinement tries to reach.
constexpr double kCeiling = 1e300;
// Points used for the local exponent and reciprocal fits.
constexpr std::size_t kFitWindow = 8;
constexpr std::size_t kRescaledStepLimit = 200'000;

using Rhs = std::function<void(std::span<const double>, std::span<double>)>;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(),
                     [](double x) { return std::isfinite(x); });
}

// One embedded RK 5(4) stepper for an autonomous system. Only the first
// `controlled` components enter the error norm.
class DormandPrince {
 public:
  DormandPrince(std::size_t dim, std::size_t controlled, Rhs rhs, double rtol,
                double atol)
      : dim_(dim),
        controlled_(controlled),
        rhs_(std::move(rhs)),
        rtol_(rtol),
        atol_(atol),
        k2_(dim),
        k3_(dim),
        k4_(dim),
        k5_(dim),
        k6_(dim),
        y_new_(dim),
        dy_new_(dim),
        tmp_(dim) {}

  void eval(std::span<const double> y, std::span<double> out) const {
    rhs_(y, out);
  }

  // Returns the scaled error norm of a step of size h; +inf when a stage
  // leaves the finite range. On return y_new()/dy_new() hold the candidate.
  double attempt(const std::vector<double>& y, const std::vector<double>& dy,
                 double h) {
    const auto stage = [&](std::vector<double>& out, auto&& combine) {
      for (std::size_t i = 0; i < dim_; ++i) tmp_[i] = y[i] + h * combine(i);
      rhs_(tmp_, out);
      return all_finite(out);
    };
    if (!stage(k2_, [&](std::size_t i) { return kA21 * dy[i]; })) return kInf;
    if (!stage(k3_, [&](std::size_t i) {
          return kA31 * dy[i] + kA32 * k2_[i];
        }))
      return kInf;
    if (!stage(k4_, [&](std::size_t i) {
          return kA41 * dy[i] + kA42 * k2_[i] + kA43 * k3_[i];
        }))
      return kInf;
    if (!stage(k5_, [&](std::size_t i) {
          return kA51 * dy[i] + kA52 * k2_[i] + kA53 * k3_[i] + kA54 * k4_[i];
        }))
      return kInf;
    if (!stage(k6_, [&](std::size_t i) {
          return kA61 * dy[i] + kA62 * k2_[i] + kA63 * k3_[i] + kA64 * k4_[i] +
                 kA65 * k5_[i];
        }))
      return kInf;
    for (std::size_t i = 0; i < dim_; ++i) {
      y_new_[i] = y[i] + h * (kB1 * dy[i] + kB3 * k3_[i] + kB4 * k4_[i] +
                              kB5 * k5_[i] + kB6 * k6_[i]);
    }
    if (!all_finite(y_new_)) return kInf;
    rhs_(y_new_, dy_new_);
    if (!all_finite(dy_new_)) return kInf;

    double sum = 0.0;
    for (std::size_t i = 0; i < controlled_; ++i) {
      const double err =
          h * (kE1 * dy[i] + kE3 * k3_[i] + kE4 * k4_[i] + kE5 * k5_[i] +
               kE6 * k6_[i] + kE7 * dy_new_[i]);
      const double scale =
          atol_ + rtol_ * std::max(std::abs(y[i]), std::abs(y_new_[i]));
      sum += (err / scale) * (err / scale);
    }
    return std::sqrt(sum / static_cast<double>(controlled_));
  }

  [[nodiscard]] const std::vector<double>& y_new() const { return y_new_; }
  [[nodiscard]] const std::vector<double>& dy_new() const { return dy_new_; }

  // Hairer's starting step heuristic.
  double initial_step(const std::vector<double>& y,
                      const std::vector<double>& dy) {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < controlled_; ++i) {
      const double sc = atol_ + rtol_ * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (dy[i] / sc) * (dy[i] / sc);
    }
    const double n = static_cast<double>(controlled_);
    d0 = std::sqrt(d0 / n);
    d1 = std::sqrt(d1 / n);
    const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    for (std::size_t i = 0; i < dim_; ++i) tmp_[i] = y[i] + h0 * dy[i];
    rhs_(tmp_, k2_);
    double d2 = 0.0;
    for (std::size_t i = 0; i < controlled_; ++i) {
      const double sc = atol_ + rtol_ * std::abs(y[i]);
      d2 += ((k2_[i] - dy[i]) / sc) * ((k2_[i] - dy[i]) / sc);
    }
    d2 = std::sqrt(d2 / n) / h0;
    if (!std::isfinite(d2)) return h0;
    const double dmax = std::max(d1, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3)
                                    : std::pow(0.01 / dmax, 0.2);
    return std::min(100.0 * h0, h1);
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  std::size_t dim_;
  std::size_t controlled_;
  Rhs rhs_;
  double rtol_;
  double atol_;
  std::vector<double> k2_, k3_, k4_, k5_, k6_, y_new_, dy_new_, tmp_;
};

double next_step(double h, double err, bool rejected) {
  double factor = kMaxFactor;
  if (err > 0.0) {
    factor = std::clamp(kSafety * std::pow(err, -0.2), kMinFactor, kMaxFactor);
  }
  if (rejected) factor = std::min(factor, 1.0);
  return h * factor;
}

std::size_t largest_over(std::span<const double> y, double threshold) {
  std::size_t best = y.size();
  double best_ratio = 1.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] / threshold > best_ratio) {
      best_ratio = y[i] / threshold;
      best = i;
    }
  }
  return best;
}

// Least-squares slope and intercept of y on x.
std::pair<double, double> line_fit(std::span<const double> x,
                                   std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

struct Crossing {
  double t;
  std::vector<double> y;
  std::size_t component;
};

struct RefineResult {
  std::optional<BlowUpEvent> event;
  double t_reached;
};

// Drives one integration call. Holds per-call scratch only; the field is
// shared read-only.
class Engine {
 public:
  Engine(const VectorField& field, const IntegrationOptions& opts)
      : field_(field), opts_(opts), dim_(field.dimension()) {}

  Trajectory run(std::span<const double> state0, double t_end, bool record) {
    validate(state0, t_end);
    Trajectory traj;
    std::vector<double> y(state0.begin(), state0.end());
    std::vector<double> dy(dim_);
    field_(y, dy);
    if (!all_finite(dy)) {
      throw IntegrationError(IntegrationError::Kind::kField,
                             "integrate: non-finite derivative at initial state");
    }
    if (record) push(traj, 0.0, y);

    std::optional<Crossing> crossing;
    if (const std::size_t i = largest_over(y, opts_.blowup_threshold);
        i < dim_) {
      crossing = Crossing{0.0, y, i};
    } else {
      crossing = time_mode(traj, y, dy, t_end, record);
    }
    if (!crossing) return traj;

    if (!opts_.refine_blowup) {
      BlowUpEvent ev;
      ev.t_low = ev.t_high = ev.estimate = ev.threshold_time = crossing->t;
      ev.method = BlowUpMethod::kThresholdCrossing;
      ev.component = crossing->component;
      traj.blowup = ev;
      traj.termination = Termination::kBlowUp;
      return traj;
    }
    RefineResult refined = refine(*crossing);
    if (refined.event) {
      traj.blowup = refined.event;
      traj.termination = Termination::kBlowUp;
    } else {
      traj.termination = Termination::kRangeExhausted;
    }
    t_reached_ = refined.t_reached;
    return traj;
  }

  [[nodiscard]] double t_reached() const { return t_reached_; }

 private:
  void validate(std::span<const double> state0, double t_end) const {
    if (state0.size() != dim_) {
      throw DomainError("integrate: initial state has " +
                        std::to_string(state0.size()) +
                        " components, field expects " + std::to_string(dim_));
    }
    for (std::size_t i = 0; i < dim_; ++i) {
      if (!(state0[i] > 0.0) || !std::isfinite(state0[i])) {
        throw DomainError("integrate: initial state component " +
                          field_.names()[i] + " must be positive and finite");
      }
    }
    if (!(t_end > 0.0) || !std::isfinite(t_end)) {
      throw DomainError("integrate: t_end must be positive and finite");
    }
    if (!(opts_.rel_tol > 0.0) || !(opts_.abs_tol > 0.0)) {
      throw DomainError("integrate: tolerances must be positive");
    }
    if (!std::is_sorted(opts_.sample_times.begin(), opts_.sample_times.end()) ||
        (!opts_.sample_times.empty() && opts_.sample_times.front() < 0.0)) {
      throw DomainError("integrate: sample_times must be ascending and >= 0");
    }
  }

  static void push(Trajectory& traj, double t, const std::vector<double>& y) {
    traj.times.push_back(t);
    traj.states.push_back(y);
  }

  // Plain adaptive stepping in t. Returns the first threshold crossing, if
  // any, before t_end.
  std::optional<Crossing> time_mode(Trajectory& traj, std::vector<double>& y,
                                    std::vector<double>& dy, double t_end,
                                    bool record) {
    DormandPrince dp(dim_, dim_, field_rhs(), opts_.rel_tol, opts_.abs_tol);
    const bool sampling = !opts_.sample_times.empty();
    std::size_t next = 0;
    while (sampling && next < opts_.sample_times.size() &&
           opts_.sample_times[next] <= 0.0) {
      ++next;
    }

    double t = 0.0;
    double h = opts_.initial_step > 0.0 ? opts_.initial_step
                                        : dp.initial_step(y, dy);
    std::size_t steps = 0;
    t_reached_ = 0.0;
    while (t < t_end) {
      if (++steps > opts_.max_steps) {
        throw IntegrationError(IntegrationError::Kind::kStepLimit,
                               "integrate: step limit exceeded at t = " +
                                   std::to_string(t));
      }
      double target = t_end;
      if (sampling && next < opts_.sample_times.size()) {
        target = std::min(target, opts_.sample_times[next]);
      }
      h = std::min(h, opts_.max_step);
      if (h < kUnderflowRatio * t_end) {
        return rescaled_search(t, y, t_end);
      }
      bool land = false;
      double h_step = h;
      if (t + h * (1.0 + 1e-12) >= target) {
        h_step = target - t;
        land = true;
      }
      const double err = dp.attempt(y, dy, h_step);
      if (!(err <= 1.0)) {
        h = next_step(h_step, std::isfinite(err) ? err : 1e10, true);
        continue;
      }
      t = land ? target : t + h_step;
      y = dp.y_new();
      dy = dp.dy_new();
      t_reached_ = t;
      if (const std::size_t i = largest_over(y, opts_.blowup_threshold);
          i < dim_) {
        return Crossing{t, y, i};
      }
      if (record) {
        if (!sampling) {
          push(traj, t, y);
        } else if (land && next < opts_.sample_times.size() &&
                   target == opts_.sample_times[next]) {
          push(traj, t, y);
          while (next < opts_.sample_times.size() &&
                 opts_.sample_times[next] <= t) {
            ++next;
          }
        }
      }
      const double proposal = h;
      h = next_step(h_step, err, false);
      if (land) h = std::max(h, proposal);
    }
    return std::nullopt;
  }

  Rhs field_rhs() const {
    return [this](std::span<const double> y, std::span<double> out) {
      field_(y, out);
    };
  }

  // Sundman-rescaled system: independent variable s with
  // dt/ds = 1/g(E), dE/ds = F(E)/g(E), g = max_i F_i/E_i. The fastest
  // component grows like e^s, so the state can be followed far past the
  // point where t steps fall below double resolution. The last slot of
  // the augmented state is tau = t - t_origin.
  Rhs rescaled_rhs(std::vector<double>& scratch) const {
    return [this, &scratch](std::span<const double> z, std::span<double> out) {
      const std::span<const double> y = z.first(dim_);
      field_(y, scratch);
      double g = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        if (!(y[i] > 0.0)) {
          g = std::numeric_limits<double>::quiet_NaN();
          break;
        }
        g = std::max(g, std::abs(scratch[i]) / y[i]);
      }
      if (!(g > 0.0) || !std::isfinite(g)) {
        std::fill(out.begin(), out.end(),
                  std::numeric_limits<double>::quiet_NaN());
        return;
      }
      for (std::size_t i = 0; i < dim_; ++i) out[i] = scratch[i] / g;
      out[dim_] = 1.0 / g;
    };
  }

  // Entered when t steps underflow: follow the solution in the rescaled
  // variable until a component reaches the threshold. Failing to get
  // there means the step collapse was not growth-driven.
  std::optional<Crossing> rescaled_search(double t0,
                                          const std::vector<double>& y0,
                                          double t_end) {
    std::vector<double> scratch(dim_);
    DormandPrince dp(dim_ + 1, dim_, rescaled_rhs(scratch), opts_.rel_tol,
                     opts_.abs_tol);
    std::vector<double> z(y0);
    z.push_back(0.0);
    std::vector<double> dz(dim_ + 1);
    dp.eval(z, dz);
    const auto stiff = [&] {
      return IntegrationError(
          IntegrationError::Kind::kStiffness,
          "integrate: step size underflow at t = " + std::to_string(t0) +
              " without reaching the blow-up threshold");
    };
    if (!all_finite(dz)) throw stiff();
    double h = 0.1;
    for (std::size_t steps = 0; steps < kRescaledStepLimit; ++steps) {
      const double err = dp.attempt(z, dz, h);
      if (!(err <= 1.0)) {
        h = next_step(h, std::isfinite(err) ? err : 1e10, true);
        if (h < 1e-12) throw stiff();
        continue;
      }
      z = dp.y_new();
      dz = dp.dy_new();
      h = next_step(h, err, false);
      const double t = t0 + z[dim_];
      if (t > t_end) return std::nullopt;
      const std::span<const double> y(z.data(), dim_);
      if (const std::size_t i = largest_over(y, opts_.blowup_threshold);
          i < dim_) {
        return Crossing{t, std::vector<double>(y.begin(), y.end()), i};
      }
    }
    throw stiff();
  }

  // Follows the solution past the crossing through thresholds raised by
  // kLevelFactor. At each level the local exponent p of F_c ~ E_c^p is fit
  // over the last few points; E_c^(1-p) is then close to linear in t and
  // its zero is the blow-up estimate. Two consecutive estimates within
  // half the requested tolerance end the search.
  RefineResult refine(const Crossing& crossing) {
    const std::size_t c = crossing.component;
    std::vector<double> scratch(dim_);
    DormandPrince dp(dim_ + 1, dim_, rescaled_rhs(scratch), opts_.rel_tol,
                     opts_.abs_tol);
    std::vector<double> z(crossing.y);
    z.push_back(0.0);
    std::vector<double> dz(dim_ + 1);
    dp.eval(z, dz);

    RefineResult result{std::nullopt, crossing.t};
    if (!all_finite(dz)) return result;

    struct Sample {
      double tau, level, rate;
    };
    std::deque<Sample> window;
    const auto remember = [&](const std::vector<double>& zz,
                              const std::vector<double>& dzz) {
      // F_c = (dE_c/ds) / (dt/ds).
      window.push_back({zz[dim_], zz[c], dzz[c] / dzz[dim_]});
      if (window.size() > kFitWindow) window.pop_front();
    };
    remember(z, dz);

    double level = opts_.blowup_threshold * kLevelFactor;
    double previous = std::numeric_limits<double>::quiet_NaN();
    double h = 0.1;
    for (std::size_t steps = 0; steps < kRescaledStepLimit; ++steps) {
      const double err = dp.attempt(z, dz, h);
      if (!(err <= 1.0)) {
        h = next_step(h, std::isfinite(err) ? err : 1e10, true);
        if (h < 1e-12) break;
        continue;
      }
      z = dp.y_new();
      dz = dp.dy_new();
      h = next_step(h, err, false);
      remember(z, dz);
      result.t_reached = crossing.t + z[dim_];
      if (z[c] < level) continue;

      const std::optional<double> tau_star = extrapolate(window);
      if (tau_star) {
        const double estimate = crossing.t + *tau_star;
        if (!std::isnan(previous)) {
          const double spread = std::abs(estimate - previous);
          const double tol = opts_.blowup_tol.value_or(1e-3 * estimate);
          if (spread <= 0.5 * tol) {
            const double half = std::max(spread, 1e-12 * estimate);
            BlowUpEvent ev;
            ev.estimate = estimate;
            ev.t_low = std::min(estimate,
                                std::max(estimate - half, result.t_reached));
            ev.t_high = estimate + half;
            ev.method = BlowUpMethod::kReciprocalExtrapolation;
            ev.component = c;
            ev.threshold_time = crossing.t;
            result.event = ev;
            return result;
          }
        }
        previous = estimate;
      } else {
        previous = std::numeric_limits<double>::quiet_NaN();
      }
      if (level >= kCeiling) break;
      level = std::min(level * kLevelFactor, kCeiling);
    }
    return result;
  }

  // Zero of E^(1-p) extrapolated linearly in tau; empty when the local
  // exponent does not exceed 1.
  static std::optional<double> extrapolate(const auto& window) {
    if (window.size() < 4) return std::nullopt;
    std::vector<double> log_level, log_rate, tau, reciprocal;
    for (const auto& s : window) {
      if (!(s.rate > 0.0) || !(s.level > 0.0)) return std::nullopt;
      log_level.push_back(std::log(s.level));
      log_rate.push_back(std::log(s.rate));
    }
    const double p = line_fit(log_level, log_rate).first;
    if (!(p > 1.0 + 1e-9) || !std::isfinite(p)) return std::nullopt;

    const double tau0 = window.back().tau;
    for (const auto& s : window) {
      tau.push_back(s.tau - tau0);
      reciprocal.push_back(std::pow(s.level, 1.0 - p));
    }
    const auto [slope, intercept] = line_fit(tau, reciprocal);
    double remaining = -intercept / slope;
    if (!(slope < 0.0) || !std::isfinite(remaining) || remaining < 0.0) {
      // Degenerate spread in tau: fall back to the local derivative.
      const auto& s = window.back();
      remaining = s.level / ((p - 1.0) * s.rate);
    }
    return tau0 + remaining;
  }

  const VectorField& field_;
  const IntegrationOptions& opts_;
  std::size_t dim_;
  double t_reached_ = 0.0;
};

}  // namespace

VectorField::VectorField(std::size_t dimension, Rate rate,
                         std::vector<std::string> names)
    : dimension_(dimension), rate_(std::move(rate)), names_(std::move(names)) {
  if (dimension_ == 0) throw DomainError("VectorField: dimension must be > 0");
  if (!rate_) throw DomainError("VectorField: empty rate function");
  if (names_.empty()) {
    for (std::size_t i = 0; i < dimension_; ++i) {
      names_.push_back("E" + std::to_string(i));
    }
  } else if (names_.size() != dimension_) {
    throw DomainError("VectorField: one name per component required");
  }
}

VectorField VectorField::scalar(const GrowthLaw& law) {
  return VectorField(
      1,
      [f = law.rate()](std::span<const double> s, std::span<double> out) {
        out[0] = f(s[0]);
      },
      {"A"});
}

const char* to_string(BlowUpMethod method) noexcept {
  switch (method) {
    case BlowUpMethod::kThresholdCrossing:
      return "threshold-crossing";
    case BlowUpMethod::kReciprocalExtrapolation:
      return "reciprocal-extrapolation";
  }
  return "unknown";
}

const char* to_string(Termination termination) noexcept {
  switch (termination) {
    case Termination::kHorizon:
      return "horizon";
    case Termination::kBlowUp:
      return "blowup";
    case Termination::kRangeExhausted:
      return "range-exhausted";
  }
  return "unknown";
}

Trajectory integrate(const VectorField& field, std::span<const double> state0,
                     double t_end, const IntegrationOptions& opts) {
  Engine engine(field, opts);
  return engine.run(state0, t_end, true);
}

BlowUpSearch estimate_blowup_time(const VectorField& field,
                                  std::span<const double> state0,
                                  const IntegrationOptions& opts) {
  Engine engine(field, opts);
  const Trajectory traj = engine.run(state0, opts.horizon, false);
  BlowUpSearch search;
  search.event = traj.blowup;
  search.termination = traj.termination;
  search.t_reached = engine.t_reached();
  return search;
}

VectorField multiplicative_field(std::span<const double> coeffs) {
  if (coeffs.empty()) throw DomainError("multiplicative_field: no coefficients");
  for (double k : coeffs) {
    if (!(k > 0.0)) {
      throw DomainError("multiplicative_field: coefficients must be positive");
    }
  }
  std::vector<double> k(coeffs.begin(), coeffs.end());
  return VectorField(k.size(), [k](std::span<const double> e,
                                   std::span<double> out) {
    double product = 1.0;
    for (double x : e) product *= x;
    for (std::size_t i = 0; i < k.size(); ++i) out[i] = k[i] * product;
  });
}

Trajectory integrate_multiplicative(std::span<const double> coeffs,
                                    std::span<const double> state0,
                                    double t_end,
                                    const IntegrationOptions& opts) {
  if (coeffs.size() != state0.size()) {
    throw DomainError(
        "integrate_multiplicative: one coefficient per state component");
  }
  return integrate(multiplicative_field(coeffs), state0, t_end, opts);
}

}  // namespace blowup
