#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <utility>
#include <vector>

#include "ansnis/random.hpp"

namespace ansnis {

/// Per-coordinate standard deviations of the Gaussian random-walk proposal.
class StepSpec {
 public:
  explicit StepSpec(std::vector<double> per_coord_sd) : sd_(std::move(per_coord_sd)) {
    if (sd_.empty()) {
      throw std::invalid_argument("StepSpec: empty step vector");
    }
    for (double s : sd_) {
      if (!(s > 0.0) || !std::isfinite(s)) {
        throw std::invalid_argument("StepSpec: step sizes must be finite and positive");
      }
    }
  }

  std::size_t dim() const { return sd_.size(); }
  std::span<const double> per_coord_sd() const { return sd_; }

  StepSpec scaled(double factor) const {
    std::vector<double> sd = sd_;
    for (double& s : sd) {
      s *= factor;
    }
    return StepSpec(std::move(sd));
  }

 private:
  std::vector<double> sd_;
};

inline constexpr double kOptimalScaling = 2.38;

/// 2.38 * sd_d / sqrt(D) for a factorized target with coordinate sds `target_sds`.
inline StepSpec optimal_step(std::span<const double> target_sds) {
  if (target_sds.empty()) {
    throw std::invalid_argument("optimal_step: dimension must be positive");
  }
  const double scale = kOptimalScaling / std::sqrt(static_cast<double>(target_sds.size()));
  std::vector<double> sd(target_sds.begin(), target_sds.end());
  for (double& s : sd) {
    s *= scale;
  }
  return StepSpec(std::move(sd));
}

/// A chain target evaluates a point once into a cached `point_type` and
/// scores cached points. Caching lets a caller change the target (for example
/// a new centering estimate) without re-evaluating the current state.
template <class T>
concept ChainTarget = requires(const T& t, std::span<const double> x,
                               const typename T::point_type& p) {
  { t.evaluate(x) } -> std::same_as<typename T::point_type>;
  { t.log_density(p) } -> std::convertible_to<double>;
};

/// Adapts a plain log-density callable; the cached point is the value itself.
template <class F>
struct LogDensityTarget {
  using point_type = double;
  F f;
  double evaluate(std::span<const double> x) const { return f(x); }
  double log_density(double p) const { return p; }
};

template <class F>
LogDensityTarget(F) -> LogDensityTarget<F>;

template <class Point>
struct ChainState {
  std::vector<double> x;
  Point point{};
  double log_target = 0.0;  // target's log_density(point)
  std::size_t accepted = 0;
  std::size_t proposed = 0;

  double acceptance_rate() const {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
};

/// Random-walk Metropolis with independent Gaussian jumps per coordinate.
///
/// Each step draws the D jump normals first and then one uniform, always in
/// that order, and performs exactly one target evaluation.
template <ChainTarget Target>
class RandomWalkMetropolis {
 public:
  using point_type = typename Target::point_type;
  using State = ChainState<point_type>;

  RandomWalkMetropolis(Target target, StepSpec step)
      : target_(std::move(target)), step_(std::move(step)), proposal_(step_.dim()) {}

  const Target& target() const { return target_; }
  const StepSpec& step() const { return step_; }
  std::size_t evaluations() const { return evaluations_; }

  State start(std::vector<double> x0) {
    if (x0.size() != step_.dim()) {
      throw std::invalid_argument("RandomWalkMetropolis: initial state has wrong dimension");
    }
    State s;
    s.x = std::move(x0);
    s.point = evaluate(s.x);
    s.log_target = score(s.point);
    return s;
  }

  /// Swaps in a new target and rescores the current state from its cache.
  void retarget(Target target, State& state) {
    target_ = std::move(target);
    state.log_target = score(state.point);
  }

  /// One proposal and accept/reject. Returns true on acceptance.
  bool step(State& state, Rng& rng) {
    const auto sd = step_.per_coord_sd();
    for (std::size_t d = 0; d < proposal_.size(); ++d) {
      proposal_[d] = state.x[d] + sd[d] * normal_(rng);
    }
    const double u = uniform_(rng);
    point_type point = evaluate(proposal_);
    const double log_y = score(point);
    ++state.proposed;
    if (std::log(u) < log_y - state.log_target) {
      state.x.swap(proposal_);
      state.point = std::move(point);
      state.log_target = log_y;
      ++state.accepted;
      return true;
    }
    return false;
  }

  /// n steps, calling visit(state) after each one (rejections revisit the
  /// unchanged state).
  template <class Visitor>
  void advance(State& state, std::size_t n, Rng& rng, Visitor&& visit) {
    for (std::size_t i = 0; i < n; ++i) {
      step(state, rng);
      visit(std::as_const(state));
    }
  }

  void advance(State& state, std::size_t n, Rng& rng) {
    advance(state, n, rng, [](const State&) {});
  }

 private:
  point_type evaluate(std::span<const double> x) {
    ++evaluations_;
    return target_.evaluate(x);
  }

  double score(const point_type& p) const {
    const double v = target_.log_density(p);
    if (std::isnan(v)) {
      throw std::domain_error("RandomWalkMetropolis: target returned NaN");
    }
    return v;
  }

  Target target_;
  StepSpec step_;
  std::vector<double> proposal_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
  std::size_t evaluations_ = 0;
};

struct ChainRun {
  std::size_t dim = 0;
  std::vector<double> samples;  // n x dim, row-major
  double acceptance_rate = 0.0;

  std::span<const double> sample(std::size_t i) const { return {samples.data() + i * dim, dim}; }
  std::size_t size() const { return dim == 0 ? 0 : samples.size() / dim; }
};

/// Runs n RWM steps from x0 and records every post-step state.
template <class LogTarget>
ChainRun run_chain(std::vector<double> x0, LogTarget&& log_target, const StepSpec& step,
                   std::size_t n, Rng& rng) {
  if (n == 0) {
    throw std::invalid_argument("run_chain: n must be positive");
  }
  using Adapter = LogDensityTarget<std::decay_t<LogTarget>>;
  RandomWalkMetropolis<Adapter> kernel(Adapter{std::forward<LogTarget>(log_target)}, step);
  auto state = kernel.start(std::move(x0));
  ChainRun run;
  run.dim = state.x.size();
  run.samples.reserve(n * run.dim);
  kernel.advance(state, n, rng, [&](const auto& s) {
    run.samples.insert(run.samples.end(), s.x.begin(), s.x.end());
  });
  run.acceptance_rate = state.acceptance_rate();
  return run;
}

}  // namespace ansnis
