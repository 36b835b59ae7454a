#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "funcito/linalg.hpp"

namespace funcito {

// A cadlag path sampled on a finite time grid. `values` is row-major
// (one dim-vector per grid time). Off-grid evaluation follows the
// cadlag-hold rule: x(u) = value at the largest grid time <= u.
//
// Jumps are explicit: a flagged index stores the left limit separately.
// At unflagged indices the path is declared continuous there, so
// consecutive-sample differences are mesh effects, not jumps.
struct GridPath {
  int dim = 1;
  std::vector<double> times;
  std::vector<double> values;             // times.size() * dim entries
  std::map<std::size_t, Vec> jump_left;   // flagged index -> left limit

  std::size_t size() const { return times.size(); }
  double horizon() const { return times.back(); }

  std::span<const double> value(std::size_t i) const {
    return {values.data() + i * dim, static_cast<std::size_t>(dim)};
  }
  std::span<double> value(std::size_t i) {
    return {values.data() + i * dim, static_cast<std::size_t>(dim)};
  }
  // dim == 1 convenience.
  double scalar(std::size_t i) const { return values[i]; }
  double endpoint_scalar() const { return values[(size() - 1) * dim]; }

  // Largest index i with times[i] <= t. Throws DomainError if t < times[0].
  std::size_t index_at(double t) const;
  std::span<const double> value_at(double t) const { return value(index_at(t)); }

  bool is_jump(std::size_t i) const { return jump_left.count(i) != 0; }
  // Declared left limit at grid index i (== value at unflagged indices).
  Vec left_limit(std::size_t i) const;
  // Left limit at arbitrary t: declared limit on-grid, held value off-grid.
  Vec left_limit_at(double t) const;
  // sup-norm of value - left limit at index i (0 at unflagged indices).
  double jump_magnitude(std::size_t i) const;

  void validate() const;  // throws DomainError on invariant violations
};

GridPath restrict_path(const GridPath& p, double t);

// Prolongs the path to horizon t+h, freezing the endpoint value. New grid
// points are spaced by the last mesh of p, with the final point at exactly
// t+h. h == 0 returns p unchanged.
GridPath horizontal_extend(const GridPath& p, double h);

// Shifts only the endpoint value by e, preserving the left limit there
// (the bump creates or modifies a jump at the horizon).
GridPath vertical_bump(const GridPath& p, std::span<const double> e);

// Piecewise-constant approximation along a partition (appendix scheme:
// dyadic times merged with large declared jumps, levels at left endpoints).
struct StepApproximation {
  std::vector<double> partition;  // tau_0 = 0 < ... <= horizon
  std::vector<Vec> levels;        // levels[k] on [tau_k, tau_{k+1}); last = value at horizon
  double sup_error = 0.0;

  const Vec& level_at(double u) const;
};

// Partition = dyadic grid of mesh 2^-N * horizon, merged with all declared
// jump times of magnitude > 1/N. sup_error is evaluated on p's grid.
StepApproximation step_approximate(const GridPath& p, int n_dyadic);

// Lifted pair (x, v): a d-dimensional path and the d x d quadratic-variation
// density on a shared grid. v is piecewise-constant cadlag: the value at t_i
// governs [t_i, t_{i+1}). Instances are immutable after construction.
class LiftedPath {
 public:
  static constexpr double kPsdTol = 1e-10;  // relative to largest eigenvalue

  LiftedPath(GridPath x, GridPath v);

  const GridPath& x() const { return x_; }
  const GridPath& v() const { return v_; }
  int dim() const { return x_.dim; }
  std::size_t size() const { return x_.size(); }
  double horizon() const { return x_.horizon(); }
  double time(std::size_t i) const { return x_.times[i]; }

  // Left-rectangle integral of v over [0, t_i] as a dim x dim matrix:
  // integral_v(i) = sum_{j < i} v_j dt_j. integral_v(0) == 0.
  std::span<const double> integral_v(std::size_t i) const {
    const std::size_t dd = static_cast<std::size_t>(dim()) * dim();
    return {vcum_.data() + i * dd, dd};
  }
  // Integral over the whole grid, i.e. up to the horizon.
  std::span<const double> integral_v_total() const { return integral_v(size() - 1); }

 private:
  struct unchecked_t {};
  LiftedPath(unchecked_t, GridPath x, GridPath v, std::vector<double> vcum);

  static std::vector<double> build_vcum(const GridPath& v, int d);

  GridPath x_;
  GridPath v_;
  std::vector<double> vcum_;

  friend class PrefixWalker;
  friend LiftedPath restrict_path(const LiftedPath&, double);
  friend LiftedPath horizontal_extend(const LiftedPath&, double);
  friend LiftedPath vertical_bump(const LiftedPath&, std::span<const double>);
};

LiftedPath restrict_path(const LiftedPath& p, double t);
LiftedPath horizontal_extend(const LiftedPath& p, double h);
LiftedPath vertical_bump(const LiftedPath& p, std::span<const double> e);

// d_inf((x,v), (x',v')) = sup |x_{t,h} - x'| + sup |v_{t,h} - v'| + h, where
// the shorter path is horizontally extended by the horizon gap h and suprema
// run over the union of both grids under the cadlag-hold rule.
double d_infinity(const LiftedPath& a, const LiftedPath& b);

// Incremental prefix of a validated LiftedPath. Grows in place so that
// per-step reconstruction loops avoid per-prefix copies; the working object
// is a genuine LiftedPath equal to restrict_path(src, t_i).
class PrefixWalker {
 public:
  explicit PrefixWalker(const LiftedPath& src);

  const LiftedPath& path() const { return work_; }
  std::size_t length() const { return work_.size(); }
  bool done() const { return next_ >= src_->size(); }
  // Appends the next source point; returns false when exhausted.
  bool advance();

  // Evaluates f on the prefix with the endpoint bumped by e; restores after.
  template <typename F>
  double with_bump(std::span<const double> e, F&& f) {
    begin_bump(e);
    const double r = f(work_);
    end_bump();
    return r;
  }
  // Evaluates f on the prefix horizontally extended by h; restores after.
  template <typename F>
  double with_extension(double h, F&& f) {
    begin_extension(h);
    const double r = f(work_);
    end_extension();
    return r;
  }

 private:
  void begin_bump(std::span<const double> e);
  void end_bump();
  void begin_extension(double h);
  void end_extension();

  const LiftedPath* src_;
  LiftedPath work_;
  std::size_t next_;
  // bump restore state
  Vec saved_value_;
  bool saved_had_flag_ = false;
  Vec saved_flag_left_;
};

}  // namespace funcito
