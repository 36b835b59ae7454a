#include "funcito/path.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "funcito/errors.hpp"

namespace funcito {

std::size_t GridPath::index_at(double t) const {
  if (t < times.front()) throw DomainError("time before start of grid");
  auto it = std::upper_bound(times.begin(), times.end(), t);
  return static_cast<std::size_t>(it - times.begin()) - 1;
}

Vec GridPath::left_limit(std::size_t i) const {
  auto it = jump_left.find(i);
  if (it != jump_left.end()) return it->second;
  auto v = value(i);
  return Vec(v.begin(), v.end());
}

Vec GridPath::left_limit_at(double t) const {
  const std::size_t i = index_at(t);
  if (times[i] == t) return left_limit(i);
  auto v = value(i);  // off-grid: held value is also the left limit
  return Vec(v.begin(), v.end());
}

double GridPath::jump_magnitude(std::size_t i) const {
  auto it = jump_left.find(i);
  if (it == jump_left.end()) return 0.0;
  return sup_diff(value(i), it->second);
}

void GridPath::validate() const {
  if (dim < 1) throw DomainError("path dimension must be >= 1");
  if (times.empty()) throw DomainError("path needs at least one grid time");
  if (times.front() != 0.0) throw DomainError("first grid time must be 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw DomainError("grid times must be strictly increasing");
  if (values.size() != times.size() * static_cast<std::size_t>(dim))
    throw DomainError("values size does not match grid");
  if (!all_finite(values)) throw DomainError("path values must be finite");
  for (const auto& [i, left] : jump_left) {
    if (i >= times.size()) throw DomainError("jump index out of range");
    if (left.size() != static_cast<std::size_t>(dim)) throw DomainError("jump left-limit dimension mismatch");
    if (!all_finite(left)) throw DomainError("jump left limit must be finite");
    if (sup_diff(value(i), left) == 0.0)
      throw DomainError("flagged jump with left limit equal to value");
  }
}

GridPath restrict_path(const GridPath& p, double t) {
  if (t < 0.0 || t > p.horizon()) throw DomainError("restriction time outside [0, horizon]");
  const std::size_t idx = p.index_at(t);

  GridPath r;
  r.dim = p.dim;
  r.times.assign(p.times.begin(), p.times.begin() + idx + 1);
  r.values.assign(p.values.begin(), p.values.begin() + (idx + 1) * p.dim);
  for (const auto& [i, left] : p.jump_left)
    if (i <= idx) r.jump_left.emplace(i, left);

  if (p.times[idx] < t) {
    // cadlag hold: insert the preceding value at t
    r.times.push_back(t);
    auto v = p.value(idx);
    r.values.insert(r.values.end(), v.begin(), v.end());
  }
  return r;
}

GridPath horizontal_extend(const GridPath& p, double h) {
  if (h < 0.0) throw DomainError("horizontal extension needs h >= 0");
  GridPath r = p;
  if (h == 0.0) return r;

  const double t = p.horizon();
  const double mesh = p.size() >= 2 ? p.times[p.size() - 1] - p.times[p.size() - 2] : h;
  // whole grid steps of the trailing mesh, landing exactly on t + h
  const std::size_t steps = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(h / mesh - 1e-12)));
  const Vec frozen(p.value(p.size() - 1).begin(), p.value(p.size() - 1).end());
  for (std::size_t k = 1; k < steps; ++k) {
    r.times.push_back(t + static_cast<double>(k) * mesh);
    r.values.insert(r.values.end(), frozen.begin(), frozen.end());
  }
  r.times.push_back(t + h);
  r.values.insert(r.values.end(), frozen.begin(), frozen.end());
  return r;
}

GridPath vertical_bump(const GridPath& p, std::span<const double> e) {
  if (e.size() != static_cast<std::size_t>(p.dim)) throw DomainError("bump dimension mismatch");
  GridPath r = p;
  bool zero = true;
  for (double c : e)
    if (c != 0.0) zero = false;
  if (zero) return r;

  const std::size_t last = p.size() - 1;
  const Vec left = p.left_limit(last);  // preserved across the bump
  auto tail = r.value(last);
  for (std::size_t k = 0; k < e.size(); ++k) tail[k] += e[k];
  if (sup_diff(tail, left) == 0.0)
    r.jump_left.erase(last);  // bump restored continuity at the endpoint
  else
    r.jump_left[last] = left;
  return r;
}

const Vec& StepApproximation::level_at(double u) const {
  auto it = std::upper_bound(partition.begin(), partition.end(), u);
  const std::size_t k = static_cast<std::size_t>(it - partition.begin()) - 1;
  return levels[k];
}

StepApproximation step_approximate(const GridPath& p, int n_dyadic) {
  if (n_dyadic < 1) throw DomainError("step approximation needs N >= 1");
  const double horizon = p.horizon();
  const double threshold = 1.0 / static_cast<double>(n_dyadic);

  StepApproximation s;
  const std::size_t cells = std::size_t{1} << n_dyadic;
  s.partition.reserve(cells + 1 + p.jump_left.size());
  for (std::size_t k = 0; k <= cells; ++k)
    s.partition.push_back(horizon * (static_cast<double>(k) / static_cast<double>(cells)));
  for (const auto& [i, left] : p.jump_left) {
    (void)left;
    if (p.jump_magnitude(i) > threshold) s.partition.push_back(p.times[i]);
  }
  std::sort(s.partition.begin(), s.partition.end());
  s.partition.erase(std::unique(s.partition.begin(), s.partition.end()), s.partition.end());

  s.levels.reserve(s.partition.size());
  for (double tau : s.partition) {
    auto v = p.value_at(tau);
    s.levels.emplace_back(v.begin(), v.end());
  }

  double err = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    err = std::max(err, sup_diff(p.value(i), s.level_at(p.times[i])));
  s.sup_error = err;
  return s;
}

// ---------------------------------------------------------------------------
// LiftedPath

LiftedPath::LiftedPath(GridPath x, GridPath v) : x_(std::move(x)), v_(std::move(v)) {
  x_.validate();
  v_.validate();
  const int d = x_.dim;
  if (v_.dim != d * d) throw DomainError("v must hold d x d matrices");
  if (v_.times != x_.times) throw DomainError("x and v must share the same time grid");
  for (std::size_t i = 0; i < v_.size(); ++i) {
    auto a = v_.value(i);
    if (asymmetry(a, d) > 1e-12 * (1.0 + sup_norm(a)))
      throw DomainError("v values must be symmetric");
    auto [lo, hi] = sym_eig_range(a, d);
    if (lo < -kPsdTol * std::max(1.0, hi))
      throw DomainError("v values must be positive semi-definite");
  }
  vcum_ = build_vcum(v_, d);
}

LiftedPath::LiftedPath(unchecked_t, GridPath x, GridPath v, std::vector<double> vcum)
    : x_(std::move(x)), v_(std::move(v)), vcum_(std::move(vcum)) {}

std::vector<double> LiftedPath::build_vcum(const GridPath& v, int d) {
  const std::size_t dd = static_cast<std::size_t>(d) * d;
  const std::size_t n = v.size();
  std::vector<double> cum(n * dd, 0.0);
  std::vector<KahanSum> acc(dd);
  for (std::size_t i = 1; i < n; ++i) {
    const double dt = v.times[i] - v.times[i - 1];
    auto prev = v.value(i - 1);
    for (std::size_t k = 0; k < dd; ++k) {
      acc[k].add(prev[k] * dt);
      cum[i * dd + k] = acc[k].value();
    }
  }
  return cum;
}

LiftedPath restrict_path(const LiftedPath& p, double t) {
  GridPath rx = restrict_path(p.x_, t);
  GridPath rv = restrict_path(p.v_, t);
  const std::size_t dd = static_cast<std::size_t>(p.dim()) * p.dim();
  std::vector<double> cum(p.vcum_.begin(), p.vcum_.begin() + rx.size() * dd);
  if (rx.size() > p.x_.index_at(t) + 1) {
    // a held point was appended at t; extend the integral over the stub cell
    cum.resize(rx.size() * dd);
    const std::size_t idx = rx.size() - 2;
    const double dt = t - p.x_.times[idx];
    auto vi = p.v_.value(idx);
    auto base = p.integral_v(idx);
    for (std::size_t k = 0; k < dd; ++k)
      cum[(idx + 1) * dd + k] = base[k] + vi[k] * dt;
  }
  return LiftedPath(LiftedPath::unchecked_t{}, std::move(rx), std::move(rv), std::move(cum));
}

LiftedPath horizontal_extend(const LiftedPath& p, double h) {
  GridPath rx = horizontal_extend(p.x_, h);
  GridPath rv = horizontal_extend(p.v_, h);
  const std::size_t dd = static_cast<std::size_t>(p.dim()) * p.dim();
  std::vector<double> cum = p.vcum_;
  cum.resize(rx.size() * dd);
  auto vfrozen = p.v_.value(p.size() - 1);
  for (std::size_t i = p.size(); i < rx.size(); ++i) {
    const double dt = rx.times[i] - rx.times[i - 1];
    for (std::size_t k = 0; k < dd; ++k)
      cum[i * dd + k] = cum[(i - 1) * dd + k] + vfrozen[k] * dt;
  }
  return LiftedPath(LiftedPath::unchecked_t{}, std::move(rx), std::move(rv), std::move(cum));
}

LiftedPath vertical_bump(const LiftedPath& p, std::span<const double> e) {
  GridPath rx = vertical_bump(p.x_, e);
  return LiftedPath(LiftedPath::unchecked_t{}, std::move(rx), p.v_, p.vcum_);
}

namespace {

double sup_on_union(const GridPath& shorter, const GridPath& longer) {
  // shorter is implicitly extended by freezing its endpoint
  const double t_short = shorter.horizon();
  auto shorter_at = [&](double u) {
    return u <= t_short ? shorter.value_at(u) : shorter.value(shorter.size() - 1);
  };
  double m = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < shorter.size() || ib < longer.size()) {
    double u;
    if (ib >= longer.size() || (ia < shorter.size() && shorter.times[ia] <= longer.times[ib])) {
      u = shorter.times[ia];
      if (ib < longer.size() && longer.times[ib] == u) ++ib;
      ++ia;
    } else {
      u = longer.times[ib];
      ++ib;
    }
    m = std::max(m, sup_diff(shorter_at(u), longer.value_at(u)));
  }
  return m;
}

}  // namespace

double d_infinity(const LiftedPath& a, const LiftedPath& b) {
  if (a.dim() != b.dim()) throw DomainError("d_infinity dimension mismatch");
  const LiftedPath& s = a.horizon() <= b.horizon() ? a : b;
  const LiftedPath& l = a.horizon() <= b.horizon() ? b : a;
  const double h = l.horizon() - s.horizon();
  return sup_on_union(s.x(), l.x()) + sup_on_union(s.v(), l.v()) + h;
}

// ---------------------------------------------------------------------------
// PrefixWalker

PrefixWalker::PrefixWalker(const LiftedPath& src)
    : src_(&src),
      work_(LiftedPath::unchecked_t{}, GridPath{}, GridPath{}, {}),
      next_(0) {
  const std::size_t n = src.size();
  const int d = src.dim();
  work_.x_.dim = d;
  work_.v_.dim = d * d;
  work_.x_.times.reserve(n + 1);
  work_.v_.times.reserve(n + 1);
  work_.x_.values.reserve((n + 1) * d);
  work_.v_.values.reserve((n + 1) * d * d);
  work_.vcum_.reserve((n + 1) * d * d);
  advance();
}

bool PrefixWalker::advance() {
  if (next_ >= src_->size()) return false;
  const std::size_t i = next_++;
  work_.x_.times.push_back(src_->x_.times[i]);
  auto xv = src_->x_.value(i);
  work_.x_.values.insert(work_.x_.values.end(), xv.begin(), xv.end());
  work_.v_.times.push_back(src_->v_.times[i]);
  auto vv = src_->v_.value(i);
  work_.v_.values.insert(work_.v_.values.end(), vv.begin(), vv.end());
  auto ci = src_->integral_v(i);
  work_.vcum_.insert(work_.vcum_.end(), ci.begin(), ci.end());
  auto jx = src_->x_.jump_left.find(i);
  if (jx != src_->x_.jump_left.end()) work_.x_.jump_left.emplace(i, jx->second);
  auto jv = src_->v_.jump_left.find(i);
  if (jv != src_->v_.jump_left.end()) work_.v_.jump_left.emplace(i, jv->second);
  return true;
}

void PrefixWalker::begin_bump(std::span<const double> e) {
  const std::size_t last = work_.size() - 1;
  auto tail = work_.x_.value(last);
  saved_value_.assign(tail.begin(), tail.end());
  auto it = work_.x_.jump_left.find(last);
  saved_had_flag_ = it != work_.x_.jump_left.end();
  if (saved_had_flag_) saved_flag_left_ = it->second;

  const Vec left = work_.x_.left_limit(last);
  bool zero = true;
  for (double c : e)
    if (c != 0.0) zero = false;
  if (zero) return;
  for (std::size_t k = 0; k < e.size(); ++k) tail[k] += e[k];
  if (sup_diff(tail, left) == 0.0)
    work_.x_.jump_left.erase(last);
  else
    work_.x_.jump_left[last] = left;
}

void PrefixWalker::end_bump() {
  const std::size_t last = work_.size() - 1;
  std::copy(saved_value_.begin(), saved_value_.end(), work_.x_.value(last).begin());
  if (saved_had_flag_)
    work_.x_.jump_left[last] = saved_flag_left_;
  else
    work_.x_.jump_left.erase(last);
}

void PrefixWalker::begin_extension(double h) {
  const std::size_t last = work_.size() - 1;
  const double t = work_.horizon();
  work_.x_.times.push_back(t + h);
  auto xv = work_.x_.value(last);
  work_.x_.values.insert(work_.x_.values.end(), xv.begin(), xv.end());
  work_.v_.times.push_back(t + h);
  auto vv = work_.v_.value(last);
  work_.v_.values.insert(work_.v_.values.end(), vv.begin(), vv.end());
  const std::size_t dd = static_cast<std::size_t>(work_.dim()) * work_.dim();
  const std::size_t base = work_.vcum_.size() - dd;
  for (std::size_t k = 0; k < dd; ++k)
    work_.vcum_.push_back(work_.vcum_[base + k] + work_.v_.values[base + k] * h);
}

void PrefixWalker::end_extension() {
  const int d = work_.dim();
  work_.x_.times.pop_back();
  work_.x_.values.resize(work_.x_.values.size() - d);
  work_.v_.times.pop_back();
  work_.v_.values.resize(work_.v_.values.size() - d * d);
  work_.vcum_.resize(work_.vcum_.size() - d * d);
}

}  // namespace funcito
