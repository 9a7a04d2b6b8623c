#include "pathcalc/path.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>

#include "pathcalc/errors.hpp"

namespace pathcalc {

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

void check_dim(const StoppedPath& path, std::size_t n, const char* what) {
  if (static_cast<int>(n) != path.dim()) {
    std::ostringstream os;
    os << what << ": expected dimension " << path.dim() << ", got " << n;
    throw DomainError(os.str());
  }
}

}  // namespace

TimeGrid::TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw DomainError("time grid: horizon must be > 0");
  if (steps < 1) throw DomainError("time grid: need at least one step");
}

int TimeGrid::index_of(double t) const {
  const double tol = 1e-9 * std::max(1.0, horizon_);
  if (!std::isfinite(t) || t < -tol || t > horizon_ + tol) {
    std::ostringstream os;
    os << "time " << t << " outside [0, " << horizon_ << "]";
    throw DomainError(os.str());
  }
  const double x = t / dt();
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x))) {
    std::ostringstream os;
    os << "time " << t << " is not a node of the grid (dt = " << dt() << ")";
    throw GridAlignmentError(os.str());
  }
  return static_cast<int>(r);
}

int TimeGrid::steps_in(double span) const {
  if (!(span >= 0.0)) throw DomainError("negative time span");
  const double x = span / dt();
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9 * std::max(1.0, x)) {
    std::ostringstream os;
    os << "time span " << span << " is not a multiple of dt = " << dt();
    throw GridAlignmentError(os.str());
  }
  return static_cast<int>(r);
}

void detail::PathStorage::rebuild_prefix() {
  const std::size_t nodes = values.size() / dim;
  prefix.assign(values.size(), 0.0);
  for (std::size_t i = 0; i + 1 < nodes; ++i) extend_prefix(static_cast<int>(i));
}

void detail::PathStorage::extend_prefix(int node) {
  const std::size_t a = static_cast<std::size_t>(node) * dim;
  for (int j = 0; j < dim; ++j) prefix[a + dim + j] = prefix[a + j] + values[a + j];
}

StoppedPath::StoppedPath(const TimeGrid& grid, std::shared_ptr<const detail::PathStorage> storage,
                         int live, int stop, std::vector<double> head, std::vector<double> bump)
    : grid_(grid),
      storage_(std::move(storage)),
      live_(live),
      stop_(stop),
      head_(std::move(head)),
      bump_(std::move(bump)) {}

StoppedPath StoppedPath::from_samples(const TimeGrid& grid, int dim, std::vector<double> samples,
                                      int stop_index) {
  if (dim < 1) throw DomainError("path dimension must be >= 1");
  if (samples.size() != static_cast<std::size_t>(grid.node_count()) * dim) {
    std::ostringstream os;
    os << "expected " << grid.node_count() * dim << " samples, got " << samples.size();
    throw DomainError(os.str());
  }
  if (stop_index < 0 || stop_index > grid.steps()) throw DomainError("stop index outside the grid");
  auto storage = std::make_shared<detail::PathStorage>();
  storage->dim = dim;
  storage->values = std::move(samples);
  storage->rebuild_prefix();
  const auto first = storage->values.begin() + static_cast<std::ptrdiff_t>(stop_index) * dim;
  std::vector<double> head(first, first + dim);
  return StoppedPath(grid, std::move(storage), stop_index, stop_index, std::move(head),
                     std::vector<double>(dim, 0.0));
}

StoppedPath StoppedPath::scalar(const TimeGrid& grid, std::vector<double> samples, int stop_index) {
  return from_samples(grid, 1, std::move(samples), stop_index);
}

StoppedPath StoppedPath::scalar(const TimeGrid& grid, std::vector<double> samples) {
  return from_samples(grid, 1, std::move(samples), grid.steps());
}

StoppedPath StoppedPath::constant(const TimeGrid& grid, std::span<const double> value,
                                  int stop_index) {
  std::vector<double> samples;
  samples.reserve(static_cast<std::size_t>(grid.node_count()) * value.size());
  for (int i = 0; i < grid.node_count(); ++i) samples.insert(samples.end(), value.begin(), value.end());
  return from_samples(grid, static_cast<int>(value.size()), std::move(samples), stop_index);
}

bool StoppedPath::has_bump() const noexcept {
  return std::any_of(bump_.begin(), bump_.end(), [](double b) { return b != 0.0; });
}

std::vector<double> StoppedPath::endpoint_vector() const {
  std::vector<double> out(dim());
  for (int j = 0; j < dim(); ++j) out[j] = endpoint(j);
  return out;
}

double StoppedPath::left_integral(int j) const noexcept {
  double s = storage_->prefix[static_cast<std::size_t>(live_) * dim() + j];
  for (int i = live_; i < stop_; ++i) s += head_[j];
  return s * grid_.dt();
}

std::vector<double> StoppedPath::frozen_samples() const {
  const int d = dim();
  std::vector<double> out(static_cast<std::size_t>(grid_.node_count()) * d);
  for (int i = 0; i < grid_.node_count(); ++i)
    for (int j = 0; j < d; ++j) out[static_cast<std::size_t>(i) * d + j] = sample(i, j);
  return out;
}

StoppedPath StoppedPath::with_tail(std::span<const double> tail) const {
  const int d = dim();
  const std::size_t expected = static_cast<std::size_t>(grid_.steps() - stop_) * d;
  if (tail.size() != expected) throw DomainError("with_tail: wrong tail length");
  auto values = frozen_samples();
  std::copy(tail.begin(), tail.end(), values.begin() + static_cast<std::ptrdiff_t>(stop_ + 1) * d);
  auto storage = std::make_shared<detail::PathStorage>();
  storage->dim = d;
  storage->values = std::move(values);
  storage->rebuild_prefix();
  return StoppedPath(grid_, std::move(storage), stop_, stop_, head_, bump_);
}

bool operator==(const StoppedPath& a, const StoppedPath& b) {
  if (!(a.grid_ == b.grid_) || a.dim() != b.dim() || a.stop_ != b.stop_) return false;
  for (int j = 0; j < a.dim(); ++j)
    if (!same_bits(a.bump_[j], b.bump_[j])) return false;
  for (int i = 0; i < a.grid_.node_count(); ++i)
    for (int j = 0; j < a.dim(); ++j)
      if (!same_bits(a.sample(i, j), b.sample(i, j))) return false;
  return true;
}

StoppedPath stop_at_index(const StoppedPath& path, int index) {
  if (index < 0 || index > path.grid().steps()) throw DomainError("stop index outside the grid");
  if (path.has_bump()) throw DomainError("stop_at requires a path without endpoint bump");
  if (index < path.live_) {
    const int d = path.dim();
    const auto first = path.storage_->values.begin() + static_cast<std::ptrdiff_t>(index) * d;
    return StoppedPath(path.grid_, path.storage_, index, index, std::vector<double>(first, first + d),
                       path.bump_);
  }
  return StoppedPath(path.grid_, path.storage_, path.live_, index, path.head_, path.bump_);
}

StoppedPath stop_at(const StoppedPath& path, double t) {
  return stop_at_index(path, path.grid().index_of(t));
}

StoppedPath vertical_bump(const StoppedPath& path, std::span<const double> x) {
  check_dim(path, x.size(), "vertical_bump");
  std::vector<double> bump(path.bump_);
  for (std::size_t j = 0; j < x.size(); ++j) bump[j] += x[j];
  return StoppedPath(path.grid_, path.storage_, path.live_, path.stop_, path.head_, std::move(bump));
}

StoppedPath vertical_bump(const StoppedPath& path, double x) {
  return vertical_bump(path, std::span<const double>(&x, 1));
}

StoppedPath horizontal_extend_to_index(const StoppedPath& path, int index) {
  if (index < path.stop_) throw DomainError("horizontal_extend: target time precedes the stop time");
  if (index > path.grid().steps()) throw DomainError("horizontal_extend: target time beyond the horizon");
  if (!path.has_bump())
    return StoppedPath(path.grid_, path.storage_, path.live_, index, path.head_, path.bump_);

  const int d = path.dim();
  std::vector<double> head(path.head_);
  for (int j = 0; j < d; ++j) head[j] += path.bump_[j];
  std::vector<double> zero(d, 0.0);
  if (path.live_ == path.stop_)
    return StoppedPath(path.grid_, path.storage_, path.live_, index, std::move(head), std::move(zero));

  // Held nodes before the stop keep the unbumped value: materialize them.
  auto storage = std::make_shared<detail::PathStorage>();
  storage->dim = d;
  storage->values = path.frozen_samples();
  storage->rebuild_prefix();
  return StoppedPath(path.grid_, std::move(storage), path.stop_, index, std::move(head),
                     std::move(zero));
}

StoppedPath horizontal_extend(const StoppedPath& path, double s) {
  if (s > path.grid().horizon() * (1.0 + 1e-12))
    throw DomainError("horizontal_extend: target time beyond the horizon");
  return horizontal_extend_to_index(path, path.grid().index_of(s));
}

double sup_norm(const StoppedPath& path) {
  double best = 0.0;
  for (int i = 0; i <= path.stop_index(); ++i) {
    double sq = 0.0;
    for (int j = 0; j < path.dim(); ++j) sq += path.value(i, j) * path.value(i, j);
    best = std::max(best, std::sqrt(sq));
  }
  return best;
}

double d_infinity(const StoppedPath& p, const StoppedPath& q) {
  if (p.dim() != q.dim()) throw DomainError("d_infinity: dimension mismatch");
  if (!(p.grid() == q.grid())) throw DomainError("d_infinity: paths live on different grids");
  const int kp = p.stop_index();
  const int kq = q.stop_index();
  double sup = 0.0;
  for (int i = 0; i <= std::max(kp, kq); ++i) {
    double sq = 0.0;
    for (int j = 0; j < p.dim(); ++j) {
      const double diff = p.value(std::min(i, kp), j) - q.value(std::min(i, kq), j);
      sq += diff * diff;
    }
    sup = std::max(sup, std::sqrt(sq));
  }
  return sup + std::abs(p.stop_time() - q.stop_time());
}

namespace {

struct Term {
  const StoppedPath* eta;
  double scale;
};

StoppedPath perturb_impl(const StoppedPath& p, std::span<const Term> terms) {
  if (p.has_bump()) throw DomainError("perturb: base path carries an endpoint bump");
  for (const auto& term : terms) {
    if (!(term.eta->grid() == p.grid())) throw DomainError("perturb: direction on a different grid");
    if (term.eta->dim() != p.dim()) throw DomainError("perturb: dimension mismatch");
    if (term.eta->has_bump()) throw DomainError("perturb: direction carries an endpoint bump");
  }
  const int d = p.dim();
  const int k = p.stop_index();
  std::vector<double> values(static_cast<std::size_t>(p.grid().node_count()) * d);
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; j < d; ++j) {
      double v = p.sample(i, j);
      for (const auto& term : terms) v += term.scale * term.eta->sample(i, j);
      values[static_cast<std::size_t>(i) * d + j] = v;
    }
  }
  for (int i = k + 1; i < p.grid().node_count(); ++i)
    for (int j = 0; j < d; ++j)
      values[static_cast<std::size_t>(i) * d + j] = values[static_cast<std::size_t>(k) * d + j];
  return StoppedPath::from_samples(p.grid(), d, std::move(values), k);
}

}  // namespace

StoppedPath perturb(const StoppedPath& p, const StoppedPath& eta, double scale) {
  const Term terms[] = {{&eta, scale}};
  return perturb_impl(p, terms);
}

StoppedPath perturb(const StoppedPath& p, const StoppedPath& eta1, double scale1,
                    const StoppedPath& eta2, double scale2) {
  const Term terms[] = {{&eta1, scale1}, {&eta2, scale2}};
  return perturb_impl(p, terms);
}

PathBuilder::PathBuilder(const StoppedPath& initial)
    : grid_(initial.grid()), storage_(std::make_shared<detail::PathStorage>()),
      current_(initial.stop_index()) {
  const int d = initial.dim();
  storage_->dim = d;
  storage_->values.assign(static_cast<std::size_t>(grid_.node_count()) * d,
                          std::numeric_limits<double>::quiet_NaN());
  storage_->prefix.assign(storage_->values.size(), 0.0);
  for (int i = 0; i <= current_; ++i)
    for (int j = 0; j < d; ++j)
      storage_->values[static_cast<std::size_t>(i) * d + j] = initial.value(i, j);
  for (int i = 0; i < current_; ++i) storage_->extend_prefix(i);
}

StoppedPath PathBuilder::view() const {
  const int d = dim();
  const auto first = storage_->values.begin() + static_cast<std::ptrdiff_t>(current_) * d;
  return StoppedPath(grid_, storage_, current_, current_, std::vector<double>(first, first + d),
                     std::vector<double>(d, 0.0));
}

StoppedPath PathBuilder::frozen_view() const {
  const int d = dim();
  std::vector<double> values(storage_->values);
  for (int i = current_ + 1; i < grid_.node_count(); ++i)
    for (int j = 0; j < d; ++j)
      values[static_cast<std::size_t>(i) * d + j] = values[static_cast<std::size_t>(current_) * d + j];
  return StoppedPath::from_samples(grid_, d, std::move(values), current_);
}

void PathBuilder::push(std::span<const double> next) {
  const int d = dim();
  if (static_cast<int>(next.size()) != d) throw DomainError("PathBuilder: dimension mismatch");
  if (current_ >= grid_.steps()) throw DomainError("PathBuilder: grid exhausted");
  std::copy(next.begin(), next.end(),
            storage_->values.begin() + static_cast<std::ptrdiff_t>(current_ + 1) * d);
  storage_->extend_prefix(current_);
  ++current_;
}

StoppedPath PathBuilder::finish() {
  const int d = dim();
  for (int i = current_ + 1; i < grid_.node_count(); ++i) {
    for (int j = 0; j < d; ++j)
      storage_->values[static_cast<std::size_t>(i) * d + j] =
          storage_->values[static_cast<std::size_t>(current_) * d + j];
    storage_->extend_prefix(i - 1);
  }
  StoppedPath out = view();
  storage_.reset();
  return out;
}

}  // namespace pathcalc
