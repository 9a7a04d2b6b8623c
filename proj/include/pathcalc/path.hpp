#pragma once

// Discrete stopped paths on a uniform time grid.
//
// A StoppedPath is an element of the space of paths stopped at a grid time
// t_k.  Node values beyond the stop index are frozen at the value of node k
// (flat continuation), and an optional endpoint displacement ("bump") is kept
// as an overlay on node k without touching the node samples.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace pathcalc {

class TimeGrid {
 public:
  TimeGrid(double horizon, int steps);

  double horizon() const noexcept { return horizon_; }
  int steps() const noexcept { return steps_; }
  int node_count() const noexcept { return steps_ + 1; }
  double dt() const noexcept { return horizon_ / steps_; }
  double time(int i) const noexcept { return i == steps_ ? horizon_ : i * dt(); }

  /// Node index of `t`.  Throws DomainError outside [0, T] and
  /// GridAlignmentError when `t` is not a node.
  int index_of(double t) const;

  /// Number of grid steps spanned by the duration `span` (must be a
  /// non-negative multiple of dt).
  int steps_in(double span) const;

  friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

 private:
  double horizon_;
  int steps_;
};

namespace detail {
// Row-major node values plus left-point prefix sums:
// prefix[i*d + j] = sum_{m < i} values[m*d + j], accumulated sequentially.
struct PathStorage {
  std::vector<double> values;
  std::vector<double> prefix;
  int dim = 1;

  void rebuild_prefix();
  void extend_prefix(int node);  // prefix for node+1 from node
};
}  // namespace detail

class StoppedPath {
 public:
  /// `samples` holds (N+1)*dim row-major node values.  Entries after
  /// `stop_index` are kept in storage but are not part of the element.
  static StoppedPath from_samples(const TimeGrid& grid, int dim,
                                  std::vector<double> samples, int stop_index);
  /// Scalar convenience overload.
  static StoppedPath scalar(const TimeGrid& grid, std::vector<double> samples,
                            int stop_index);
  static StoppedPath scalar(const TimeGrid& grid, std::vector<double> samples);
  static StoppedPath constant(const TimeGrid& grid, std::span<const double> value,
                              int stop_index);

  const TimeGrid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return storage_->dim; }
  int stop_index() const noexcept { return stop_; }
  double stop_time() const noexcept { return grid_.time(stop_); }

  std::span<const double> bump() const noexcept { return bump_; }
  bool has_bump() const noexcept;

  /// Frozen node sample (bump excluded), defined for every node 0..N.
  double sample(int i, int j = 0) const noexcept {
    return i < live_ ? storage_->values[static_cast<std::size_t>(i) * dim() + j]
                     : head_[j];
  }
  /// Value of the represented element at node i <= stop_index; the bump is
  /// added at the stop node.
  double value(int i, int j = 0) const noexcept {
    return i == stop_ ? head_[j] + bump_[j] : sample(i, j);
  }
  double endpoint(int j = 0) const noexcept { return head_[j] + bump_[j]; }
  std::vector<double> endpoint_vector() const;

  /// Raw storage, including whatever sits beyond the stop index.  Only
  /// anticipation probes and diagnostics should read this.
  double stored(int i, int j = 0) const noexcept {
    return storage_->values[static_cast<std::size_t>(i) * dim() + j];
  }

  /// Left-point Riemann sum dt * sum_{i<k} sample(i, j).
  double left_integral(int j = 0) const noexcept;

  /// All N+1 frozen node samples, row-major, bump excluded.
  std::vector<double> frozen_samples() const;

  /// Copy whose storage after the stop index is replaced by `tail`
  /// ((N - k) * dim values).  The represented element is unchanged.
  StoppedPath with_tail(std::span<const double> tail) const;

  /// Bitwise equality of the represented elements (grid, stop, samples, bump).
  friend bool operator==(const StoppedPath& a, const StoppedPath& b);

 private:
  friend StoppedPath stop_at_index(const StoppedPath&, int);
  friend StoppedPath vertical_bump(const StoppedPath&, std::span<const double>);
  friend StoppedPath horizontal_extend_to_index(const StoppedPath&, int);
  friend class PathBuilder;

  StoppedPath(const TimeGrid& grid, std::shared_ptr<const detail::PathStorage> storage,
              int live, int stop, std::vector<double> head, std::vector<double> bump);

  TimeGrid grid_;
  std::shared_ptr<const detail::PathStorage> storage_;
  int live_;   // first node whose value is held in head_
  int stop_;   // stop index, stop_ >= live_
  std::vector<double> head_;
  std::vector<double> bump_;
};

/// Incrementally written path used by the SFDE solver.  Nodes past the
/// current write position hold NaN until written.
class PathBuilder {
 public:
  PathBuilder(const StoppedPath& initial);

  int current() const noexcept { return current_; }
  int dim() const noexcept { return storage_->dim; }
  double at(int j) const noexcept {
    return storage_->values[static_cast<std::size_t>(current_) * storage_->dim + j];
  }
  /// View of the path stopped at the current node.  Shares storage.
  StoppedPath view() const;
  /// View backed by a private frozen copy (no NaN tail).
  StoppedPath frozen_view() const;
  void push(std::span<const double> next);
  /// Final path stopped at the current node; freezes the tail.
  StoppedPath finish();

 private:
  TimeGrid grid_;
  std::shared_ptr<detail::PathStorage> storage_;
  int current_;
};

StoppedPath stop_at(const StoppedPath& path, double t);
StoppedPath stop_at_index(const StoppedPath& path, int index);
StoppedPath vertical_bump(const StoppedPath& path, std::span<const double> x);
StoppedPath vertical_bump(const StoppedPath& path, double x);
StoppedPath horizontal_extend(const StoppedPath& path, double s);
StoppedPath horizontal_extend_to_index(const StoppedPath& path, int index);
double sup_norm(const StoppedPath& path);
double d_infinity(const StoppedPath& p, const StoppedPath& q);

/// Path with node values p(t_i) + scale * eta(t_i) for i <= stop, frozen after.
/// Both paths must be bump-free and share the grid.
StoppedPath perturb(const StoppedPath& p, const StoppedPath& eta, double scale);
StoppedPath perturb(const StoppedPath& p, const StoppedPath& eta1, double scale1,
                    const StoppedPath& eta2, double scale2);

}  // namespace pathcalc
