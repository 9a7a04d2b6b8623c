#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "pathcalc/path.hpp"
#include "pathcalc/riesz.hpp"

namespace pathcalc {

/// Horizontal derivative, vertical gradient and vertical Hessian at a point.
struct DupireJet {
  double dt = 0.0;
  Eigen::VectorXd dx;
  Eigen::MatrixXd dxx;
};

enum class Smoothness { C12, Unknown };

/// A non-anticipative functional of a stopped path, with optional
/// closed-form derivative providers.
class Functional {
 public:
  using Evaluator = std::function<double(const StoppedPath&)>;
  using JetProvider = std::function<DupireJet(const StoppedPath&)>;
  using RieszProvider = std::function<RieszRepresentation(const StoppedPath&)>;

  Functional(std::string name, Evaluator eval, Smoothness smoothness = Smoothness::Unknown,
             JetProvider jet = {}, RieszProvider riesz = {})
      : name_(std::move(name)),
        eval_(std::move(eval)),
        smoothness_(smoothness),
        jet_(std::move(jet)),
        riesz_(std::move(riesz)) {}

  const std::string& name() const noexcept { return name_; }
  Smoothness smoothness() const noexcept { return smoothness_; }
  bool has_analytic_jet() const noexcept { return static_cast<bool>(jet_); }
  bool has_analytic_riesz() const noexcept { return static_cast<bool>(riesz_); }

  double operator()(const StoppedPath& p) const { return eval_(p); }

  DupireJet analytic_jet(const StoppedPath& p) const;
  RieszRepresentation analytic_riesz(const StoppedPath& p) const;

 private:
  std::string name_;
  Evaluator eval_;
  Smoothness smoothness_;
  JetProvider jet_;
  RieszProvider riesz_;
};

double evaluate(const Functional& f, const StoppedPath& p);

/// Evaluates `f` on `p` and on a copy whose storage after the stop index is
/// overwritten with random values; true iff both results are bitwise equal.
/// Requires p.stop_index() < N.
bool check_non_anticipative(const Functional& f, const StoppedPath& p, std::uint64_t tamper_seed);

inline DupireJet analytic_dupire_jet(const Functional& f, const StoppedPath& p) {
  return f.analytic_jet(p);
}
inline RieszRepresentation analytic_frechet_representation(const Functional& f,
                                                            const StoppedPath& p) {
  return f.analytic_riesz(p);
}

}  // namespace pathcalc
