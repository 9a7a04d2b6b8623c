#pragma once

// Closed-form functionals with analytic Dupire jets and Riesz
// representations.  All integrals use the left-point rule
// sum_{i<k} g(gamma(t_i)) dt, so an endpoint bump never enters them.
//
// Catalog entries are defined on scalar paths; `endpoint_quadratic_form`
// covers the multi-dimensional case.

#include <string>
#include <vector>

#include "pathcalc/functional.hpp"

namespace pathcalc {

/// A smooth scalar function with its first two derivatives.
struct ScalarFunction {
  std::string name;
  double (*f)(double);
  double (*df)(double);
  double (*d2f)(double);
};

/// identity, square, cube, quartic, sin, exp.  Throws UsageError on unknown.
const ScalarFunction& scalar_function(const std::string& name);
std::vector<std::string> scalar_function_names();

/// A time weight w(s) for weighted integrals: "one" (w = 1) or "linear" (w = s).
struct TimeWeight {
  std::string name;
  double (*w)(double);
};
const TimeWeight& time_weight(const std::string& name);

/// f(gamma(t))
Functional endpoint(const ScalarFunction& f);
/// int_0^t g(gamma(s)) ds
Functional running_integral(const ScalarFunction& g);
/// int_0^t w(s) gamma(s) ds
Functional weighted_integral(const TimeWeight& w);
/// gamma(t) * int_0^t gamma(s) ds
Functional product();
/// (int_0^t w(s) gamma(s) ds)^2
Functional quadratic_integral(const TimeWeight& w);
/// t * f(gamma(t))
Functional endpoint_times_time(const ScalarFunction& f);
/// constant value c
Functional constant_functional(double c);
/// gamma(t)^T A gamma(t) for a d x d matrix A.
Functional endpoint_quadratic_form(const Eigen::MatrixXd& a);

/// Looks up a catalog entry by id, e.g. "endpoint:square", "integral:identity",
/// "weighted:linear", "product", "quadratic-integral", "endpoint-time:square",
/// "constant:2.5".  Throws UsageError listing the valid ids.
Functional make_functional(const std::string& id);
/// Example ids accepted by make_functional.
std::vector<std::string> functional_ids();
/// The six ground-truth entries used by the acceptance matrix.
std::vector<std::string> core_catalog_ids();

}  // namespace pathcalc
