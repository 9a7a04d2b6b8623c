#include "pathcalc/catalog.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "pathcalc/errors.hpp"

namespace pathcalc {

namespace {

const std::array<ScalarFunction, 6> kFunctions{{
    {"identity", [](double x) { return x; }, [](double) { return 1.0; },
     [](double) { return 0.0; }},
    {"square", [](double x) { return x * x; }, [](double x) { return 2.0 * x; },
     [](double) { return 2.0; }},
    {"cube", [](double x) { return x * x * x; }, [](double x) { return 3.0 * x * x; },
     [](double x) { return 6.0 * x; }},
    {"quartic", [](double x) { return x * x * x * x; }, [](double x) { return 4.0 * x * x * x; },
     [](double x) { return 12.0 * x * x; }},
    {"sin", [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); },
     [](double x) { return -std::sin(x); }},
    {"exp", [](double x) { return std::exp(x); }, [](double x) { return std::exp(x); },
     [](double x) { return std::exp(x); }},
}};

const std::array<TimeWeight, 2> kWeights{{
    {"one", [](double) { return 1.0; }},
    {"linear", [](double s) { return s; }},
}};

void require_scalar(const StoppedPath& p, const std::string& name) {
  if (p.dim() != 1) throw DomainError(name + ": catalog functionals act on scalar paths");
}

DupireJet jet(double dt, double dx, double dxx) {
  DupireJet j;
  j.dt = dt;
  j.dx = Eigen::VectorXd::Constant(1, dx);
  j.dxx = Eigen::MatrixXd::Constant(1, 1, dxx);
  return j;
}

// Left-point sum dt * sum_{i<k} w(t_i) gamma(t_i).
double weighted_sum(const StoppedPath& p, const TimeWeight& w) {
  if (w.name == "one") return p.left_integral();
  double s = 0.0;
  for (int i = 0; i < p.stop_index(); ++i) s += w.w(p.grid().time(i)) * p.sample(i);
  return s * p.grid().dt();
}

// Analytic representations need the bump-free element.
void require_bump_free(const StoppedPath& p, const std::string& name) {
  if (p.has_bump()) throw DomainError(name + ": Riesz representation needs a bump-free path");
}

}  // namespace

const ScalarFunction& scalar_function(const std::string& name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return f;
  throw UsageError("unknown scalar function '" + name + "'");
}

std::vector<std::string> scalar_function_names() {
  std::vector<std::string> out;
  for (const auto& f : kFunctions) out.push_back(f.name);
  return out;
}

const TimeWeight& time_weight(const std::string& name) {
  for (const auto& w : kWeights)
    if (w.name == name) return w;
  throw UsageError("unknown time weight '" + name + "' (expected one, linear)");
}

Functional endpoint(const ScalarFunction& f) {
  const std::string name = "endpoint:" + f.name;
  return Functional(
      name,
      [f, name](const StoppedPath& p) {
        require_scalar(p, name);
        return f.f(p.endpoint());
      },
      Smoothness::C12,
      [f, name](const StoppedPath& p) {
        require_scalar(p, name);
        return jet(0.0, f.df(p.endpoint()), f.d2f(p.endpoint()));
      },
      [f, name](const StoppedPath& p) {
        require_scalar(p, name);
        require_bump_free(p, name);
        auto rep = RieszRepresentation::zero(p.grid(), p.stop_index(), 1);
        rep.atom(0) = f.df(p.endpoint());
        return rep;
      });
}

Functional running_integral(const ScalarFunction& g) {
  const std::string name = "integral:" + g.name;
  const bool identity = g.name == "identity";
  return Functional(
      name,
      [g, name, identity](const StoppedPath& p) {
        require_scalar(p, name);
        if (identity) return p.left_integral();
        double s = 0.0;
        for (int i = 0; i < p.stop_index(); ++i) s += g.f(p.sample(i));
        return s * p.grid().dt();
      },
      Smoothness::C12,
      [g, name](const StoppedPath& p) {
        require_scalar(p, name);
        return jet(g.f(p.endpoint()), 0.0, 0.0);
      },
      [g, name](const StoppedPath& p) {
        require_scalar(p, name);
        require_bump_free(p, name);
        auto rep = RieszRepresentation::zero(p.grid(), p.stop_index(), 1);
        for (int i = 0; i < p.stop_index(); ++i) rep.weights(i, 0) = g.df(p.sample(i)) * p.grid().dt();
        return rep;
      });
}

Functional weighted_integral(const TimeWeight& w) {
  const std::string name = "weighted:" + w.name;
  return Functional(
      name,
      [w, name](const StoppedPath& p) {
        require_scalar(p, name);
        return weighted_sum(p, w);
      },
      Smoothness::C12,
      [w, name](const StoppedPath& p) {
        require_scalar(p, name);
        return jet(w.w(p.stop_time()) * p.endpoint(), 0.0, 0.0);
      },
      [w, name](const StoppedPath& p) {
        require_scalar(p, name);
        require_bump_free(p, name);
        auto rep = RieszRepresentation::zero(p.grid(), p.stop_index(), 1);
        for (int i = 0; i < p.stop_index(); ++i)
          rep.weights(i, 0) = w.w(p.grid().time(i)) * p.grid().dt();
        return rep;
      });
}

Functional product() {
  const std::string name = "product";
  return Functional(
      name,
      [name](const StoppedPath& p) {
        require_scalar(p, name);
        return p.endpoint() * p.left_integral();
      },
      Smoothness::C12,
      [name](const StoppedPath& p) {
        require_scalar(p, name);
        return jet(p.endpoint() * p.endpoint(), p.left_integral(), 0.0);
      },
      [name](const StoppedPath& p) {
        require_scalar(p, name);
        require_bump_free(p, name);
        auto rep = RieszRepresentation::zero(p.grid(), p.stop_index(), 1);
        for (int i = 0; i < p.stop_index(); ++i) rep.weights(i, 0) = p.endpoint() * p.grid().dt();
        rep.atom(0) = p.left_integral();
        return rep;
      });
}

Functional quadratic_integral(const TimeWeight& w) {
  const std::string name = w.name == "one" ? "quadratic-integral" : "quadratic-integral:" + w.name;
  return Functional(
      name,
      [w, name](const StoppedPath& p) {
        require_scalar(p, name);
        const double i = weighted_sum(p, w);
        return i * i;
      },
      Smoothness::C12,
      [w, name](const StoppedPath& p) {
        require_scalar(p, name);
        return jet(2.0 * w.w(p.stop_time()) * p.endpoint() * weighted_sum(p, w), 0.0, 0.0);
      },
      [w, name](const StoppedPath& p) {
        require_scalar(p, name);
        require_bump_free(p, name);
        auto rep = RieszRepresentation::zero(p.grid(), p.stop_index(), 1);
        const double i = weighted_sum(p, w);
        for (int n = 0; n < p.stop_index(); ++n)
          rep.weights(n, 0) = 2.0 * i * w.w(p.grid().time(n)) * p.grid().dt();
        return rep;
      });
}

Functional endpoint_times_time(const ScalarFunction& f) {
  const std::string name = "endpoint-time:" + f.name;
  return Functional(
      name,
      [f, name](const StoppedPath& p) {
        require_scalar(p, name);
        return p.stop_time() * f.f(p.endpoint());
      },
      Smoothness::C12,
      [f, name](const StoppedPath& p) {
        require_scalar(p, name);
        const double t = p.stop_time();
        return jet(f.f(p.endpoint()), t * f.df(p.endpoint()), t * f.d2f(p.endpoint()));
      },
      [f, name](const StoppedPath& p) {
        require_scalar(p, name);
        require_bump_free(p, name);
        auto rep = RieszRepresentation::zero(p.grid(), p.stop_index(), 1);
        rep.atom(0) = p.stop_time() * f.df(p.endpoint());
        return rep;
      });
}

Functional constant_functional(double c) {
  std::ostringstream os;
  os << "constant:" << c;
  return Functional(
      os.str(), [c](const StoppedPath&) { return c; }, Smoothness::C12,
      [](const StoppedPath& p) {
        DupireJet j;
        j.dx = Eigen::VectorXd::Zero(p.dim());
        j.dxx = Eigen::MatrixXd::Zero(p.dim(), p.dim());
        return j;
      },
      [](const StoppedPath& p) { return RieszRepresentation::zero(p.grid(), p.stop_index(), p.dim()); });
}

Functional endpoint_quadratic_form(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw DomainError("endpoint_quadratic_form: matrix must be square");
  const Eigen::MatrixXd sym = a + a.transpose();
  auto endpoint_of = [a](const StoppedPath& p) {
    if (p.dim() != a.rows()) throw DomainError("endpoint_quadratic_form: dimension mismatch");
    Eigen::VectorXd x(p.dim());
    for (int j = 0; j < p.dim(); ++j) x(j) = p.endpoint(j);
    return x;
  };
  return Functional(
      "endpoint-quadform",
      [a, endpoint_of](const StoppedPath& p) {
        const Eigen::VectorXd x = endpoint_of(p);
        return x.dot(a * x);
      },
      Smoothness::C12,
      [sym, endpoint_of](const StoppedPath& p) {
        DupireJet j;
        j.dx = sym * endpoint_of(p);
        j.dxx = sym;
        return j;
      },
      [sym, endpoint_of](const StoppedPath& p) {
        require_bump_free(p, "endpoint-quadform");
        auto rep = RieszRepresentation::zero(p.grid(), p.stop_index(), p.dim());
        rep.atom = sym * endpoint_of(p);
        return rep;
      });
}

Functional make_functional(const std::string& id) {
  const auto colon = id.find(':');
  const std::string head = id.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : id.substr(colon + 1);
  try {
    if (head == "endpoint" && !arg.empty()) return endpoint(scalar_function(arg));
    if (head == "integral" && !arg.empty()) return running_integral(scalar_function(arg));
    if (head == "weighted" && !arg.empty()) return weighted_integral(time_weight(arg));
    if (head == "product" && arg.empty()) return product();
    if (head == "quadratic-integral") return quadratic_integral(time_weight(arg.empty() ? "one" : arg));
    if (head == "endpoint-time" && !arg.empty()) return endpoint_times_time(scalar_function(arg));
    if (head == "constant") {
      std::size_t used = 0;
      const double c = arg.empty() ? 1.0 : std::stod(arg, &used);
      if (!arg.empty() && used != arg.size()) throw UsageError("bad constant");
      return constant_functional(c);
    }
  } catch (const UsageError&) {
  } catch (const std::logic_error&) {
  }
  std::ostringstream os;
  os << "unknown functional id '" << id << "'; valid ids:";
  for (const auto& v : functional_ids()) os << ' ' << v;
  throw UsageError(os.str());
}

std::vector<std::string> functional_ids() {
  std::vector<std::string> out;
  for (const auto& f : kFunctions) out.push_back("endpoint:" + f.name);
  for (const auto& f : kFunctions) out.push_back("integral:" + f.name);
  for (const auto& w : kWeights) out.push_back("weighted:" + w.name);
  out.push_back("product");
  out.push_back("quadratic-integral");
  out.push_back("quadratic-integral:linear");
  for (const auto& f : kFunctions) out.push_back("endpoint-time:" + f.name);
  out.push_back("constant:<c>");
  return out;
}

std::vector<std::string> core_catalog_ids() {
  return {"endpoint:square", "integral:identity", "weighted:linear",
          "product",         "quadratic-integral", "endpoint-time:square"};
}

}  // namespace pathcalc
