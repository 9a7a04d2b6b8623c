#include "pathcalc/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "pathcalc/errors.hpp"

namespace pathcalc {

namespace {

void dump_into(std::string& out, const Json& j) {
  switch (j.type()) {
    case Json::value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += Json(it.key()).dump();
        out += ':';
        dump_into(out, it.value());
      }
      out += '}';
      break;
    }
    case Json::value_t::array: {
      out += '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i > 0) out += ',';
        dump_into(out, j[i]);
      }
      out += ']';
      break;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      break;
    }
    default:
      out += j.dump();
  }
}

std::string csv_field(double v) { return format_double(v); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string dump_json(const Json& j) {
  std::string out;
  dump_into(out, j);
  return out;
}

Json to_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json to_json(const Eigen::MatrixXd& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    a.push_back(std::move(row));
  }
  return a;
}

Json to_json(const ConvergenceReport& r) {
  Json j;
  Json levels = Json::array();
  for (const auto& l : r.levels) {
    levels.push_back({{"level", l.level},
                      {"value", l.value},
                      {"reference", l.reference},
                      {"error", l.error},
                      {"stderr", l.std_error}});
  }
  j["levels"] = std::move(levels);
  j["fitted_order"] = r.fitted_order ? Json(*r.fitted_order) : Json(nullptr);
  j["intercept"] = r.intercept;
  j["intercept_stderr"] = r.intercept_std_error;
  return j;
}

Json to_json(const CoherenceReport& r) {
  Json j;
  j["dt_frechet"] = r.dt_frechet;
  j["dt_dupire"] = r.dt_dupire;
  j["atom_mu"] = to_json(r.atom_mu);
  j["dx_dupire"] = to_json(r.dx_dupire);
  j["atom_lambda"] = to_json(r.atom_lambda);
  j["dxx_dupire"] = to_json(r.dxx_dupire);
  j["max_abs_gap"] = r.max_abs_gap;
  return j;
}

Json to_json(const DupireJet& jet) {
  Json j;
  j["dt"] = jet.dt;
  j["dx"] = to_json(jet.dx);
  j["dxx"] = to_json(jet.dxx);
  return j;
}

Json to_json(const RieszRepresentation& rep) {
  Json j;
  j["t"] = rep.grid.time(rep.t_index);
  j["t_index"] = rep.t_index;
  Json nodes = Json::array();
  for (Eigen::Index i = 0; i < rep.weights.rows(); ++i) {
    nodes.push_back({{"t", rep.grid.time(static_cast<int>(i))},
                     {"weight", to_json(Eigen::VectorXd(rep.weights.row(i).transpose()))}});
  }
  j["weights"] = std::move(nodes);
  j["atom"] = to_json(rep.atom);
  return j;
}

void write_csv(std::ostream& os, const ConvergenceReport& r) {
  os << "level,value,reference,error,stderr\n";
  for (const auto& l : r.levels) {
    os << csv_field(l.level) << ',' << csv_field(l.value) << ',' << csv_field(l.reference) << ','
       << csv_field(l.error) << ',' << csv_field(l.std_error) << '\n';
  }
}

void write_csv(std::ostream& os, const CoherenceReport& r) {
  os << "quantity,frechet,dupire,gap\n";
  auto row = [&](const std::string& name, double a, double b) {
    os << name << ',' << csv_field(a) << ',' << csv_field(b) << ',' << csv_field(std::abs(a - b)) << '\n';
  };
  row("dt", r.dt_frechet, r.dt_dupire);
  for (Eigen::Index i = 0; i < r.atom_mu.size(); ++i)
    row("dx_" + std::to_string(i + 1), r.atom_mu(i), r.dx_dupire(i));
  for (Eigen::Index i = 0; i < r.atom_lambda.rows(); ++i)
    for (Eigen::Index c = 0; c < r.atom_lambda.cols(); ++c)
      row("dxx_" + std::to_string(i + 1) + "_" + std::to_string(c + 1), r.atom_lambda(i, c),
          r.dxx_dupire(i, c));
}

void write_text_file(const std::filesystem::path& file, const std::string& text) {
  std::error_code ec;
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path(), ec);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + file.string() + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("failed writing '" + file.string() + "'");
}

void emit_report(const ConvergenceReport& r, ReportFormat format, const std::filesystem::path& file) {
  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    write_csv(os, r);
  } else {
    os << dump_json(to_json(r)) << '\n';
  }
  write_text_file(file, os.str());
}

void emit_report(const CoherenceReport& r, ReportFormat format, const std::filesystem::path& file) {
  std::ostringstream os;
  if (format == ReportFormat::Csv) {
    write_csv(os, r);
  } else {
    os << dump_json(to_json(r)) << '\n';
  }
  write_text_file(file, os.str());
}

}  // namespace pathcalc
