#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include <json.hpp>

#include "pathcalc/frechet_diff.hpp"
#include "pathcalc/verify.hpp"

namespace pathcalc {

using Json = nlohmann::ordered_json;

enum class ReportFormat { Csv, Json };

/// "%.17g"; NaN and infinities print as "nan", "inf", "-inf".
std::string format_double(double v);

/// Compact JSON with floats at 17 significant digits and non-finite
/// numbers as null.  Keys keep insertion order.
std::string dump_json(const Json& j);

Json to_json(const ConvergenceReport& r);
Json to_json(const CoherenceReport& r);
Json to_json(const DupireJet& jet);
Json to_json(const RieszRepresentation& rep);
Json to_json(const Eigen::VectorXd& v);
Json to_json(const Eigen::MatrixXd& m);

/// CSV with header `level,value,reference,error,stderr`, one row per level.
void write_csv(std::ostream& os, const ConvergenceReport& r);
/// CSV with header `quantity,frechet,dupire,gap`.
void write_csv(std::ostream& os, const CoherenceReport& r);

void emit_report(const ConvergenceReport& r, ReportFormat format, const std::filesystem::path& file);
void emit_report(const CoherenceReport& r, ReportFormat format, const std::filesystem::path& file);

/// Writes `text` to `file`, creating parent directories; IoError on failure.
void write_text_file(const std::filesystem::path& file, const std::string& text);

}  // namespace pathcalc
