#pragma once

// JSON documents exchanged by the command-line tool. Every document carries
// a "schema_version"; the schemas are in schemas/ at the repository root.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lvl/geometry.hpp"
#include "lvl/morse_poly.hpp"
#include "lvl/search.hpp"

namespace lvl {

inline constexpr int kSchemaVersion = 1;

/// Raised for malformed input documents; the message names the field.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ArmSpecDocument {
  std::vector<double> lengths;
  ParamMode mode = ParamMode::Reduced;
  std::optional<std::vector<Vec3>> directions;
  std::optional<Vec3> projection;
  SearchOptions search;

  ArmLengths arm_lengths() const { return ArmLengths(lengths); }
  /// Throws InputError when no directions were given.
  ArmConfiguration configuration() const;
};

ArmSpecDocument parse_arm_spec(const nlohmann::json& doc);
nlohmann::json to_json(const ArmSpecDocument& spec);

struct ReportDocument {
  std::string tool_version;
  nlohmann::json input;
  std::vector<CriticalPointRecord> records;
  SearchSummary summary;
};

nlohmann::json to_json(const ReportDocument& report);
ReportDocument parse_report(const nlohmann::json& doc);

nlohmann::json to_json(const CriticalPointRecord& rec);
CriticalPointRecord parse_record(const nlohmann::json& j);

/// One row per record, fixed column order, 17 significant digits.
void write_csv(const ReportDocument& report, std::ostream& os);

struct BottMorseInventory {
  std::vector<CriticalManifoldDatum> criticals;  // counts already expanded
  IntPolynomial manifold;
};

BottMorseInventory parse_inventory(const nlohmann::json& doc);

/// Parses text, rethrowing syntax errors as InputError with line and column.
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);

}  // namespace lvl
