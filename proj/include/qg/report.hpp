#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "qg/harness.hpp"

namespace qg {

/// Decimal string with 12 significant digits.
std::string format12(double x);

/// {theorem, case, seed, alpha, lhs, rhs, status, reason}; alpha is null when not applicable.
nlohmann::ordered_json check_json(const TheoremCheck& c);

/// {"checks": [...], "summary": {...}} pretty-printed; byte-identical for identical reports.
std::string report_json(const HarnessReport& r);

/// Fixed-width table: one row per theorem with pass / fail / skip counts.
std::string summary_table(const HarnessReport& r);

}  // namespace qg
