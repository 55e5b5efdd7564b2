#pragma once

#include <ostream>
#include <string>

#include "delam/evolution.hpp"

namespace delam {

/// "%.17g" rendering used by every numeric CSV field.
std::string format_number(double x);

void write_ledger_header(std::ostream& os);
void write_ledger_row(std::ostream& os, const LedgerRow& row);
std::string ledger_csv(const EnergyLedger& ledger);

/// Trajectory with the normalized config it was produced from.
std::string trajectory_to_json(const Trajectory& traj, const std::string& config_text);
Trajectory trajectory_from_json(const std::string& text, std::string* config_text = nullptr);

/// Writes bytes verbatim (binary mode, LF line endings preserved).
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace delam
