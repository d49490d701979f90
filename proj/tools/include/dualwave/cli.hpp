#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace dualwave::cli {

enum ExitCode : int { kOk = 0, kConfig = 1, kNumeric = 2, kRegime = 3 };

/// Runs one subcommand. args excludes the program name. Errors are printed
/// as one JSON object on err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 quoting; header row first; written through a temp file and rename.
void emit_csv(const CsvTable& table, const std::string& path);
/// Sorted keys, two-space indent, trailing newline; atomic like emit_csv.
void emit_json(const nlohmann::json& value, const std::string& path);
std::string format_double(double x);

/// "lo:hi:logK" or "lo:hi:linK": K points including both ends.
std::vector<double> parse_a_grid(const std::string& spec);

/// Loads a JSON object from path; parse errors become ConfigError.
nlohmann::json load_config(const std::string& path);

}  // namespace dualwave::cli
