#pragma once

// Command layer behind the papt command-line tool: configuration loading,
// dataset generation for each command, and output writing with metadata.
// Computation (run) and I/O (write_outputs) are separate so the datasets
// can be checked without touching the filesystem.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace papt::cli {

inline constexpr const char* kVersion = "1.0.0";

/// Commands accepted as the first positional token.
const std::vector<std::string>& commands();

struct RunConfig {
  std::string command;
  /// Parsed configuration file (may be empty). Each command reads its own
  /// block: fig1, fig2, fock, bec, sense, fwm.
  nlohmann::json file = nlohmann::json::object();
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Parses a TOML (.toml) or JSON (anything else) file. Missing or unreadable
/// files raise IoError; syntax errors raise InputError.
nlohmann::json load_config_file(const std::filesystem::path& path);

/// Defaults for the block read by `command`.
nlohmann::json default_block(std::string_view command);

/// Defaults overlaid with the user's block. Unknown keys and type mismatches
/// raise InputError.
nlohmann::json effective_block(std::string_view command, const nlohmann::json& file);

/// 64-bit FNV-1a of the canonical (sorted, compact) JSON text, as hex.
std::string config_hash(const nlohmann::json& effective);

struct Table {
  std::string file;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Report {
  std::string file;
  nlohmann::json body;
};

struct RunOutput {
  nlohmann::json effective;
  std::vector<Table> tables;
  std::vector<Report> reports;
};

/// Computes every dataset of the command. Deterministic in (config, seed);
/// `threads` only changes wall time.
RunOutput run(const RunConfig& config);

/// Writes CSV tables with a '#' metadata header and JSON reports with a
/// "meta" object. Returns the written paths. Failures raise IoError.
std::vector<std::filesystem::path> write_outputs(const RunOutput& output, const RunConfig& config);

/// Full command-line entry point; returns the process exit code
/// (0 ok, 2 config error, 3 numerical-validity error, 4 I/O error).
int main_entry(int argc, char** argv);

}  // namespace papt::cli
