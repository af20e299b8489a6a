#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace srs::cli {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

enum ExitCode : int {
    kSuccess = 0,
    kReplayMismatch = 1,
    kInvalidArguments = 2,
    kNumericModeRejected = 3,
    kTrainingDiverged = 4,
};

/// Runs the tool on `args` (without the program name). Human-readable output
/// goes to `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Hex SHA-256 of a byte string.
std::string sha256_hex(const std::string& bytes);

/// Writes `files` under `dir` plus manifest.json describing the invocation.
void write_outputs(const std::filesystem::path& dir, const std::map<std::string, std::string>& files,
                   const nlohmann::json& manifest_base);

}  // namespace srs::cli
