#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace ccdf {

/// FNV-1a 64-bit over a file's bytes, as "0x..." hex.
std::string file_hash(const std::string& path);

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNotConverged = 2;

struct RunOutcome {
    int exit_code = kExitOk;
    nlohmann::json report;
    std::string report_path;
};

/// Execute the pipeline declared by a config file; writes report.json and
/// serialized artifacts into the configured output directory.
RunOutcome cmd_run(const std::string& config_path, bool force = false, bool oracle = false);

/// Method-by-method comparison table across run reports.
struct CompareOutcome {
    int exit_code = kExitOk;
    std::string table_text;
    nlohmann::json table_json;
};

CompareOutcome cmd_compare(const std::vector<std::string>& report_paths,
                           const std::string& reference_label = "");

/// Parse + invariant scan of an FCIDUMP file; returns a summary.
struct CheckOutcome {
    int exit_code = kExitOk;
    std::string summary;
};

CheckOutcome cmd_fcidump_check(const std::string& path);

}  // namespace ccdf
