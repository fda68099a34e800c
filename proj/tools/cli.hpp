#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace treepack::cli {

/// Exit codes: 0 certified packing, 1 input error, 2 retryable failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 1;
inline constexpr int kExitRetryable = 2;

/// `args` excludes the program and subcommand names.
int cmd_pack(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cmd_diagnose(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Dispatches on args[0] ("pack" or "diagnose").
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// git blob hash: SHA-1 over "blob <size>\0" followed by the content.
std::string git_blob_sha1(const std::string& content);

/// --threads fallback: TREEPACK_THREADS, else the hardware concurrency.
int default_threads();

} // namespace treepack::cli
