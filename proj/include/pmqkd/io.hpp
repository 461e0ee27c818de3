#ifndef PMQKD_IO_HPP
#define PMQKD_IO_HPP

#include <string>

namespace pmqkd::io {

/// Resolve a user-supplied output path against PMQKD_OUTPUT_DIR (absolute
/// paths pass through).
std::string resolve_output_path(const std::string& path);

/// Write-to-temp-then-rename; no partial files on failure.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);
bool file_exists(const std::string& path);

} // namespace pmqkd::io

#endif
