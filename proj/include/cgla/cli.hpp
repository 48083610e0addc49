#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace cgla {

/// Parses "8K,16KB,32768" style lists. K, KB and KiB all mean 1024 bytes.
std::vector<std::uint64_t> parse_size_list(std::string_view text);

/// Runs one cglasim invocation. `args` excludes the program name. Returns the
/// process exit code: 0 success, 1 validation, 2 I/O, 3 model error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cgla
