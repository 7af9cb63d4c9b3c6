#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace agingmimo {

/// Locale-independent shortest round-trip decimal form (std::to_chars), so
/// identical inputs always produce identical bytes.
std::string format_double(double v);
std::string format_int(long long v);
std::string format_u64(std::uint64_t v);

/// Write a CSV file with one header row; every row must match the header
/// width.  Throws IoError on failure.  Fields are written verbatim (callers
/// must not embed commas or newlines).
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

/// Write a string to a file, throwing IoError on failure.
void write_file(const std::string& path, const std::string& content);

}  // namespace agingmimo
