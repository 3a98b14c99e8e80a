#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

// Small helpers shared by the text readers and writers.
namespace pif::text {

/// Shortest-safe round-trip form: 17 significant digits, `inf` / `-inf` for infinities.
std::string format_real(double x);

/// Parses a decimal or `inf`/`+inf`/`-inf`/`infinity` (case-insensitive).
/// Throws ParseError carrying `line` on failure.
double parse_real(std::string_view token, std::size_t line);

long long parse_integer(std::string_view token, std::size_t line);

/// Splits on whitespace (and commas when `commas` is set); empty fields are dropped.
std::vector<std::string_view> split_fields(std::string_view line, bool commas = false);

std::string_view trim(std::string_view s);

/// Writes via `emit` into a temporary sibling of `path`, then renames over it.
/// On any exception the temporary is removed and no file appears at `path`.
void write_atomically(const std::filesystem::path& path,
                      const std::function<void(std::ostream&)>& emit);

}  // namespace pif::text
