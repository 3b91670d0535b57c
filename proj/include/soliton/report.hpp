#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace soliton {

// Deterministic report bundle: files are rendered to strings, written in
// sorted order and listed in manifest.txt with FNV-1a content hashes.
// Identical inputs produce byte-identical outputs.
struct Report {
    std::vector<std::pair<std::string, std::string>> files;
    void add(std::string name, std::string content);
};

std::string format_double(double v); // shortest round-trip decimal
std::uint64_t fnv1a64(std::string_view data);

// CSV column helper: header row plus format_double rows.
std::string csv_table(const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows,
                      const std::string& footer = "");

// Minimal SVG polyline plot.
std::string svg_line_plot(const std::string& title, const std::vector<double>& x,
                          const std::vector<double>& y);

// Writes all files plus manifest.txt under dir (created if needed); returns
// the manifest content. Throws on I/O failure.
std::string write_report(const Report& report, const std::string& dir);

} // namespace soliton
