#include "soliton/report.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace soliton {

void Report::add(std::string name, std::string content) {
    files.emplace_back(std::move(name), std::move(content));
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string csv_table(const std::vector<std::string>& columns,
                      const std::vector<std::vector<double>>& rows, const std::string& footer) {
    std::string out;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        out += columns[c];
        out += (c + 1 == columns.size()) ? '\n' : ',';
    }
    for (const auto& row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out += format_double(row[c]);
            out += (c + 1 == row.size()) ? '\n' : ',';
        }
    }
    if (!footer.empty()) {
        out += footer;
        if (footer.back() != '\n') out += '\n';
    }
    return out;
}

std::string svg_line_plot(const std::string& title, const std::vector<double>& x,
                          const std::vector<double>& y) {
    const int W = 640, H = 480, M = 60;
    double xlo = x.empty() ? 0.0 : x.front(), xhi = xlo, ylo = y.empty() ? 0.0 : y.front(),
           yhi = ylo;
    for (double v : x) {
        xlo = std::min(xlo, v);
        xhi = std::max(xhi, v);
    }
    for (double v : y) {
        ylo = std::min(ylo, v);
        yhi = std::max(yhi, v);
    }
    if (xhi == xlo) xhi = xlo + 1.0;
    if (yhi == ylo) yhi = ylo + 1.0;
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
           "viewBox=\"0 0 640 480\">\n";
    out += "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">" + title +
           "</text>\n";
    out += "<rect x=\"60\" y=\"40\" width=\"520\" height=\"380\" fill=\"none\" "
           "stroke=\"black\"/>\n";
    out += "<text x=\"60\" y=\"440\" font-size=\"11\">" + format_double(xlo) + "</text>\n";
    out += "<text x=\"580\" y=\"440\" text-anchor=\"end\" font-size=\"11\">" + format_double(xhi) +
           "</text>\n";
    out += "<text x=\"55\" y=\"420\" text-anchor=\"end\" font-size=\"11\">" + format_double(ylo) +
           "</text>\n";
    out += "<text x=\"55\" y=\"50\" text-anchor=\"end\" font-size=\"11\">" + format_double(yhi) +
           "</text>\n";
    out += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.25\" points=\"";
    for (std::size_t q = 0; q < x.size() && q < y.size(); ++q) {
        const double px = M + (x[q] - xlo) / (xhi - xlo) * (W - 2 * M);
        const double py = (H - M) - (y[q] - ylo) / (yhi - ylo) * (H - 2 * M);
        out += format_double(px);
        out += ',';
        out += format_double(py);
        out += ' ';
    }
    out += "\"/>\n</svg>\n";
    return out;
}

std::string write_report(const Report& report, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::is_directory(dir))
        throw std::runtime_error("write_report: cannot create directory " + dir);

    auto sorted = report.files;
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::string manifest;
    for (const auto& [name, content] : sorted) {
        const fs::path path = fs::path(dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("write_report: cannot write " + path.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        char hash[20];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(content)));
        manifest += name;
        manifest += "  ";
        manifest += hash;
        manifest += '\n';
    }
    {
        const fs::path path = fs::path(dir) / "manifest.txt";
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("write_report: cannot write manifest");
        out.write(manifest.data(), static_cast<std::streamsize>(manifest.size()));
    }
    return manifest;
}

} // namespace soliton
