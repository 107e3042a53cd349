#pragma once

// Tabular (CSV) and plot (SVG) emitters. CSVs are the source of truth; plots
// are a convenience.

#include <string>
#include <vector>

#include "nfqed/spectral.hpp"

namespace nfqed {

inline constexpr const char* kSpectrumCsvHeader =
    "delta_over_gamma,T,R,L,T_rayleigh_same,T_rayleigh_cross,T_raman,R_rayleigh_same,R_rayleigh_cross,R_raman";

// 12 significant digits, trailing zeros dropped.
std::string format_number(double v);

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    bool operator==(const Table&) const = default;
};

std::string table_to_csv(const Table& t);
// Throws ParseError on ragged rows or non-numeric cells.
Table table_from_csv(const std::string& text);

Table spectrum_table(const SpectrumResult& s);
SpectrumResult spectrum_from_table(const Table& t);

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool dashed = false;
};

struct Plot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
};

std::string xml_escape(const std::string& s);

// Panels stacked vertically; the config hash goes into a leading comment.
std::string render_svg(const std::vector<Plot>& panels, const std::string& config_hash);

// T, R, L curves of one spectrum.
Plot spectrum_plot(const std::string& title, const SpectrumResult& s);

}  // namespace nfqed
