#include "nfqed/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "nfqed/error.hpp"

namespace nfqed {

namespace {

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

// "Nice" tick step covering span with about `target` intervals.
double tick_step(double span, int target)
{
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double f : {1.0, 2.0, 5.0, 10.0}) {
        if (f * mag >= raw) {
            return f * mag;
        }
    }
    return 10.0 * mag;
}

}  // namespace

std::string format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string table_to_csv(const Table& t)
{
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out += (i ? "," : "") + t.columns[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            out += (i ? "," : "") + format_number(row[i]);
        }
        out += '\n';
    }
    return out;
}

Table table_from_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    Table t;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::ParseError, "CSV: missing header");
    }
    t.columns = split(line, ',');
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const auto cells = split(line, ',');
        if (cells.size() != t.columns.size()) {
            throw Error(ErrorCode::ParseError, "CSV line " + std::to_string(line_no) + ": expected " +
                                                   std::to_string(t.columns.size()) + " cells");
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (c.empty() || end != c.c_str() + c.size()) {
                throw Error(ErrorCode::ParseError, "CSV line " + std::to_string(line_no) + ": bad number '" + c + "'");
            }
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

Table spectrum_table(const SpectrumResult& s)
{
    Table t;
    t.columns = split(kSpectrumCsvHeader, ',');
    for (const auto& p : s.points) {
        t.rows.push_back({p.delta_over_gamma, p.T, p.R, p.L, p.T_rayleigh_same, p.T_rayleigh_cross, p.T_raman,
                          p.R_rayleigh_same, p.R_rayleigh_cross, p.R_raman});
    }
    return t;
}

SpectrumResult spectrum_from_table(const Table& t)
{
    if (t.columns != split(kSpectrumCsvHeader, ',')) {
        throw Error(ErrorCode::ParseError, "spectrum CSV header mismatch");
    }
    SpectrumResult s;
    for (const auto& r : t.rows) {
        s.points.push_back({r[0], r[1], r[2], r[3], r[4], r[5], r[6], r[7], r[8], r[9]});
    }
    return s;
}

std::string xml_escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string render_svg(const std::vector<Plot>& panels, const std::string& config_hash)
{
    constexpr double kWidth = 760.0;
    constexpr double kPanelHeight = 320.0;
    constexpr double kLeft = 70.0;
    constexpr double kRight = 170.0;
    constexpr double kTop = 36.0;
    constexpr double kBottom = 48.0;
    const double height = kPanelHeight * static_cast<double>(std::max<std::size_t>(panels.size(), 1));

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    o << "<!-- config-hash: " << xml_escape(config_hash) << " -->\n";
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << kWidth << ' ' << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    for (std::size_t pi = 0; pi < panels.size(); ++pi) {
        const Plot& p = panels[pi];
        const double y0 = kPanelHeight * static_cast<double>(pi);
        const double pw = kWidth - kLeft - kRight;
        const double ph = kPanelHeight - kTop - kBottom;

        double xmin = std::numeric_limits<double>::infinity();
        double xmax = -xmin;
        double ymin = xmin;
        double ymax = -xmin;
        for (const auto& s : p.series) {
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                    xmin = std::min(xmin, s.x[i]);
                    xmax = std::max(xmax, s.x[i]);
                    ymin = std::min(ymin, s.y[i]);
                    ymax = std::max(ymax, s.y[i]);
                }
            }
        }
        if (!std::isfinite(xmin)) {
            xmin = 0.0;
            xmax = 1.0;
            ymin = 0.0;
            ymax = 1.0;
        }
        if (xmax == xmin) {
            xmax = xmin + 1.0;
        }
        if (ymax == ymin) {
            ymax = ymin + 1.0;
        }
        const double ypad = 0.05 * (ymax - ymin);
        ymin -= ypad;
        ymax += ypad;
        auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
        auto sy = [&](double y) { return y0 + kTop + (ymax - y) / (ymax - ymin) * ph; };

        o << "<g>\n";
        o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << y0 + 22 << "\" text-anchor=\"middle\" font-size=\"14\">"
          << xml_escape(p.title) << "</text>\n";
        o << "<rect x=\"" << kLeft << "\" y=\"" << y0 + kTop << "\" width=\"" << pw << "\" height=\"" << ph
          << "\" fill=\"none\" stroke=\"black\"/>\n";
        const double xs = tick_step(xmax - xmin, 8);
        for (double t = std::ceil(xmin / xs) * xs; t <= xmax + 1e-9 * xs; t += xs) {
            o << "<line x1=\"" << sx(t) << "\" y1=\"" << y0 + kTop + ph << "\" x2=\"" << sx(t) << "\" y2=\""
              << y0 + kTop + ph + 5 << "\" stroke=\"black\"/>";
            o << "<text x=\"" << sx(t) << "\" y=\"" << y0 + kTop + ph + 18 << "\" text-anchor=\"middle\">"
              << format_number(std::abs(t) < 1e-12 * xs ? 0.0 : t) << "</text>\n";
        }
        const double ys = tick_step(ymax - ymin, 6);
        for (double t = std::ceil(ymin / ys) * ys; t <= ymax + 1e-9 * ys; t += ys) {
            o << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << sy(t) << "\" x2=\"" << kLeft << "\" y2=\"" << sy(t)
              << "\" stroke=\"black\"/>";
            o << "<text x=\"" << kLeft - 8 << "\" y=\"" << sy(t) + 4 << "\" text-anchor=\"end\">"
              << format_number(std::abs(t) < 1e-12 * ys ? 0.0 : t) << "</text>\n";
        }
        o << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << y0 + kPanelHeight - 10
          << "\" text-anchor=\"middle\">" << xml_escape(p.x_label) << "</text>\n";
        o << "<text x=\"16\" y=\"" << y0 + kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
          << y0 + kTop + ph / 2 << ")\">" << xml_escape(p.y_label) << "</text>\n";

        for (std::size_t si = 0; si < p.series.size(); ++si) {
            const Series& s = p.series[si];
            o << "<polyline fill=\"none\" stroke=\"" << xml_escape(s.color) << "\" stroke-width=\"1.5\""
              << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << " points=\"";
            for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i])) {
                    o << sx(s.x[i]) << ',' << sy(s.y[i]) << ' ';
                }
            }
            o << "\"/>\n";
            const double ly = y0 + kTop + 10 + 18 * static_cast<double>(si);
            const double lx = kLeft + pw + 12;
            o << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly
              << "\" stroke=\"" << xml_escape(s.color) << "\" stroke-width=\"2\""
              << (s.dashed ? " stroke-dasharray=\"6 4\"" : "") << "/>";
            o << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4 << "\">" << xml_escape(s.label) << "</text>\n";
        }
        o << "</g>\n";
    }
    o << "</svg>\n";
    return o.str();
}

Plot spectrum_plot(const std::string& title, const SpectrumResult& s)
{
    Series t{"T", {}, {}, "#1f77b4", false};
    Series r{"R", {}, {}, "#d62728", false};
    Series l{"L", {}, {}, "#2ca02c", true};
    for (const auto& p : s.points) {
        for (Series* ser : {&t, &r, &l}) {
            ser->x.push_back(p.delta_over_gamma);
        }
        t.y.push_back(p.T);
        r.y.push_back(p.R);
        l.y.push_back(p.L);
    }
    return {title, "detuning (units of gamma)", "probability", {t, r, l}};
}

}  // namespace nfqed
