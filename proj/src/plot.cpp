#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "delmdp/harness.hpp"
#include "delmdp/io.hpp"

namespace delmdp {

namespace {

struct Series {
    std::string label;
    std::vector<double> x, y, band;  // band = one standard deviation, may be empty
};

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_num(const std::string& s, std::size_t line_no, std::size_t col) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw FileFormatError("line " + std::to_string(line_no) + ", column " +
                              std::to_string(col + 1) + ": '" + s + "' is not a number");
    }
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Csv read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileFormatError("cannot open " + path);
    Csv csv;
    std::string line;
    if (!std::getline(in, line)) throw FileFormatError(path + ": empty file, no header");
    csv.header = split_csv(line);
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_csv(line);
        if (cells.size() != csv.header.size())
            throw FileFormatError(path + ": line " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " cells, header has " +
                                  std::to_string(csv.header.size()));
        csv.rows.push_back(std::move(cells));
    }
    return csv;
}

// Recognizes the three CSV schemas the harness writes and turns them into
// labeled series.
std::pair<std::vector<Series>, std::pair<std::string, std::string>> load_series(
    const std::string& path) {
    Csv csv = read_csv(path);
    const auto& h = csv.header;
    std::vector<Series> series;

    auto trace_header = std::vector<std::string>{
        "t",     "cum_reward", "pseudo_regret", "realized_regret",
        "n_mnt", "n_est",      "n_xpt",         "n_xpr"};
    auto summary_header = std::vector<std::string>{
        "S", "agent", "T", "seeds", "mean_final_pseudo_regret", "std_final_pseudo_regret"};
    auto timeseries_header =
        std::vector<std::string>{"t", "agent", "mean_pseudo_regret", "std_pseudo_regret"};

    if (h == trace_header) {
        Series pseudo{"pseudo_regret", {}, {}, {}};
        Series realized{"realized_regret", {}, {}, {}};
        for (std::size_t i = 0; i < csv.rows.size(); ++i) {
            const auto& row = csv.rows[i];
            double t = parse_num(row[0], i + 2, 0);
            pseudo.x.push_back(t);
            pseudo.y.push_back(parse_num(row[2], i + 2, 2));
            realized.x.push_back(t);
            realized.y.push_back(parse_num(row[3], i + 2, 3));
        }
        return {{pseudo, realized}, {"t", "regret"}};
    }
    if (h == summary_header || h == timeseries_header) {
        bool summary = h == summary_header;
        std::size_t xcol = 0, agent_col = 1;
        std::size_t mean_col = summary ? 4 : 2, std_col = summary ? 5 : 3;
        std::map<std::string, std::size_t> index;
        for (std::size_t i = 0; i < csv.rows.size(); ++i) {
            const auto& row = csv.rows[i];
            const std::string& agent = row[agent_col];
            if (!index.count(agent)) {
                index[agent] = series.size();
                series.push_back({agent, {}, {}, {}});
            }
            Series& s = series[index[agent]];
            s.x.push_back(parse_num(row[xcol], i + 2, xcol));
            s.y.push_back(parse_num(row[mean_col], i + 2, mean_col));
            s.band.push_back(parse_num(row[std_col], i + 2, std_col));
        }
        return {series, {summary ? "S" : "t", "pseudo-regret"}};
    }
    throw FileFormatError(path + ": line 1: unrecognized CSV schema");
}

const char* kPalette[] = {"#1f6fb4", "#d0541b", "#2e8b57", "#8b3a8b", "#b8860b", "#555555"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

void emit_plot(const std::string& csv_path, const std::string& out_path) {
    auto [series, axes] = load_series(csv_path);

    const double W = 640, H = 420, ML = 70, MR = 20, MT = 24, MB = 46;
    double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    bool have = false;
    for (const Series& s : series) {
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            double lo = s.y[i] - (s.band.empty() ? 0.0 : s.band[i]);
            double hi = s.y[i] + (s.band.empty() ? 0.0 : s.band[i]);
            if (!have) {
                xmin = xmax = s.x[i];
                ymin = lo;
                ymax = hi;
                have = true;
            } else {
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, lo);
                ymax = std::max(ymax, hi);
            }
        }
    }
    if (xmax <= xmin) xmax = xmin + 1;
    if (ymax <= ymin) ymax = ymin + 1;
    auto px = [&](double x) { return ML + (x - xmin) / (xmax - xmin) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (y - ymin) / (ymax - ymin) * (H - MT - MB); };

    std::ofstream svg(out_path);
    if (!svg) throw FileFormatError("cannot open " + out_path + " for writing");
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
        << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\""
        << H - MB << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\""
        << H - MB << "\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        double xv = xmin + (xmax - xmin) * k / 4.0;
        double yv = ymin + (ymax - ymin) * k / 4.0;
        svg << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << H - MB + 18
            << "\" font-size=\"11\" text-anchor=\"middle\">" << fmt(xv) << "</text>\n";
        svg << "<text x=\"" << ML - 6 << "\" y=\"" << fmt(py(yv) + 4)
            << "\" font-size=\"11\" text-anchor=\"end\">" << fmt(yv) << "</text>\n";
    }
    svg << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 8
        << "\" font-size=\"12\" text-anchor=\"middle\">" << axes.first << "</text>\n";
    svg << "<text x=\"14\" y=\"" << (MT + H - MB) / 2
        << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << (MT + H - MB) / 2 << ")\">" << axes.second << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const Series& s = series[si];
        const char* color = kPalette[si % (sizeof kPalette / sizeof *kPalette)];
        if (!s.band.empty() && !s.x.empty()) {
            svg << "<polygon fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\""
                << " points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg << fmt(px(s.x[i])) << "," << fmt(py(s.y[i] + s.band[i])) << " ";
            for (std::size_t i = s.x.size(); i-- > 0;)
                svg << fmt(px(s.x[i])) << "," << fmt(py(s.y[i] - s.band[i])) << " ";
            svg << "\"/>\n";
        }
        if (!s.x.empty()) {
            svg << "<polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                svg << fmt(px(s.x[i])) << "," << fmt(py(s.y[i])) << " ";
            svg << "\"/>\n";
        }
        double ly = MT + 16.0 * static_cast<double>(si);
        svg << "<line x1=\"" << W - MR - 120 << "\" y1=\"" << ly << "\" x2=\""
            << W - MR - 100 << "\" y2=\"" << ly << "\" stroke=\"" << color
            << "\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << W - MR - 94 << "\" y=\"" << ly + 4 << "\" font-size=\"11\">"
            << s.label << "</text>\n";
    }
    svg << "</svg>\n";

    // gnuplot-compatible companion: one indexed block per series
    std::string dat_path = out_path + ".dat";
    std::ofstream dat(dat_path);
    if (!dat) throw FileFormatError("cannot open " + dat_path + " for writing");
    dat << "# " << axes.first << " value band\n";
    for (const Series& s : series) {
        dat << "# series: " << s.label << "\n";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            dat << fmt(s.x[i]) << " " << fmt(s.y[i]) << " "
                << fmt(s.band.empty() ? 0.0 : s.band[i]) << "\n";
        }
        dat << "\n\n";
    }
}

}  // namespace delmdp
