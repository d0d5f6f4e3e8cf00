#include "brw/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace brw {

namespace {

const char* kPalette[] = {"#1f6feb", "#d1242f", "#1a7f37", "#9a6700", "#8250df", "#bf3989"};

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// tick step of the form {1,2,5}*10^k giving 4-8 ticks
double nice_step(double span) {
    if (span <= 0) return 1.0;
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double frac = raw / mag;
    if (frac < 1.5) return mag;
    if (frac < 3.5) return 2 * mag;
    if (frac < 7.5) return 5 * mag;
    return 10 * mag;
}

} // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& xlabel, const std::string& ylabel,
                      const std::vector<SvgSeries>& series) {
    const double W = 720, H = 480;
    const double ml = 70, mr = 24, mt = 44, mb = 56;
    const double pw = W - ml - mr, ph = H - mt - mb;

    double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
    bool first = true;
    for (const auto& s : series) {
        for (auto [x, y] : s.pts) {
            if (first) {
                x0 = x1 = x;
                y0 = y1 = y;
                first = false;
            }
            x0 = std::min(x0, x);
            x1 = std::max(x1, x);
            y0 = std::min(y0, y);
            y1 = std::max(y1, y);
        }
    }
    if (first) throw std::invalid_argument("write_line_chart: no points");
    if (x1 == x0) { x0 -= 0.5; x1 += 0.5; }
    if (y1 == y0) { y0 -= 0.5; y1 += 0.5; }
    // breathing room on y
    const double ypad = 0.06 * (y1 - y0);
    y0 -= ypad;
    y1 += ypad;

    auto X = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
    auto Y = [&](double y) { return mt + ph - (y - y0) / (y1 - y0) * ph; };

    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_line_chart: cannot open " + path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
      << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
    f << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
    f << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"15\" font-weight=\"bold\">" << title << "</text>\n";

    // gridlines + ticks
    const double xs = nice_step(x1 - x0), ys = nice_step(y1 - y0);
    f << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">\n";
    for (double tx = std::ceil(x0 / xs) * xs; tx <= x1 + 1e-9 * xs; tx += xs) {
        const double px = X(tx);
        f << "<line x1=\"" << px << "\" y1=\"" << mt << "\" x2=\"" << px << "\" y2=\"" << mt + ph
          << "\" stroke=\"#e3e3e3\"/>\n";
        f << "<text x=\"" << px << "\" y=\"" << mt + ph + 16 << "\" text-anchor=\"middle\">"
          << fmt(tx) << "</text>\n";
    }
    for (double ty = std::ceil(y0 / ys) * ys; ty <= y1 + 1e-9 * ys; ty += ys) {
        const double py = Y(ty);
        f << "<line x1=\"" << ml << "\" y1=\"" << py << "\" x2=\"" << ml + pw << "\" y2=\"" << py
          << "\" stroke=\"#e3e3e3\"/>\n";
        f << "<text x=\"" << ml - 6 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\">" << fmt(ty)
          << "</text>\n";
    }
    f << "</g>\n";

    // axes
    f << "<line x1=\"" << ml << "\" y1=\"" << mt + ph << "\" x2=\"" << ml + pw << "\" y2=\""
      << mt + ph << "\" stroke=\"#222\"/>\n";
    f << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << mt + ph
      << "\" stroke=\"#222\"/>\n";
    f << "<text x=\"" << ml + pw / 2 << "\" y=\"" << H - 14
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << xlabel
      << "</text>\n";
    f << "<text x=\"18\" y=\"" << mt + ph / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 18 "
      << mt + ph / 2 << ")\">" << ylabel << "</text>\n";

    // series
    for (size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const std::string col =
            s.color.empty() ? kPalette[si % (sizeof kPalette / sizeof *kPalette)] : s.color;
        auto pts = s.pts;
        std::sort(pts.begin(), pts.end());
        f << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
        for (auto [x, y] : pts) f << fmt(X(x)) << "," << fmt(Y(y)) << " ";
        f << "\"/>\n";
        for (auto [x, y] : pts)
            f << "<circle cx=\"" << fmt(X(x)) << "\" cy=\"" << fmt(Y(y)) << "\" r=\"3\" fill=\""
              << col << "\"/>\n";
        // legend entry
        const double lx = ml + 12, ly = mt + 14 + 18 * double(si);
        f << "<line x1=\"" << lx << "\" y1=\"" << ly - 4 << "\" x2=\"" << lx + 22 << "\" y2=\""
          << ly - 4 << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>\n";
        f << "<text x=\"" << lx + 28 << "\" y=\"" << ly
          << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    }
    f << "</svg>\n";
}

} // namespace brw
