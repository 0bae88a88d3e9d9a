#include "uniq/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "uniq/errors.hpp"

namespace uniq {

namespace {

std::string num(double v, const char* fmt = "%.6g") {
    char buf[40];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

std::string exact(double v) { return num(v, "%.17g"); }

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c; break;
        }
    }
    return out;
}

struct LinearScale {
    double v0, v1;  // value range
    double p0, p1;  // pixel range
    double operator()(double v) const { return p0 + (v - v0) / (v1 - v0) * (p1 - p0); }
};

}  // namespace

std::string render_falloff_svg(const std::vector<FalloffPoint>& points) {
    if (points.empty()) throw Error("falloff chart needs at least one point");

    const double margin_left = 70, margin_right = 30, margin_top = 40, margin_bottom = 70;
    const double plot_w = std::max<std::size_t>(points.size() - 1, 1) * 90.0;
    const double plot_h = 280.0;
    const double width = margin_left + plot_w + margin_right;
    const double height = margin_top + plot_h + margin_bottom;

    double lo = 0.0, hi = 1.0;
    for (const auto& p : points) {
        lo = std::min(lo, p.normalized);
        hi = std::max(hi, p.normalized);
    }
    const double pad = 0.05 * (hi - lo);
    LinearScale sy{lo - pad, hi + pad, margin_top + plot_h, margin_top};
    auto sx = [&](std::size_t i) {
        return points.size() == 1 ? margin_left + plot_w / 2
                                  : margin_left + plot_w * static_cast<double>(i) /
                                        static_cast<double>(points.size() - 1);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
        << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n";
    svg << "<text x=\"" << num(width / 2)
        << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
           "Normalized IUM correlation fall-off</text>\n";

    // axes
    svg << "<line x1=\"" << num(margin_left) << "\" y1=\"" << num(margin_top) << "\" x2=\""
        << num(margin_left) << "\" y2=\"" << num(margin_top + plot_h)
        << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << num(margin_left) << "\" y1=\"" << num(margin_top + plot_h)
        << "\" x2=\"" << num(margin_left + plot_w) << "\" y2=\"" << num(margin_top + plot_h)
        << "\" stroke=\"black\"/>\n";
    for (double tick : {0.0, 0.5, 1.0}) {
        if (tick < sy.v0 || tick > sy.v1) continue;
        const double y = sy(tick);
        svg << "<line x1=\"" << num(margin_left - 5) << "\" y1=\"" << num(y) << "\" x2=\""
            << num(margin_left + plot_w) << "\" y2=\"" << num(y)
            << "\" stroke=\"#cccccc\" stroke-dasharray=\"3,3\"/>\n";
        svg << "<text x=\"" << num(margin_left - 10) << "\" y=\"" << num(y + 4)
            << "\" text-anchor=\"end\" font-size=\"11\">" << num(tick) << "</text>\n";
    }

    svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) svg << ' ';
        svg << num(sx(i)) << ',' << num(sy(points[i].normalized));
    }
    svg << "\"/>\n";

    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        svg << "<circle cx=\"" << num(sx(i)) << "\" cy=\"" << num(sy(p.normalized))
            << "\" r=\"4\" fill=\"#1f77b4\" data-condition=\"" << xml_escape(p.condition)
            << "\" data-r=\"" << exact(p.r) << "\" data-normalized=\"" << exact(p.normalized)
            << "\"/>\n";
        svg << "<text x=\"" << num(sx(i)) << "\" y=\"" << num(sy(p.normalized) - 8)
            << "\" text-anchor=\"middle\" font-size=\"10\">" << num(p.normalized, "%.4g")
            << "</text>\n";
        svg << "<text x=\"" << num(sx(i)) << "\" y=\"" << num(margin_top + plot_h + 16)
            << "\" text-anchor=\"middle\" font-size=\"10\">" << xml_escape(p.condition)
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string render_boxplot_svg(const std::vector<BoxPanel>& panels) {
    if (panels.empty()) throw Error("box plot needs at least one panel");

    const double margin_left = 70, margin_right = 30, margin_top = 40, margin_bottom = 70;
    const double slot = 80.0, box_w = 36.0;
    const double plot_w = slot * static_cast<double>(panels.size());
    const double plot_h = 300.0;
    const double width = margin_left + plot_w + margin_right;
    const double height = margin_top + plot_h + margin_bottom;

    double lo = panels.front().stats.lower_whisker;
    double hi = panels.front().stats.upper_whisker;
    for (const auto& p : panels) {
        lo = std::min(lo, p.stats.lower_whisker);
        hi = std::max(hi, p.stats.upper_whisker);
        for (double o : p.stats.outliers) {
            lo = std::min(lo, o);
            hi = std::max(hi, o);
        }
    }
    if (hi == lo) hi = lo + 1.0;
    const double pad = 0.05 * (hi - lo);
    LinearScale sy{lo - pad, hi + pad, margin_top + plot_h, margin_top};

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
        << num(height) << "\" viewBox=\"0 0 " << num(width) << " " << num(height) << "\">\n";
    svg << "<text x=\"" << num(width / 2)
        << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
           "Impostor score distribution per condition</text>\n";
    svg << "<line x1=\"" << num(margin_left) << "\" y1=\"" << num(margin_top) << "\" x2=\""
        << num(margin_left) << "\" y2=\"" << num(margin_top + plot_h)
        << "\" stroke=\"black\"/>\n";

    for (std::size_t i = 0; i < panels.size(); ++i) {
        const auto& s = panels[i].stats;
        const double cx = margin_left + slot * (static_cast<double>(i) + 0.5);
        const double x0 = cx - box_w / 2, x1 = cx + box_w / 2;

        svg << "<g data-condition=\"" << xml_escape(panels[i].condition) << "\" data-q1=\""
            << exact(s.q1) << "\" data-median=\"" << exact(s.median) << "\" data-q3=\""
            << exact(s.q3) << "\" data-lower-whisker=\"" << exact(s.lower_whisker)
            << "\" data-upper-whisker=\"" << exact(s.upper_whisker) << "\">\n";

        // whiskers
        svg << "<line x1=\"" << num(cx) << "\" y1=\"" << num(sy(s.upper_whisker)) << "\" x2=\""
            << num(cx) << "\" y2=\"" << num(sy(s.q3)) << "\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << num(cx) << "\" y1=\"" << num(sy(s.q1)) << "\" x2=\"" << num(cx)
            << "\" y2=\"" << num(sy(s.lower_whisker)) << "\" stroke=\"black\"/>\n";
        for (double w : {s.lower_whisker, s.upper_whisker})
            svg << "<line x1=\"" << num(cx - box_w / 4) << "\" y1=\"" << num(sy(w)) << "\" x2=\""
                << num(cx + box_w / 4) << "\" y2=\"" << num(sy(w)) << "\" stroke=\"black\"/>\n";

        // box and median
        svg << "<rect x=\"" << num(x0) << "\" y=\"" << num(sy(s.q3)) << "\" width=\"" << num(box_w)
            << "\" height=\"" << num(sy(s.q1) - sy(s.q3))
            << "\" fill=\"#a6cee3\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << num(x0) << "\" y1=\"" << num(sy(s.median)) << "\" x2=\"" << num(x1)
            << "\" y2=\"" << num(sy(s.median)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";

        for (double o : s.outliers)
            svg << "<circle cx=\"" << num(cx) << "\" cy=\"" << num(sy(o))
                << "\" r=\"2.5\" fill=\"black\" data-outlier=\"" << exact(o) << "\"/>\n";

        svg << "</g>\n";
        svg << "<text x=\"" << num(cx) << "\" y=\"" << num(margin_top + plot_h + 16)
            << "\" text-anchor=\"middle\" font-size=\"10\">" << xml_escape(panels[i].condition)
            << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

}  // namespace uniq
