#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "mcswarm/harness.hpp"

namespace mcswarm {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 480;
constexpr int kMarginLeft = 60;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 50;

const char* mode_color(CohesionMode mode) {
    switch (mode) {
        case CohesionMode::None: return "#1f77b4";
        case CohesionMode::Constant: return "#d62728";
        case CohesionMode::Half: return "#2ca02c";
        case CohesionMode::MixedCriticality: return "#9467bd";
    }
    return "#000000";
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

void write_coverage_svg(std::span<const AggregateCurve> curves, std::ostream& out) {
    if (curves.empty()) throw std::invalid_argument("svg: no curves");
    double t_max = 0.0;
    for (const auto& c : curves) {
        if (c.time_s.empty()) throw std::invalid_argument("svg: empty curve");
        t_max = std::max(t_max, c.time_s.back());
    }
    if (t_max <= 0.0) t_max = 1.0;

    double plot_w = kWidth - kMarginLeft - kMarginRight;
    double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double t) { return kMarginLeft + t / t_max * plot_w; };
    auto py = [&](double cov) { return kMarginTop + (1.0 - cov) * plot_h; };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";

    // Axes and gridlines.
    for (int i = 0; i <= 5; ++i) {
        double cov = i / 5.0;
        out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << fmt(py(cov)) << "\" x2=\""
            << kWidth - kMarginRight << "\" y2=\"" << fmt(py(cov))
            << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
        out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fmt(py(cov) + 4)
            << "\" text-anchor=\"end\" font-size=\"12\">" << fmt(cov) << "</text>\n";
    }
    for (int i = 0; i <= 6; ++i) {
        double t = t_max * i / 6.0;
        out << "<text x=\"" << fmt(px(t)) << "\" y=\"" << kHeight - kMarginBottom + 18
            << "\" text-anchor=\"middle\" font-size=\"12\">" << fmt(t) << "</text>\n";
    }
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kMarginTop << "\" x2=\"" << kMarginLeft
        << "\" y2=\"" << kHeight - kMarginBottom << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << kMarginLeft << "\" y1=\"" << kHeight - kMarginBottom << "\" x2=\""
        << kWidth - kMarginRight << "\" y2=\"" << kHeight - kMarginBottom
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << (kMarginLeft + kWidth - kMarginRight) / 2 << "\" y=\"" << kHeight - 12
        << "\" text-anchor=\"middle\" font-size=\"13\">time (s)</text>\n";
    out << "<text x=\"16\" y=\"" << (kMarginTop + kHeight - kMarginBottom) / 2
        << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
        << (kMarginTop + kHeight - kMarginBottom) / 2 << ")\">coverage</text>\n";
    out << "<text x=\"" << kWidth / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << "k = " << format_k(curves.front().k) << "</text>\n";

    // Shaded IQR bands first, then median lines on top.
    for (const auto& c : curves) {
        out << "<path fill=\"" << mode_color(c.mode) << "\" fill-opacity=\"0.18\" stroke=\"none\""
            << " d=\"M";
        for (std::size_t i = 0; i < c.time_s.size(); ++i)
            out << fmt(px(c.time_s[i])) << "," << fmt(py(c.q75[i])) << " ";
        for (std::size_t i = c.time_s.size(); i-- > 0;)
            out << fmt(px(c.time_s[i])) << "," << fmt(py(c.q25[i])) << " ";
        out << "Z\"/>\n";
    }
    for (const auto& c : curves) {
        out << "<polyline fill=\"none\" stroke=\"" << mode_color(c.mode)
            << "\" stroke-width=\"2\" data-mode=\"" << to_string(c.mode) << "\" points=\"";
        for (std::size_t i = 0; i < c.time_s.size(); ++i)
            out << fmt(px(c.time_s[i])) << "," << fmt(py(c.median[i])) << " ";
        out << "\"/>\n";
    }

    // Legend.
    int y = kMarginTop + 10;
    for (const auto& c : curves) {
        out << "<line x1=\"" << kMarginLeft + 12 << "\" y1=\"" << y << "\" x2=\""
            << kMarginLeft + 40 << "\" y2=\"" << y << "\" stroke=\"" << mode_color(c.mode)
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << kMarginLeft + 46 << "\" y=\"" << y + 4 << "\" font-size=\"12\">"
            << to_string(c.mode) << "</text>\n";
        y += 18;
    }
    out << "</svg>\n";
}

}  // namespace mcswarm
