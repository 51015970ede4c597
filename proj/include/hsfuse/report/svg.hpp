#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hsfuse/core/errors.hpp"
#include "hsfuse/core/format.hpp"

namespace hsfuse {

// Tiny deterministic SVG line plots — enough for degradation curves with
// error bars and ROC curves, without pulling in a plotting dependency.

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> yerr; // empty = no error bars
};

struct PlotOptions {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    int width = 640;
    int height = 420;
    /// Fixed data bounds {xmin, xmax, ymin, ymax}; unset = auto from data.
    std::optional<std::array<double, 4>> bounds;
    /// Draw the y = x diagonal (chance line for ROC plots).
    bool diagonal = false;
};

namespace svgdetail {

inline const char* series_color(size_t i) {
    static constexpr const char* palette[] = {"#c0392b", "#27813c", "#2457b0",
                                              "#b8860b", "#7d3c98", "#148f87"};
    return palette[i % 6];
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        default: out += c;
        }
    }
    return out;
}

/// Largest "nice" step (1/2/5 x 10^k) giving at most `max_ticks` intervals.
inline double nice_step(double range, int max_ticks) {
    double raw = range / max_ticks;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) return m * mag;
    return 10.0 * mag;
}

inline std::string tick_label(double v) {
    double r = std::round(v);
    if (std::abs(v - r) < 1e-9 && std::abs(r) < 1e15) return format_double(r);
    return format_double(v);
}

} // namespace svgdetail

inline std::string render_line_plot(std::span<const PlotSeries> series, const PlotOptions& opt) {
    detail::require(!series.empty(), "render_line_plot: no series");
    for (const PlotSeries& s : series) {
        detail::require(s.x.size() == s.y.size() && !s.x.empty(),
                        "render_line_plot: series x/y size mismatch");
        detail::require(s.yerr.empty() || s.yerr.size() == s.y.size(),
                        "render_line_plot: error bar size mismatch");
    }

    double xmin, xmax, ymin, ymax;
    if (opt.bounds) {
        xmin = (*opt.bounds)[0];
        xmax = (*opt.bounds)[1];
        ymin = (*opt.bounds)[2];
        ymax = (*opt.bounds)[3];
    } else {
        xmin = ymin = std::numeric_limits<double>::infinity();
        xmax = ymax = -std::numeric_limits<double>::infinity();
        for (const PlotSeries& s : series)
            for (size_t i = 0; i < s.x.size(); ++i) {
                double e = s.yerr.empty() ? 0.0 : s.yerr[i];
                xmin = std::min(xmin, s.x[i]);
                xmax = std::max(xmax, s.x[i]);
                ymin = std::min(ymin, s.y[i] - e);
                ymax = std::max(ymax, s.y[i] + e);
            }
        if (xmax == xmin) xmax = xmin + 1.0;
        if (ymax == ymin) ymax = ymin + 1.0;
        double pad = 0.05 * (ymax - ymin);
        ymin -= pad;
        ymax += pad;
    }
    detail::require(xmax > xmin && ymax > ymin, "render_line_plot: degenerate bounds");

    const double ml = 62, mr = 16, mt = 34, mb = 46; // margins
    const double pw = opt.width - ml - mr, ph = opt.height - mt - mb;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double y) { return mt + (ymax - y) / (ymax - ymin) * ph; };
    auto fx = [](double v) { return format_fixed(v, 2); };

    std::string s;
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(opt.width) +
         "\" height=\"" + std::to_string(opt.height) + "\" viewBox=\"0 0 " +
         std::to_string(opt.width) + " " + std::to_string(opt.height) + "\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + fx(ml + pw / 2) + "\" y=\"20\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"14\">" +
         svgdetail::xml_escape(opt.title) + "</text>\n";

    // Axes, ticks, grid.
    s += "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
    double xstep = svgdetail::nice_step(xmax - xmin, 6);
    double ystep = svgdetail::nice_step(ymax - ymin, 6);
    for (double t = std::ceil(xmin / xstep) * xstep; t <= xmax + 1e-12 * xstep; t += xstep) {
        double X = px(t);
        s += "<line x1=\"" + fx(X) + "\" y1=\"" + fx(mt) + "\" x2=\"" + fx(X) + "\" y2=\"" +
             fx(mt + ph) + "\" stroke=\"#e3e3e3\"/>\n";
        s += "<text x=\"" + fx(X) + "\" y=\"" + fx(mt + ph + 16) +
             "\" text-anchor=\"middle\">" + svgdetail::tick_label(t) + "</text>\n";
    }
    for (double t = std::ceil(ymin / ystep) * ystep; t <= ymax + 1e-12 * ystep; t += ystep) {
        double Y = py(t);
        s += "<line x1=\"" + fx(ml) + "\" y1=\"" + fx(Y) + "\" x2=\"" + fx(ml + pw) +
             "\" y2=\"" + fx(Y) + "\" stroke=\"#e3e3e3\"/>\n";
        s += "<text x=\"" + fx(ml - 6) + "\" y=\"" + fx(Y + 4) + "\" text-anchor=\"end\">" +
             svgdetail::tick_label(t) + "</text>\n";
    }
    s += "<rect x=\"" + fx(ml) + "\" y=\"" + fx(mt) + "\" width=\"" + fx(pw) + "\" height=\"" +
         fx(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";
    s += "<text x=\"" + fx(ml + pw / 2) + "\" y=\"" + fx(static_cast<double>(opt.height) - 8) +
         "\" text-anchor=\"middle\">" + svgdetail::xml_escape(opt.xlabel) + "</text>\n";
    s += "<text x=\"14\" y=\"" + fx(mt + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
         fx(mt + ph / 2) + ")\">" + svgdetail::xml_escape(opt.ylabel) + "</text>\n";
    s += "</g>\n";

    if (opt.diagonal)
        s += "<line x1=\"" + fx(px(xmin)) + "\" y1=\"" + fx(py(xmin)) + "\" x2=\"" +
             fx(px(std::min(xmax, ymax))) + "\" y2=\"" + fx(py(std::min(xmax, ymax))) +
             "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";

    for (size_t si = 0; si < series.size(); ++si) {
        const PlotSeries& ser = series[si];
        const char* color = svgdetail::series_color(si);
        if (!ser.yerr.empty())
            for (size_t i = 0; i < ser.x.size(); ++i) {
                double X = px(ser.x[i]);
                double y0 = py(ser.y[i] - ser.yerr[i]), y1 = py(ser.y[i] + ser.yerr[i]);
                s += "<line x1=\"" + fx(X) + "\" y1=\"" + fx(y0) + "\" x2=\"" + fx(X) +
                     "\" y2=\"" + fx(y1) + "\" stroke=\"" + color + "\" stroke-width=\"1\"/>\n";
                for (double Y : {y0, y1})
                    s += "<line x1=\"" + fx(X - 3) + "\" y1=\"" + fx(Y) + "\" x2=\"" + fx(X + 3) +
                         "\" y2=\"" + fx(Y) + "\" stroke=\"" + color + "\" stroke-width=\"1\"/>\n";
            }
        std::string points;
        for (size_t i = 0; i < ser.x.size(); ++i)
            points += fx(px(ser.x[i])) + "," + fx(py(ser.y[i])) + " ";
        s += "<polyline points=\"" + points + "\" fill=\"none\" stroke=\"" + color +
             "\" stroke-width=\"1.5\"/>\n";
        for (size_t i = 0; i < ser.x.size(); ++i)
            s += "<circle cx=\"" + fx(px(ser.x[i])) + "\" cy=\"" + fx(py(ser.y[i])) +
                 "\" r=\"2.5\" fill=\"" + color + "\"/>\n";
        // Legend entry.
        double ly = mt + 14 + 16 * static_cast<double>(si);
        s += "<line x1=\"" + fx(ml + pw - 150) + "\" y1=\"" + fx(ly - 4) + "\" x2=\"" +
             fx(ml + pw - 130) + "\" y2=\"" + fx(ly - 4) + "\" stroke=\"" + color +
             "\" stroke-width=\"2\"/>\n";
        s += "<text x=\"" + fx(ml + pw - 124) + "\" y=\"" + fx(ly) +
             "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">" +
             svgdetail::xml_escape(ser.label) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

} // namespace hsfuse
