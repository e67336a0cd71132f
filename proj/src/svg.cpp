#include "boundedsnr/svg.hpp"

#include "boundedsnr/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace snr::svg {

namespace {

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};
constexpr double kLeft = 70, kRight = 170, kTop = 40, kBottom = 55;

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

bool usable(double x, double y, bool log_x) {
    return std::isfinite(x) && std::isfinite(y) && (!log_x || x > 0.0);
}

}  // namespace

std::string render(const Chart& chart) {
    double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
    double y_lo = x_lo, y_hi = -x_lo;
    for (const auto& s : chart.series) {
        if (s.x.size() != s.y.size())
            throw ConfigurationError(fmt::format("series '{}' has {} x values and {} y values", s.name,
                                                 s.x.size(), s.y.size()));
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i], chart.log_x)) continue;
            const double x = chart.log_x ? std::log10(s.x[i]) : s.x[i];
            x_lo = std::min(x_lo, x);
            x_hi = std::max(x_hi, x);
            y_lo = std::min(y_lo, s.y[i]);
            y_hi = std::max(y_hi, s.y[i]);
        }
    }
    if (!(x_lo <= x_hi)) {
        x_lo = 0.0;
        x_hi = 1.0;
        y_lo = 0.0;
        y_hi = 1.0;
    }
    if (x_hi == x_lo) x_hi = x_lo + 1.0;
    if (y_hi == y_lo) {
        y_lo -= 0.5;
        y_hi += 0.5;
    }
    const double pad = 0.05 * (y_hi - y_lo);
    y_lo -= pad;
    y_hi += pad;

    const double w = chart.width, h = chart.height;
    const double pw = w - kLeft - kRight, ph = h - kTop - kBottom;
    auto px = [&](double x) {
        const double v = chart.log_x ? std::log10(x) : x;
        return kLeft + (v - x_lo) / (x_hi - x_lo) * pw;
    };
    auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * ph; };

    std::string out;
    out += fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\">\n",
        chart.width, chart.height, chart.width, chart.height);
    out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", chart.width, chart.height);
    out += fmt::format(
        "<text x=\"{:.1f}\" y=\"22\" font-family=\"sans-serif\" font-size=\"15\" "
        "text-anchor=\"middle\">{}</text>\n",
        kLeft + pw / 2, escape(chart.title));
    out += fmt::format(
        "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" "
        "stroke=\"black\"/>\n",
        kLeft, kTop, pw, ph);

    for (int i = 0; i <= 5; ++i) {
        const double f = i / 5.0;
        const double xv = x_lo + f * (x_hi - x_lo);
        const double xs = kLeft + f * pw;
        const double label = chart.log_x ? std::pow(10.0, xv) : xv;
        out += fmt::format(
            "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>\n",
            xs, kTop + ph, kTop + ph + 5);
        out += fmt::format(
            "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\" "
            "text-anchor=\"middle\">{:.3g}</text>\n",
            xs, kTop + ph + 18, label);
        const double yv = y_lo + f * (y_hi - y_lo);
        const double ys = kTop + (1.0 - f) * ph;
        out += fmt::format(
            "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"black\"/>\n",
            kLeft - 5, ys, kLeft, ys);
        out += fmt::format(
            "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"11\" "
            "text-anchor=\"end\">{:.3g}</text>\n",
            kLeft - 8, ys + 4, yv);
    }
    out += fmt::format(
        "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"13\" "
        "text-anchor=\"middle\">{}</text>\n",
        kLeft + pw / 2, h - 12, escape(chart.x_label));
    out += fmt::format(
        "<text x=\"16\" y=\"{0:.1f}\" font-family=\"sans-serif\" font-size=\"13\" "
        "text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.1f})\">{1}</text>\n",
        kTop + ph / 2, escape(chart.y_label));

    for (std::size_t k = 0; k < chart.series.size(); ++k) {
        const auto& s = chart.series[k];
        const char* colour = kPalette[k % kPalette.size()];
        std::string points;
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i], chart.log_x)) continue;
            if (!points.empty()) points += ' ';
            points += fmt::format("{:.2f},{:.2f}", px(s.x[i]), py(s.y[i]));
        }
        out += fmt::format(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\" points=\"{}\"/>\n", colour,
            points);
        const double ly = kTop + 14 + 18 * static_cast<double>(k);
        const double lx = kLeft + pw + 12;
        out += fmt::format(
            "<line x1=\"{:.1f}\" y1=\"{:.1f}\" x2=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"{}\" "
            "stroke-width=\"2\"/>\n",
            lx, ly, lx + 22, ly, colour);
        out += fmt::format(
            "<text x=\"{:.1f}\" y=\"{:.1f}\" font-family=\"sans-serif\" font-size=\"12\">{}</text>\n",
            lx + 28, ly + 4, escape(s.name));
    }
    out += "</svg>\n";
    return out;
}

}  // namespace snr::svg
