#pragma once

// Static SVG rendering of a segment and its reconstructed sub-bands, one
// stacked panel per trace.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

namespace seizure {

struct PlotTrace {
    std::string title;
    std::vector<double> samples;
};

struct PlotLayout {
    double width = 1000.0;
    double panel_height = 120.0;
    double margin_left = 90.0;
    double margin_right = 20.0;
    double gap = 18.0;
};

inline std::string svg_escape(const std::string& s) {
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

inline std::string render_panels_svg(const std::string& title, std::span<const PlotTrace> traces, double fs,
                                     const PlotLayout& layout = {}) {
    const double top = 40.0;
    const double height = top + static_cast<double>(traces.size()) * (layout.panel_height + layout.gap) + 30.0;
    const double plot_w = layout.width - layout.margin_left - layout.margin_right;
    char buf[512];
    std::string svg;
    std::snprintf(buf, sizeof buf,
                  "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n"
                  "<rect width=\"100%%\" height=\"100%%\" fill=\"white\"/>\n"
                  "<text x=\"%.1f\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\">%s</text>\n",
                  layout.width, height, layout.width, height, layout.margin_left, svg_escape(title).c_str());
    svg += buf;

    for (std::size_t p = 0; p < traces.size(); ++p) {
        const auto& tr = traces[p];
        const double y0 = top + static_cast<double>(p) * (layout.panel_height + layout.gap);
        double lo = 0.0, hi = 0.0;
        if (!tr.samples.empty()) {
            const auto [mn, mx] = std::minmax_element(tr.samples.begin(), tr.samples.end());
            lo = *mn;
            hi = *mx;
        }
        if (hi - lo <= 0.0) {
            lo -= 1.0;
            hi += 1.0;
        }
        std::snprintf(buf, sizeof buf,
                      "<g class=\"panel\" id=\"panel-%zu\">\n"
                      "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" stroke=\"#999\"/>\n"
                      "<text x=\"8\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"13\">%s</text>\n"
                      "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">%.4g</text>\n"
                      "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">%.4g</text>\n",
                      p, layout.margin_left, y0, plot_w, layout.panel_height, y0 + layout.panel_height / 2.0,
                      svg_escape(tr.title).c_str(), layout.margin_left - 4.0, y0 + 10.0, hi, layout.margin_left - 4.0,
                      y0 + layout.panel_height, lo);
        svg += buf;
        svg += "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"0.7\" points=\"";
        const double n = static_cast<double>(std::max<std::size_t>(tr.samples.size(), 2) - 1);
        for (std::size_t i = 0; i < tr.samples.size(); ++i) {
            const double x = layout.margin_left + plot_w * static_cast<double>(i) / n;
            const double y = y0 + layout.panel_height * (1.0 - (tr.samples[i] - lo) / (hi - lo));
            std::snprintf(buf, sizeof buf, "%.2f,%.2f ", x, y);
            svg += buf;
        }
        svg += "\"/>\n</g>\n";
    }

    const double axis_y = height - 12.0;
    const double duration = traces.empty() || fs <= 0.0 ? 0.0 : static_cast<double>(traces[0].samples.size()) / fs;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\">0 s</text>\n"
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">%.2f s</text>\n"
                  "</svg>\n",
                  layout.margin_left, axis_y, layout.width - layout.margin_right, axis_y, duration);
    svg += buf;
    return svg;
}

}  // namespace seizure
