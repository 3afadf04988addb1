#pragma once

// Static SVG plots of result tables: one polyline per trace, traces
// rescaled to [0, 1] and stacked with a fixed vertical offset. Bottom axis
// in GHz, top axis in nm of wavelength offset. All numbers are printed with
// fixed precision, so identical tables give identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "qdcav/photonics.hpp"
#include "qdcav/results.hpp"

namespace qdcav {

struct PlotSpec {
    std::string x_column = "probe_offset_from_qd_GHz";
    std::string y_column = "height_raw";
    std::string trace_column;  // empty: all rows form one trace
    std::string title;
    std::string x_label = "probe - QD detuning (GHz)";
    std::string y_label = "normalized emission (offset)";
    std::string trace_label;   // legend prefix, e.g. "J1/2pi (GHz)"
    double lambda0_nm = 0.0;   // > 0 adds the top nm axis
    double trace_offset = 1.2;
};

namespace svg_detail {

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", std::abs(v) < 5e-4 ? 0.0 : v);
    return buf;
}

inline std::string label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
    return buf;
}

// Tick step from {1, 2, 5} x 10^k giving at most ~8 ticks.
inline double nice_step(double span) {
    if (!(span > 0.0)) return 1.0;
    const double raw = span / 8.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) return m * mag;
    return 10.0 * mag;
}

inline std::string escape(const std::string& s) {
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

}  // namespace svg_detail

inline std::string render_svg(const ResultTable& table, const PlotSpec& spec) {
    using namespace svg_detail;
    struct Trace {
        double key = 0.0;
        std::vector<double> x, y;
    };
    std::vector<Trace> traces;
    if (!table.rows.empty()) {
        const std::size_t xi = table.column_index(spec.x_column);
        const std::size_t yi = table.column_index(spec.y_column);
        const bool keyed = !spec.trace_column.empty();
        const std::size_t ki = keyed ? table.column_index(spec.trace_column) : 0;
        for (const auto& r : table.rows) {
            const double key = keyed ? r[ki] : 0.0;
            if (traces.empty() || traces.back().key != key) traces.push_back({key, {}, {}});
            traces.back().x.push_back(r[xi]);
            traces.back().y.push_back(r[yi]);
        }
    } else if (!table.columns.empty()) {
        table.column_index(spec.x_column);
        table.column_index(spec.y_column);
        if (!spec.trace_column.empty()) table.column_index(spec.trace_column);
    }

    const double W = 720, H = 540, ml = 70, mr = 150, mt = 70, mb = 60;
    const double pw = W - ml - mr, ph = H - mt - mb;
    double xmin = -1.0, xmax = 1.0;
    if (!traces.empty()) {
        xmin = traces.front().x.front();
        xmax = xmin;
        for (const auto& t : traces)
            for (double v : t.x) {
                xmin = std::min(xmin, v);
                xmax = std::max(xmax, v);
            }
        if (xmax == xmin) {
            xmin -= 1.0;
            xmax += 1.0;
        }
    }
    const double ymax = traces.empty() ? 1.0 : (static_cast<double>(traces.size()) - 1.0) * spec.trace_offset + 1.0;
    auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * pw; };
    auto sy = [&](double y) { return mt + ph - y / ymax * ph; };

    std::string s;
    s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(W) + "\" height=\"" + num(H) +
         "\" viewBox=\"0 0 " + num(W) + " " + num(H) + "\">\n";
    s += "<rect x=\"0\" y=\"0\" width=\"" + num(W) + "\" height=\"" + num(H) + "\" fill=\"white\"/>\n";
    s += "<g font-family=\"sans-serif\" font-size=\"12\" fill=\"black\">\n";
    if (!spec.title.empty())
        s += "<text x=\"" + num(W / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">" + escape(spec.title) +
             "</text>\n";
    s += "<rect x=\"" + num(ml) + "\" y=\"" + num(mt) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
         "\" fill=\"none\" stroke=\"black\"/>\n";

    // Bottom axis, GHz.
    const double step = nice_step(xmax - xmin);
    for (double t = std::ceil(xmin / step) * step; t <= xmax + 1e-9 * step; t += step) {
        const double px = sx(t);
        s += "<line x1=\"" + num(px) + "\" y1=\"" + num(mt + ph) + "\" x2=\"" + num(px) + "\" y2=\"" +
             num(mt + ph + 5) + "\" stroke=\"black\"/>\n";
        s += "<text x=\"" + num(px) + "\" y=\"" + num(mt + ph + 18) + "\" text-anchor=\"middle\">" + label(t) +
             "</text>\n";
    }
    s += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(H - 15) + "\" text-anchor=\"middle\">" +
         escape(spec.x_label) + "</text>\n";

    // Top axis, wavelength offset in nm (a positive frequency offset is a
    // negative wavelength offset).
    if (spec.lambda0_nm > 0.0) {
        const units::Meters l0 = units::nanometers(spec.lambda0_nm);
        auto to_nm = [&](double ghz_value) {
            return photonics::rate_to_wavelength_offset(units::RadPerSec(ghz(ghz_value)), l0).value() * -1e9;
        };
        const double a = to_nm(xmin), b = to_nm(xmax);
        const double lo = std::min(a, b), hi = std::max(a, b);
        const double nstep = nice_step(hi - lo);
        for (double t = std::ceil(lo / nstep) * nstep; t <= hi + 1e-9 * nstep; t += nstep) {
            // invert the linear map nm -> GHz
            const double g = xmin + (t - a) / (b - a) * (xmax - xmin);
            const double px = sx(g);
            s += "<line x1=\"" + num(px) + "\" y1=\"" + num(mt) + "\" x2=\"" + num(px) + "\" y2=\"" + num(mt - 5) +
                 "\" stroke=\"black\"/>\n";
            s += "<text x=\"" + num(px) + "\" y=\"" + num(mt - 9) + "\" text-anchor=\"middle\">" + label(t) +
                 "</text>\n";
        }
        s += "<text x=\"" + num(ml + pw / 2) + "\" y=\"" + num(mt - 28) +
             "\" text-anchor=\"middle\">probe - QD wavelength offset (nm)</text>\n";
    }
    s += "<text x=\"20\" y=\"" + num(mt + ph / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 20 " +
         num(mt + ph / 2) + ")\">" + escape(spec.y_label) + "</text>\n";
    s += "</g>\n";

    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    for (std::size_t k = 0; k < traces.size(); ++k) {
        const auto& t = traces[k];
        const auto [lo, hi] = std::minmax_element(t.y.begin(), t.y.end());
        const double span = *hi - *lo;
        const double base = static_cast<double>(k) * spec.trace_offset;
        std::string pts;
        for (std::size_t i = 0; i < t.x.size(); ++i) {
            const double v = span > 0.0 ? (t.y[i] - *lo) / span : 0.5;
            pts += (i ? " " : "") + num(sx(t.x[i])) + "," + num(sy(base + v));
        }
        const char* col = colors[k % (sizeof colors / sizeof *colors)];
        s += "<polyline fill=\"none\" stroke=\"" + std::string(col) + "\" stroke-width=\"1.5\" points=\"" + pts +
             "\"/>\n";
        if (!spec.trace_column.empty())
            s += "<text x=\"" + num(ml + pw + 8) + "\" y=\"" + num(sy(base + 0.5)) + "\" font-family=\"sans-serif\" "
                 "font-size=\"12\" fill=\"" + col + "\">" + escape(spec.trace_label) + " " + label(t.key) + "</text>\n";
    }
    s += "</svg>\n";
    return s;
}

}  // namespace qdcav
