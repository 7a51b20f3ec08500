#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "plot.hpp"

namespace ewalk::plot {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 170.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;
// Values below this are pinned to the bottom of a log axis.
constexpr double kLogFloor = 1e-16;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

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

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void settle() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-300) {
            lo -= 0.5;
            hi += 0.5;
        }
    }
};

std::vector<double> linear_ticks(double lo, double hi) {
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step)
        ticks.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return ticks;
}

}  // namespace

std::string render_svg(const Figure& fig) {
    Range xr, yr;
    for (const auto& s : fig.series) {
        for (double v : s.x) xr.add(v);
        for (double v : s.y) {
            if (fig.log_y) {
                if (v > 0.0) yr.add(std::log10(std::max(v, kLogFloor)));
            } else {
                yr.add(v);
            }
        }
    }
    xr.settle();
    if (fig.log_y) {
        if (!(yr.lo <= yr.hi)) {
            yr.lo = -1.0;
            yr.hi = 0.0;
        }
        yr.lo = std::floor(yr.lo);
        yr.hi = std::ceil(yr.hi);
        if (yr.hi <= yr.lo) yr.hi = yr.lo + 1.0;
    } else {
        yr.settle();
    }

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) {
        const double v = fig.log_y ? std::log10(std::max(y, std::pow(10.0, yr.lo))) : y;
        return kTop + (1.0 - (v - yr.lo) / (yr.hi - yr.lo)) * ph;
    };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
       << escape(fig.title) << "</text>\n";

    // grid and ticks
    if (fig.log_y) {
        const int first = static_cast<int>(yr.lo);
        const int last = static_cast<int>(yr.hi);
        const int stride = std::max(1, (last - first) / 8);
        for (int e = first; e <= last; e += stride) {
            const double y = py(std::pow(10.0, e));
            os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
               << num(y) << "\" stroke=\"#ddd\"/>\n";
            os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">1e" << e
               << "</text>\n";
        }
    } else {
        for (double v : linear_ticks(yr.lo, yr.hi)) {
            const double y = py(v);
            os << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(y) << "\" x2=\"" << num(kLeft + pw) << "\" y2=\""
               << num(y) << "\" stroke=\"#ddd\"/>\n";
            os << "<text x=\"" << num(kLeft - 6) << "\" y=\"" << num(y + 4) << "\" text-anchor=\"end\">"
               << tick_label(v) << "</text>\n";
        }
    }
    for (double v : linear_ticks(xr.lo, xr.hi)) {
        const double x = px(v);
        os << "<line x1=\"" << num(x) << "\" y1=\"" << num(kTop + ph) << "\" x2=\"" << num(x) << "\" y2=\""
           << num(kTop + ph + 5) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << num(x) << "\" y=\"" << num(kTop + ph + 18) << "\" text-anchor=\"middle\">"
           << tick_label(v) << "</text>\n";
    }
    os << "<rect x=\"" << num(kLeft) << "\" y=\"" << num(kTop) << "\" width=\"" << num(pw) << "\" height=\""
       << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 16) << "\" text-anchor=\"middle\">"
       << escape(fig.x_label) << "</text>\n";
    os << "<text transform=\"translate(18," << num(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << escape(fig.y_label) << "</text>\n";

    for (std::size_t i = 0; i < fig.series.size(); ++i) {
        const Series& s = fig.series[i];
        const char* color = kPalette[i % std::size(kPalette)];
        const std::size_t n = std::min(s.x.size(), s.y.size());
        // Thin long trajectories so the documents stay small.
        const std::size_t stride = std::max<std::size_t>(1, n / 1000);
        os << "<path fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" d=\"";
        bool pen = false;
        for (std::size_t k = 0; k < n; k += stride) {
            const bool last = k + stride >= n;
            const std::size_t j = last ? n - 1 : k;
            if (!std::isfinite(s.y[j]) || !std::isfinite(s.x[j])) {
                pen = false;
                continue;
            }
            os << (pen ? " L" : "M") << num(px(s.x[j])) << ',' << num(py(s.y[j]));
            pen = true;
            if (last) break;
        }
        os << "\"/>\n";
        if (fig.markers) {
            for (std::size_t j = 0; j < n; ++j) {
                if (!std::isfinite(s.y[j])) continue;
                os << "<circle cx=\"" << num(px(s.x[j])) << "\" cy=\"" << num(py(s.y[j])) << "\" r=\"3\" fill=\""
                   << color << "\"/>\n";
            }
        }
        const double ly = kTop + 10 + 18.0 * static_cast<double>(i);
        os << "<line x1=\"" << num(kLeft + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(kLeft + pw + 36)
           << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << num(kLeft + pw + 42) << "\" y=\"" << num(ly + 4) << "\">" << escape(s.label)
           << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

}  // namespace ewalk::plot
