#pragma once

#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "rotator/equilibria.hpp"
#include "rotator/geometry.hpp"
#include "rotator/regions.hpp"

namespace rotator {

namespace svgcolor {

// equilibrium glyphs
inline constexpr const char* source = "#ff0000";
inline constexpr const char* sink = "#0000ff";
inline constexpr const char* saddle = "#008000";
inline constexpr const char* center = "#ff00ff";
// region fills
inline constexpr const char* dissipative = "#ffffff";
inline constexpr const char* rotationBlue = "#4477dd";
inline constexpr const char* rotationCyan = "#44ccee";
inline constexpr const char* librationYellow = "#ffdd44";
inline constexpr const char* librationOrange = "#ff8833";

} // namespace svgcolor

inline const char* regionColor(const RegionLabel& c) {
    switch (c.kind) {
    case RegionKind::dissipative: return svgcolor::dissipative;
    case RegionKind::rotation:
        return c.p <= c.q ? svgcolor::rotationBlue : svgcolor::rotationCyan;
    case RegionKind::libration:
        return c.orientation == Orientation::ccw ? svgcolor::librationYellow
                                                 : svgcolor::librationOrange;
    case RegionKind::undetermined: return "#bbbbbb";
    }
    return "#bbbbbb";
}

inline const char* glyphColor(EqClass cls) {
    switch (cls) {
    case EqClass::source: return svgcolor::source;
    case EqClass::sink: return svgcolor::sink;
    case EqClass::saddle: return svgcolor::saddle;
    case EqClass::center: return svgcolor::center;
    default: return "#000000";
    }
}

struct SvgPolyline {
    std::string color = "#000000";
    double strokeWidth = 1.0;
    std::vector<Vec2> points;
};

struct SvgGlyph {
    Vec2 pos;
    std::string color;
};

struct SvgRaster {
    int n = 0;                       // n x n cells over the data window
    std::vector<std::string> colors; // row-major: index = i * n + j
};

struct SvgScene {
    int width = 640, height = 640;
    double x0 = 0.0, x1 = kTwoPi, y0 = 0.0, y1 = kTwoPi; // data window
    SvgRaster raster;                                    // skipped when n == 0
    std::vector<SvgPolyline> separatrices;
    std::vector<SvgPolyline> curves;
    std::vector<SvgGlyph> glyphs;
    std::vector<std::pair<std::string, std::string>> legend; // label, color
};

namespace detail {

inline std::string px(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

} // namespace detail

/// Deterministic SVG 1.1 text for a scene: fixed-precision pixel coordinates,
/// layers in a fixed order, no timestamps.
inline std::string renderSvg(const SvgScene& sc) {
    auto X = [&](double x) { return (x - sc.x0) / (sc.x1 - sc.x0) * sc.width; };
    auto Y = [&](double y) { return sc.height - (y - sc.y0) / (sc.y1 - sc.y0) * sc.height; };

    std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                    "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
                    std::to_string(sc.width) + "\" height=\"" + std::to_string(sc.height) +
                    "\" viewBox=\"0 0 " + std::to_string(sc.width) + ' ' +
                    std::to_string(sc.height) + "\">\n";
    s += "<rect width=\"" + std::to_string(sc.width) + "\" height=\"" +
         std::to_string(sc.height) + "\" fill=\"#ffffff\"/>\n";

    if (sc.raster.n > 0) {
        const int n = sc.raster.n;
        const double cw = static_cast<double>(sc.width) / n;
        const double ch = static_cast<double>(sc.height) / n;
        s += "<g class=\"raster\" stroke=\"none\">\n";
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                // cell (i, j) covers [i, i+1) x [j, j+1) fractions of the window
                s += "<rect x=\"" + detail::px(i * cw) + "\" y=\"" +
                     detail::px(sc.height - (j + 1) * ch) + "\" width=\"" + detail::px(cw) +
                     "\" height=\"" + detail::px(ch) + "\" fill=\"" +
                     sc.raster.colors[static_cast<std::size_t>(i) * n + j] + "\"/>\n";
            }
        }
        s += "</g>\n";
    }

    auto emitLines = [&](const std::vector<SvgPolyline>& lines, const char* cls) {
        if (lines.empty()) return;
        s += std::string("<g class=\"") + cls + "\" fill=\"none\">\n";
        for (const auto& pl : lines) {
            if (pl.points.size() < 2) continue;
            s += "<polyline stroke=\"" + pl.color + "\" stroke-width=\"" +
                 detail::px(pl.strokeWidth) + "\" points=\"";
            for (std::size_t k = 0; k < pl.points.size(); ++k) {
                if (k) s += ' ';
                s += detail::px(X(pl.points[k].x)) + ',' + detail::px(Y(pl.points[k].y));
            }
            s += "\"/>\n";
        }
        s += "</g>\n";
    };
    emitLines(sc.separatrices, "separatrices");
    emitLines(sc.curves, "curves");

    if (!sc.glyphs.empty()) {
        s += "<g class=\"glyphs\" stroke=\"#000000\" stroke-width=\"0.50\">\n";
        for (const auto& g : sc.glyphs) {
            s += "<circle class=\"glyph\" cx=\"" + detail::px(X(g.pos.x)) + "\" cy=\"" +
                 detail::px(Y(g.pos.y)) + "\" r=\"4.00\" fill=\"" + g.color + "\"/>\n";
        }
        s += "</g>\n";
    }

    if (!sc.legend.empty()) {
        s += "<g class=\"legend\" font-family=\"monospace\" font-size=\"12\">\n";
        double y = 16.0;
        for (const auto& [label, color] : sc.legend) {
            s += "<rect x=\"8.00\" y=\"" + detail::px(y - 10.0) +
                 "\" width=\"12.00\" height=\"12.00\" fill=\"" + color +
                 "\" stroke=\"#000000\" stroke-width=\"0.50\"/>\n";
            s += "<text x=\"24.00\" y=\"" + detail::px(y) + "\">" + label + "</text>\n";
            y += 16.0;
        }
        s += "</g>\n";
    }
    s += "</svg>\n";
    return s;
}

inline SvgRaster rasterFromRegionMap(const RegionMap& map) {
    SvgRaster r;
    r.n = map.n;
    r.colors.reserve(map.cells.size());
    for (const auto& c : map.cells) r.colors.emplace_back(regionColor(c));
    return r;
}

inline void addEquilibriumGlyphs(SvgScene& sc, const std::vector<Equilibrium>& eqs) {
    for (const auto& e : eqs)
        sc.glyphs.push_back({{e.position.phi1, e.position.phi2}, glyphColor(e.cls)});
}

} // namespace rotator
