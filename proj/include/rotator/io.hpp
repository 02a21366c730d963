#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rotator/bifurcation.hpp"
#include "rotator/equilibria.hpp"
#include "rotator/integrate.hpp"
#include "rotator/orbits.hpp"
#include "rotator/regions.hpp"

namespace rotator {

namespace detail {

/// Shortest round-tripping decimal form, locale-independent.
inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    double back = std::strtod(buf, nullptr);
    if (back == v || v != v) return buf;
    std::snprintf(buf, sizeof buf, "%.17e", v);
    return buf;
}

} // namespace detail

inline std::string trajectoryCsv(const Trajectory& tr) {
    std::string s = "t,phi1_lift,phi2_lift,phi1_mod,phi2_mod\n";
    for (const auto& smp : tr.samples) {
        s += detail::num(smp.t) + ',' + detail::num(smp.state.x1) + ',' +
             detail::num(smp.state.x2) + ',' + detail::num(wrap2pi(smp.state.x1)) + ',' +
             detail::num(wrap2pi(smp.state.x2)) + '\n';
    }
    return s;
}

inline std::string equilibriaCsv(const std::vector<Equilibrium>& eqs) {
    std::string s = "phi1,phi2,re_ev1,im_ev1,re_ev2,im_ev2,class,inFixR,inFixR2,inSync\n";
    for (const auto& e : eqs) {
        s += detail::num(e.position.phi1) + ',' + detail::num(e.position.phi2) + ',' +
             detail::num(e.ev1.real()) + ',' + detail::num(e.ev1.imag()) + ',' +
             detail::num(e.ev2.real()) + ',' + detail::num(e.ev2.imag()) + ',' +
             eqClassName(e.cls) + ',' + (e.memberships.inFixR ? '1' : '0') + ',' +
             (e.memberships.inFixR2 ? '1' : '0') + ',' +
             (e.memberships.inSynchrony ? '1' : '0') + '\n';
    }
    return s;
}

inline std::string regionMapCsv(const RegionMap& map) {
    std::string s = "i,j,phi1,phi2,label,p,q,closure_dist\n";
    for (int i = 0; i < map.n; ++i) {
        for (int j = 0; j < map.n; ++j) {
            const RegionLabel& c = map.cell(i, j);
            TorusPoint ctr = map.cellCenter(i, j);
            s += std::to_string(i) + ',' + std::to_string(j) + ',' + detail::num(ctr.phi1) +
                 ',' + detail::num(ctr.phi2) + ',' + regionKindName(c.kind) + ',' +
                 std::to_string(c.p) + ',' + std::to_string(c.q) + ',' +
                 detail::num(c.closureDist) + '\n';
        }
    }
    return s;
}

inline std::string scanCsv(const std::vector<ScanPoint>& pts) {
    std::string s = "eps,max_isi,p,q,period,floquet,converged\n";
    for (const auto& pt : pts) {
        s += detail::num(pt.eps) + ',' + detail::num(pt.maxIsi) + ',' + std::to_string(pt.p) +
             ',' + std::to_string(pt.q) + ',' + detail::num(pt.period) + ',' +
             detail::num(pt.floquet) + ',' + (pt.converged ? '1' : '0') + '\n';
    }
    return s;
}

inline nlohmann::json diagramJson(const std::vector<BifCurve>& curves) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& c : curves) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : c.points) pts.push_back({p[0], p[1]});
        arr.push_back({{"kind", curveKindName(c.kind)}, {"plane", planeName(c.plane)},
                       {"points", std::move(pts)}});
    }
    return arr;
}

inline void writeFile(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw std::runtime_error("write failed: " + path);
}

} // namespace rotator
