#include <catch2/catch_amalgamated.hpp>

#include "rotator/equilibria.hpp"
#include "rotator/system.hpp"

using namespace rotator;

namespace {

// 1-D oracle for the synchrony diagonal: roots of omega + a cos(phi), where
// the anti-reciprocal coupling vanishes identically.
std::vector<TorusPoint> diagonalRoots(double omega, double a) {
    std::vector<TorusPoint> out;
    if (std::fabs(omega) <= std::fabs(a)) {
        double c = std::acos(-omega / a);
        out.push_back({c, c});
        if (c > 1e-12) out.push_back({kTwoPi - c, kTwoPi - c});
    }
    return out;
}

// roots of the derivative of the Fix R profile, by scan + bisection
std::vector<double> profileDerivRoots(const RotatorSystem& sys, int scanN = 1440) {
    std::vector<double> roots;
    double prevPhi = 0.0, prevVal = fixRProfileDeriv(sys, 0.0);
    for (int i = 1; i <= scanN; ++i) {
        double phi = i * kTwoPi / scanN;
        double val = fixRProfileDeriv(sys, phi);
        if ((prevVal < 0.0 && val >= 0.0) || (prevVal > 0.0 && val <= 0.0)) {
            double lo = prevPhi, hi = phi, flo = prevVal;
            for (int it = 0; it < 80; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = fixRProfileDeriv(sys, mid);
                if ((fm < 0.0) == (flo < 0.0)) { lo = mid; flo = fm; } else { hi = mid; }
            }
            roots.push_back(0.5 * (lo + hi));
        }
        prevPhi = phi;
        prevVal = val;
    }
    return roots;
}

// the profile value at its critical point closest to a double root
double profileAtFold(const RotatorSystem& sys) {
    double best = std::numeric_limits<double>::infinity();
    for (double phi : profileDerivRoots(sys))
        best = std::min(best, std::fabs(fixRProfile(sys, phi)));
    return best;
}

} // namespace

TEST_CASE("equilibrium census in the excitable weak-coupling regime") {
    auto sys = presets::caseI(0.5, 1.0, 0.2);
    auto eqs = findEquilibria(sys);
    REQUIRE(eqs.size() == 4);

    // oracle: union of two 1-D root sets (diagonal and Fix R profiles)
    std::vector<TorusPoint> expected = diagonalRoots(0.5, 1.0);
    for (double phi : fixRRoots(sys)) expected.push_back({phi, wrap2pi(-phi)});
    REQUIRE(expected.size() == 4);
    for (const auto& e : eqs) {
        double best = 1e9;
        for (const auto& x : expected) best = std::min(best, torusDist(e.position, x));
        CHECK(best < 1e-6);
    }

    int sinks = 0, sources = 0, saddles = 0;
    for (const auto& e : eqs) {
        CHECK(sys.rhs(e.position).maxAbs() < 1e-10);
        if (e.cls == EqClass::sink) {
            ++sinks;
            CHECK(torusDist(e.position, {2.0 * kPi / 3.0, 2.0 * kPi / 3.0}) < 1e-10);
            CHECK(e.memberships.inSynchrony);
        } else if (e.cls == EqClass::source) {
            ++sources;
            CHECK(torusDist(e.position, {4.0 * kPi / 3.0, 4.0 * kPi / 3.0}) < 1e-10);
        } else if (e.cls == EqClass::saddle) {
            ++saddles;
            CHECK(e.memberships.inFixR);
            CHECK(std::fabs(e.jacobian.trace()) < 1e-8);
        }
    }
    CHECK(sinks == 1);
    CHECK(sources == 1);
    CHECK(saddles == 2);
}

TEST_CASE("no equilibria in the fast oscillatory regime") {
    // phi1' + phi2' = 2 omega + a (cos phi1 + cos phi2) > 0 for omega > a
    auto eqs = findEquilibria(presets::caseI(2.0, 1.0, 0.1));
    CHECK(eqs.empty());
}

TEST_CASE("synchronous pair does not move with the coupling strength") {
    TorusPoint sinkRef, sourceRef;
    bool first = true;
    for (double kappa : {0.05, 0.2, 0.5}) {
        auto eqs = findEquilibria(presets::caseI(0.5, 1.0, kappa));
        const Equilibrium *sink = nullptr, *source = nullptr;
        for (const auto& e : eqs) {
            if (e.cls == EqClass::sink) sink = &e;
            if (e.cls == EqClass::source) source = &e;
        }
        REQUIRE(sink != nullptr);
        REQUIRE(source != nullptr);
        if (first) {
            sinkRef = sink->position;
            sourceRef = source->position;
            first = false;
        } else {
            CHECK(torusDist(sink->position, sinkRef) < 1e-10);
            CHECK(torusDist(source->position, sourceRef) < 1e-10);
        }
    }
}

TEST_CASE("higher harmonics stay within the 4 n^2 census bound") {
    auto sys = presets::higherHarmonic(0.0, 1.0, 2, 4.0, 0.0, 2);
    auto eqs = findEquilibria(sys, 48);
    CHECK(eqs.size() >= 4);
    CHECK(eqs.size() <= 16);
    for (const auto& e : eqs) CHECK(sys.rhs(e.position).maxAbs() < 1e-10);
}

TEST_CASE("first-harmonic census bounds over a parameter sample") {
    for (int iw = 0; iw < 5; ++iw) {
        for (int ik = 0; ik < 5; ++ik) {
            double omega = 0.1 + 0.45 * iw;
            double kappa = -2.0 + 1.0 * ik;
            for (auto sys : {presets::caseI(omega, 1.0, kappa), presets::caseII(omega, 1.0, kappa)}) {
                auto eqs = findEquilibria(sys);
                CHECK(eqs.size() <= 6);
                int fixR = 0;
                for (const auto& e : eqs) fixR += e.memberships.inFixR;
                CHECK(fixR <= 4);
            }
        }
    }
}

TEST_CASE("classification policy") {
    SECTION("centers only with the reversible certificate") {
        auto sys = presets::caseI(1.5, 1.0, 2.5);
        auto eqs = findEquilibria(sys);
        const Equilibrium* center = nullptr;
        for (const auto& e : eqs)
            if (e.cls == EqClass::center) { center = &e; break; }
        REQUIRE(center != nullptr);
        CHECK(center->memberships.inFixR);
        auto demoted = classifyEquilibrium(sys, center->position, false);
        CHECK(demoted.cls == EqClass::undeterminedFocus);
    }
    SECTION("nilpotent degeneracy at the SNIC corner") {
        auto sys = presets::caseI(1.0, 1.0, 0.5);
        auto eq = classifyEquilibrium(sys, {kPi, kPi}, true);
        CHECK(eq.cls == EqClass::degenerate);
        CHECK(eq.degenerateKind == DegenerateKind::nilpotentDoubleZero);
    }
    SECTION("non-equilibrium rejected") {
        CHECK_THROWS_AS(classifyEquilibrium(presets::caseI(1.0, 1.0, 0.5), {0.3, 0.9}, true),
                        std::invalid_argument);
    }
}

TEST_CASE("membership predicates") {
    auto m1 = membership({1.0, kTwoPi - 1.0});
    CHECK(m1.inFixR);
    CHECK_FALSE(m1.inSynchrony);
    auto m2 = membership({2.5, 2.5});
    CHECK(m2.inSynchrony);
    CHECK_FALSE(m2.inFixR);
    auto m3 = membership({1.5 + kPi, 1.5});
    CHECK(m3.inFixR2);
}

TEST_CASE("closed-form loci") {
    SECTION("anti-reciprocal fold pair at kappa = 1") {
        auto res = analyticLocus(LocusId::caseISaddleCenter, 1.0);
        REQUIRE(res.values.size() == 4);
        std::vector<double> pos;
        for (double w : res.values)
            if (w > 0.0) pos.push_back(w);
        REQUIRE(pos.size() == 2);
        CHECK(pos[0] == Catch::Approx(0.3690).margin(5e-4));
        CHECK(pos[1] == Catch::Approx(1.7602).margin(5e-4));
    }
    SECTION("inner branch domain edge") {
        // below |kappa| = 1/2 only the outer fold pair survives
        auto narrow = analyticLocus(LocusId::caseISaddleCenter, 0.4);
        CHECK(narrow.values.size() == 2);
        CHECK_FALSE(narrow.note.empty());
        CHECK(analyticLocus(LocusId::caseISaddleCenter, 0.51).values.size() == 4);
        CHECK(analyticLocus(LocusId::caseISaddleCenter, 0.0).values.empty());
    }
    SECTION("reciprocal fold spot value") {
        auto res = analyticLocus(LocusId::caseIISaddleCenter, 0.5);
        REQUIRE(res.values.size() == 1);
        CHECK(res.values[0] == Catch::Approx(-0.75).margin(1e-14));
        CHECK(analyticLocus(LocusId::caseIISaddleCenter, 0.2).values.empty());
    }
    SECTION("reciprocal sink/source lines") {
        auto res = analyticLocus(LocusId::caseIISinkSource, 0.3);
        REQUIRE(res.values.size() == 2);
        CHECK(res.values[0] == Catch::Approx(-0.7));
        CHECK(res.values[1] == Catch::Approx(1.3));
    }
    SECTION("pitchfork at omega = +-a") {
        auto res = analyticLocus(LocusId::caseIPitchfork, 1.7, 2.0);
        CHECK(res.values[0] == Catch::Approx(-2.0));
        CHECK(res.values[1] == Catch::Approx(2.0));
    }
    SECTION("general-a values follow the rescaling") {
        auto base = analyticLocus(LocusId::caseISaddleCenter, 1.0, 1.0);
        auto scaled = analyticLocus(LocusId::caseISaddleCenter, 2.0, 2.0);
        REQUIRE(base.values.size() == scaled.values.size());
        for (std::size_t i = 0; i < base.values.size(); ++i)
            CHECK(scaled.values[i] == Catch::Approx(2.0 * base.values[i]).margin(1e-12));
    }
}

TEST_CASE("locus points carry a degenerate Fix R equilibrium") {
    struct Case {
        LocusId id;
        double kappa;
        bool caseI;
    };
    for (const auto& c : {Case{LocusId::caseISaddleCenter, 0.8, true},
                          Case{LocusId::caseISaddleCenter, 1.5, true},
                          Case{LocusId::caseIISaddleCenter, 0.5, false}}) {
        auto res = analyticLocus(c.id, c.kappa);
        REQUIRE_FALSE(res.values.empty());
        double omega = res.values.back(); // largest ordinate on the locus
        auto make = [&](double w) {
            return c.caseI ? presets::caseI(w, 1.0, c.kappa) : presets::caseII(w, 1.0, c.kappa);
        };
        auto sys = make(omega);

        // double root of the Fix R profile: h and h' vanish together
        CHECK(profileAtFold(sys) < 1e-9);
        double foldPhi = 0.0;
        double best = 1e9;
        for (double phi : profileDerivRoots(sys)) {
            double v = std::fabs(fixRProfile(sys, phi));
            if (v < best) { best = v; foldPhi = phi; }
        }
        Mat2 J = sys.jacobian(foldPhi, -foldPhi);
        CHECK(std::fabs(J.trace()) < 1e-6);
        CHECK(std::fabs(J.det()) < 1e-6);

        // crossing the locus changes the number of Fix R equilibria by 2 per
        // fold; the reciprocal profile is even in phi, so its folds arrive as
        // a symmetric pair and the count jumps by 4
        auto below = fixRRoots(make(omega - 1e-3));
        auto above = fixRRoots(make(omega + 1e-3));
        int jump = std::abs(static_cast<int>(below.size()) - static_cast<int>(above.size()));
        CHECK(jump == (c.caseI ? 2 : 4));
    }
}

TEST_CASE("newton solver input validation") {
    CHECK_THROWS_AS(findEquilibria(presets::caseI(1, 1, 1), 4), std::invalid_argument);
}
