#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rotator/geometry.hpp"

namespace rotator {

struct HarmonicTerm {
    int harmonic = 1;      // k >= 1
    double cosCoeff = 0.0; // coefficient of cos(k*phi)
    double sinCoeff = 0.0; // coefficient of sin(k*phi)
};

/// A finite Fourier series c + sum_k (a_k cos(k phi) + b_k sin(k phi)).
/// Parity is decidable exactly from the coefficients, which is what the
/// reversibility predicates rely on.
class FourierSpec {
public:
    FourierSpec() = default;

    FourierSpec(double constant, std::vector<HarmonicTerm> terms)
        : constant_(constant), terms_(std::move(terms)) {
        for (const auto& t : terms_) {
            if (t.harmonic < 1)
                throw std::invalid_argument("FourierSpec: harmonic index must be >= 1");
        }
        std::sort(terms_.begin(), terms_.end(),
                  [](const HarmonicTerm& a, const HarmonicTerm& b) { return a.harmonic < b.harmonic; });
        for (std::size_t i = 1; i < terms_.size(); ++i) {
            if (terms_[i].harmonic == terms_[i - 1].harmonic)
                throw std::invalid_argument("FourierSpec: duplicate harmonic index");
        }
    }

    double constant() const { return constant_; }
    const std::vector<HarmonicTerm>& terms() const { return terms_; }

    double value(double phi) const {
        double s = constant_;
        for (const auto& t : terms_)
            s += t.cosCoeff * std::cos(t.harmonic * phi) + t.sinCoeff * std::sin(t.harmonic * phi);
        return s;
    }

    double deriv(double phi) const {
        double s = 0.0;
        for (const auto& t : terms_)
            s += t.harmonic * (-t.cosCoeff * std::sin(t.harmonic * phi) +
                               t.sinCoeff * std::cos(t.harmonic * phi));
        return s;
    }

    bool isEven() const {
        return std::all_of(terms_.begin(), terms_.end(),
                           [](const HarmonicTerm& t) { return t.sinCoeff == 0.0; });
    }

    bool isOdd() const {
        return constant_ == 0.0 &&
               std::all_of(terms_.begin(), terms_.end(),
                           [](const HarmonicTerm& t) { return t.cosCoeff == 0.0; });
    }

    FourierSpec negated() const {
        std::vector<HarmonicTerm> t = terms_;
        for (auto& h : t) {
            h.cosCoeff = -h.cosCoeff;
            h.sinCoeff = -h.sinCoeff;
        }
        return FourierSpec(-constant_, std::move(t));
    }

    bool operator==(const FourierSpec& o) const {
        if (constant_ != o.constant_ || terms_.size() != o.terms_.size()) return false;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (terms_[i].harmonic != o.terms_[i].harmonic ||
                terms_[i].cosCoeff != o.terms_[i].cosCoeff ||
                terms_[i].sinCoeff != o.terms_[i].sinCoeff)
                return false;
        }
        return true;
    }

private:
    double constant_ = 0.0;
    std::vector<HarmonicTerm> terms_;
};

} // namespace rotator
