#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace vlab {

// Growth profile Theta(p) for the generalized Yudovich norm sup_p ||w||_p / Theta(p),
// together with the cutoff constant c0 that caps the induced modulus.
//
//   constant : Theta(p) = A          (bounded vorticity)
//   powerlog : Theta(p) = (log p)^a  (slightly unbounded, still Osgood for a <= 1)
//   linear   : Theta(p) = p          (NOT Osgood; admitted only as a negative control)
struct ThetaProfile {
    enum class Kind { Constant, PowerLog, Linear };

    Kind kind = Kind::Constant;
    double amplitude = 1.0; // A, for Constant
    double alpha = 0.5;     // exponent, for PowerLog
    double c0 = 1000.0;

    double operator()(double p) const {
        switch (kind) {
            case Kind::Constant: return amplitude;
            case Kind::PowerLog: return std::pow(std::log(p), alpha);
            case Kind::Linear:   return p;
        }
        return amplitude;
    }

    // integral dp/(p Theta(p)) diverges <=> uniqueness-grade modulus
    bool osgood() const { return kind != Kind::Linear; }

    double log_c0() const { return std::log(c0); }

    std::string name() const {
        switch (kind) {
            case Kind::Constant: return "constant";
            case Kind::PowerLog: return "powerlog";
            case Kind::Linear:   return "linear";
        }
        return "?";
    }

    void validate() const {
        if (!(c0 > 1.0))
            throw std::invalid_argument("theta: c0 must be > 1");
        if (kind == Kind::Constant && !(amplitude > 0.0))
            throw std::invalid_argument("theta: constant amplitude must be positive");
        if (kind == Kind::PowerLog) {
            if (!(alpha >= 0.0))
                throw std::invalid_argument("theta: powerlog exponent must be >= 0");
            if (!(std::log(c0) > 1.0))
                throw std::invalid_argument("theta: powerlog needs log(c0) > 1");
        }
        // the capped modulus must sit above the cap point: mu(1/c0) > 1/c0
        if (!(std::log(c0) * (*this)(std::log(c0)) > 1.0))
            throw std::invalid_argument("theta: c0 too small, log(c0)*Theta(log(c0)) must exceed 1");
    }

    static ThetaProfile constant(double A = 1.0, double c0 = 1000.0) {
        ThetaProfile t; t.kind = Kind::Constant; t.amplitude = A; t.c0 = c0; t.validate(); return t;
    }
    static ThetaProfile powerlog(double a = 0.5, double c0 = 1000.0) {
        ThetaProfile t; t.kind = Kind::PowerLog; t.alpha = a; t.c0 = c0; t.validate(); return t;
    }
    static ThetaProfile linear(double c0 = 1000.0) {
        ThetaProfile t; t.kind = Kind::Linear; t.c0 = c0; t.validate(); return t;
    }
};

} // namespace vlab
