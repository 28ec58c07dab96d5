#pragma once

#include <stdexcept>
#include <string>

namespace vlab {

enum class DomainKind { Plane, Torus, Disk };

// Flow domain.  Disk radius is fixed at 1 (rescale externally); torus cell is
// [0, period)^2.  torus_image_truncation is the window radius of the slow
// image-sum reference evaluation; torus_spectral_grid the resolution of the
// precomputed kernel table.
struct Domain {
    DomainKind kind = DomainKind::Plane;
    double period = 1.0;
    int torus_image_truncation = 8;
    int torus_spectral_grid = 512;

    static Domain plane() { return {DomainKind::Plane}; }
    static Domain torus(double period = 1.0) {
        Domain d;
        d.kind = DomainKind::Torus;
        d.period = period;
        return d;
    }
    static Domain disk() { return {DomainKind::Disk}; }

    const char* name() const {
        switch (kind) {
        case DomainKind::Plane: return "plane";
        case DomainKind::Torus: return "torus";
        default: return "disk";
        }
    }

    void validate() const {
        if (kind == DomainKind::Torus) {
            if (!(period > 0.0)) throw std::invalid_argument("torus period must be positive");
            if (torus_image_truncation < 1)
                throw std::invalid_argument("torus_image_truncation must be >= 1");
            const int g = torus_spectral_grid;
            if (g < 64 || (g & (g - 1)) != 0)
                throw std::invalid_argument("torus_spectral_grid must be a power of two >= 64");
        }
    }
};

inline Domain domain_from_name(const std::string& s) {
    if (s == "plane") return Domain::plane();
    if (s == "torus") return Domain::torus();
    if (s == "disk") return Domain::disk();
    throw std::invalid_argument("unknown domain '" + s + "' (expected plane|torus|disk)");
}

} // namespace vlab
