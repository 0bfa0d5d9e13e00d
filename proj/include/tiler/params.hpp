#ifndef TILER_PARAMS_HPP
#define TILER_PARAMS_HPP

#include <cmath>
#include <string>

#include "errors.hpp"

namespace tiler {

// Desk-scale constants standing in for the asymptotic hierarchy
// eta <= beta <= xi <= gamma <= zeta <= delta <= c.
struct ParamPack {
    double eta = 0.0005;
    double beta = 0.001;
    double xi = 0.005;
    double gamma = 0.01;
    double zeta = 0.02;
    double delta = 0.1;
    double rho = 0.01;
    double c = 0.25;
    int t = 2;

    // working constants for the cluster pipeline
    double eps = 0.15; // regularity tolerance
    double mu = 0.2;   // minimum pair density
    int T = 3;         // balancing-collection threshold multiplier

    void validate() const {
        if (!(eta <= beta && beta <= xi && xi <= gamma && gamma <= zeta &&
              zeta <= delta && delta <= c && c <= 1.0))
            throw ValidationError("ParamPack: hierarchy eta<=beta<=xi<=gamma<=zeta<=delta<=c<=1 violated");
        if (t < 1) throw ValidationError("ParamPack: t >= 1 required");
        if (!(rho > 0 && rho < 1)) throw ValidationError("ParamPack: rho in (0,1)");
    }

    int max_classes() const { return int(std::ceil(1.0 / c)); }
};

} // namespace tiler

#endif
