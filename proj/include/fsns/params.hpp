#pragma once

#include "fsns/common.hpp"

namespace fsns {

enum class BottomBC {
    NoPenetrationSlip,  // v3 = 0; d_z v_y = 0 when viscous
    AnchoredDirichlet,  // v pinned to a reference (MMS mode)
};

struct PhysParams {
    double gamma = 1.4;  // adiabatic exponent, > 1
    double mu = 1.0;     // shear viscosity shape constant, > 0
    double lambda = 0.0; // bulk shape constant, 2 mu + 3 lambda > 0
    double eps = 1e-2;   // inverse Reynolds number in [0, 1]
    double sigma = 0.0;  // surface tension in [0, 1]
    double p_e = 1.0;    // external pressure, > 0
    BottomBC bottom_bc = BottomBC::NoPenetrationSlip;
    double c0_health = 0.1;  // J >= c0 and Taylor-sign threshold
    double C0_health = 4.0;  // density band [1/(4 C0), 4 C0]

    bool viscous() const { return eps > 0.0; }

    void validate() const {
        std::string bad;
        if (!(gamma > 1.0)) bad += "physics.gamma must be > 1; ";
        if (!(mu > 0.0)) bad += "physics.mu must be > 0; ";
        if (!(2.0 * mu + 3.0 * lambda > 0.0)) bad += "physics requires 2*mu + 3*lambda > 0; ";
        if (!(eps >= 0.0 && eps <= 1.0)) bad += "physics.eps must lie in [0, 1]; ";
        if (!(sigma >= 0.0 && sigma <= 1.0)) bad += "physics.sigma must lie in [0, 1]; ";
        if (!(p_e > 0.0)) bad += "physics.p_e must be > 0; ";
        if (!(c0_health > 0.0)) bad += "physics.c0_health must be > 0; ";
        if (!(C0_health >= 1.0)) bad += "physics.C0_health must be >= 1; ";
        if (!bad.empty()) throw ConfigError(bad);
    }

    double rho_min() const { return 1.0 / (4.0 * C0_health); }
    double rho_max() const { return 4.0 * C0_health; }
};

struct StepperConfig {
    double cfl = 0.4;      // Courant factor in (0, 1]
    double dt_max = 1e-2;  // hard time-step cap
    double t_end = 1.0;
    double output_every = 0.05;

    void validate() const {
        std::string bad;
        if (!(cfl > 0.0 && cfl <= 1.0)) bad += "stepper.cfl must lie in (0, 1]; ";
        if (!(dt_max > 0.0)) bad += "stepper.dt_max must be > 0; ";
        if (!(t_end >= 0.0)) bad += "stepper.t_end must be >= 0; ";
        if (!(output_every > 0.0)) bad += "stepper.output_every must be > 0; ";
        if (!bad.empty()) throw ConfigError(bad);
    }
};

}  // namespace fsns
