#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cavitydrag {

// Raised for invalid parameters or violated preconditions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GasParams {
    double rho = 1.0;   // mass density
    double beta = 1.0;  // inverse temperature
    int dim = 3;

    void validate() const;
};

struct BodyGeometry {
    double radius = 1.0;   // base radius (d=3) or half width (d=2)
    double barrier = 0.0;  // length h of the lateral walls
    double force = 1.0;    // constant external force E
    double v0 = 0.0;       // initial velocity
    double mass = 1.0;

    void validate() const;
};

// Transverse vector. For d=2 only the first component is used and the
// second one stays zero under every operation below.
struct Perp {
    std::array<double, 2> c{0.0, 0.0};

    double dot(const Perp& o) const { return c[0] * o.c[0] + c[1] * o.c[1]; }
    double norm() const { return std::hypot(c[0], c[1]); }
    Perp operator+(const Perp& o) const { return {{c[0] + o.c[0], c[1] + o.c[1]}}; }
    Perp operator-(const Perp& o) const { return {{c[0] - o.c[0], c[1] - o.c[1]}}; }
    Perp operator*(double k) const { return {{c[0] * k, c[1] * k}}; }
};

struct ParticleState {
    double x = 0.0;
    Perp x_perp;
    double v_x = 0.0;
    Perp v_perp;
};

// Specular reflection on the moving base: v_x' = 2V - v_x.
ParticleState reflect_base(double body_velocity, const ParticleState& p);

// Specular reflection on the lateral surface |x_perp| = R. The particle has
// to sit on the surface within rel_tol*R.
ParticleState reflect_side(const ParticleState& p, double radius, double rel_tol = 1e-9);

// Normal reflection of v_perp about the direction of x_perp, no membership check.
Perp mirror_perp(const Perp& v_perp, const Perp& x_perp);

// Velocity increment of the body after one elastic hit, 2(m/M)(v_x - V).
double body_momentum_exchange(double body_velocity, double v_x, double mass_ratio = 1.0);

}  // namespace cavitydrag
