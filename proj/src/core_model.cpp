#include "cavitydrag/core_model.hpp"

namespace cavitydrag {

void GasParams::validate() const {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw Error("gas density must be positive");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw Error("inverse temperature must be positive");
    if (dim != 2 && dim != 3) throw Error("dimension must be 2 or 3");
}

void BodyGeometry::validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw Error("radius must be positive");
    if (!(barrier >= 0.0) || !std::isfinite(barrier)) throw Error("barrier length must be >= 0");
    if (!(force > 0.0) || !std::isfinite(force)) throw Error("external force must be positive");
    if (!(v0 >= 0.0) || !std::isfinite(v0)) throw Error("initial velocity must be >= 0");
    if (mass != 1.0) throw Error("body mass is fixed to 1");
}

ParticleState reflect_base(double body_velocity, const ParticleState& p) {
    ParticleState out = p;
    out.v_x = 2.0 * body_velocity - p.v_x;
    return out;
}

Perp mirror_perp(const Perp& v_perp, const Perp& x_perp) {
    const double n = x_perp.norm();
    if (!(n > 0.0)) throw Error("side normal undefined at x_perp = 0");
    const Perp e = x_perp * (1.0 / n);
    return v_perp - e * (2.0 * v_perp.dot(e));
}

ParticleState reflect_side(const ParticleState& p, double radius, double rel_tol) {
    const double n = p.x_perp.norm();
    if (!(n > 0.0)) throw Error("side normal undefined at x_perp = 0");
    if (std::abs(n - radius) > rel_tol * radius)
        throw Error("particle is not on the side surface");
    ParticleState out = p;
    out.v_perp = mirror_perp(p.v_perp, p.x_perp);
    return out;
}

double body_momentum_exchange(double body_velocity, double v_x, double mass_ratio) {
    return 2.0 * mass_ratio * (v_x - body_velocity);
}

}  // namespace cavitydrag
