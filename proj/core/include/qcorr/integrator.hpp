// integrator.hpp - classical fixed-step RK4 for matrix-valued ODEs

#pragma once

#include <cmath>
#include <stdexcept>

namespace qcorr {

// Number of equal steps of size <= dt covering [0, t_final].
inline long long integration_steps(double t_final, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("integration_steps: dt must be > 0");
    if (t_final <= 0.0) return 0;
    return static_cast<long long>(std::ceil(t_final / dt - 1e-9));
}

template <class State>
struct Rk4Workspace {
    State k1, k2, k3, k4, tmp;
};

// y <- y + h/6 (k1 + 2 k2 + 2 k3 + k4) for dy/dt = f(y).
template <class State, class Rhs>
void rk4_step(State& y, double h, Rhs&& f, Rk4Workspace<State>& ws) {
    ws.k1 = f(y);
    ws.tmp = y + (0.5 * h) * ws.k1;
    ws.k2 = f(ws.tmp);
    ws.tmp = y + (0.5 * h) * ws.k2;
    ws.k3 = f(ws.tmp);
    ws.tmp = y + h * ws.k3;
    ws.k4 = f(ws.tmp);
    y += (h / 6.0) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);
}

} // namespace qcorr
