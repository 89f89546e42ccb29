#pragma once

// RK4 step of the Bloch equations for L independent ions sharing one field.
//   dx = -D y - Wi z - x/T2
//   dy =  D x + Wr z - y/T2
//   dz =  Wi x - Wr y - (1 + z)/T1
// with D = d0 + sign·s(τ) in rad/µs. Field and shift are given at the step
// start, midpoint and end.

namespace slowshift::detail {

struct StepInputs {
  double s0, sh, s1;     // Stark shift (rad/µs) at τ, τ+dt/2, τ+dt
  double wr0, wi0;       // field at τ
  double wrh, wih;       // field at τ+dt/2
  double wr1, wi1;       // field at τ+dt
  double g1, g2;         // 1/T1, 1/T2
  double dt;
};

template <int L>
inline void rk4_lanes(double* __restrict x, double* __restrict y, double* __restrict z,
                      const double* __restrict d0, const double* __restrict sg, const StepInputs& in) {
  const double h2 = 0.5 * in.dt, h6 = in.dt / 6.0;
#pragma omp simd
  for (int j = 0; j < L; ++j) {
    const double X = x[j], Y = y[j], Z = z[j];
    const double Da = d0[j] + sg[j] * in.s0;
    const double Dh = d0[j] + sg[j] * in.sh;
    const double Db = d0[j] + sg[j] * in.s1;

    const double ax = -Da * Y - in.wi0 * Z - in.g2 * X;
    const double ay = Da * X + in.wr0 * Z - in.g2 * Y;
    const double az = in.wi0 * X - in.wr0 * Y - in.g1 * (1.0 + Z);

    double X2 = X + h2 * ax, Y2 = Y + h2 * ay, Z2 = Z + h2 * az;
    const double bx = -Dh * Y2 - in.wih * Z2 - in.g2 * X2;
    const double by = Dh * X2 + in.wrh * Z2 - in.g2 * Y2;
    const double bz = in.wih * X2 - in.wrh * Y2 - in.g1 * (1.0 + Z2);

    X2 = X + h2 * bx; Y2 = Y + h2 * by; Z2 = Z + h2 * bz;
    const double cx = -Dh * Y2 - in.wih * Z2 - in.g2 * X2;
    const double cy = Dh * X2 + in.wrh * Z2 - in.g2 * Y2;
    const double cz = in.wih * X2 - in.wrh * Y2 - in.g1 * (1.0 + Z2);

    X2 = X + in.dt * cx; Y2 = Y + in.dt * cy; Z2 = Z + in.dt * cz;
    const double ex = -Db * Y2 - in.wi1 * Z2 - in.g2 * X2;
    const double ey = Db * X2 + in.wr1 * Z2 - in.g2 * Y2;
    const double ez = in.wi1 * X2 - in.wr1 * Y2 - in.g1 * (1.0 + Z2);

    x[j] = X + h6 * (ax + 2.0 * (bx + cx) + ex);
    y[j] = Y + h6 * (ay + 2.0 * (by + cy) + ey);
    z[j] = Z + h6 * (az + 2.0 * (bz + cz) + ez);
  }
}

}  // namespace slowshift::detail
