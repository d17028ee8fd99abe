#pragma once
// Regression constants computed with 50-digit arithmetic (mpmath quadrature
// of the fluctuation-dissipation integrals, cross-checked against the
// residue form). Rounded to 17 significant digits.

namespace golden {

struct Point {
  double omega0, gamma1, gamma2;
  double q2, pi2, energy;
};

// T = 0
inline constexpr Point kReference{1.0, 0.25, 0.5, 0.94199785210607904, 0.39804642651492919,
                                  0.33746669558477512};
inline constexpr Point kOverdamped{1.0, 0.1, 1.5, 2.1395719352487537, 0.28541045151595289,
                                   0.20916703711041976};
inline constexpr Point kScaled{2.0, 0.3, 0.7, 0.43115383250712636, 0.84388584430034516,
                               0.72584098596643321};

// theta = 1 at the reference point
inline constexpr double kThermalQ2 = 6.7488233860453431;
inline constexpr double kThermalPi2 = 1.0735682043119396;
inline constexpr double kThermalEnergy = 1.0699130411370176;

}  // namespace golden
