#include "ocw/angular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "ocw/error.hpp"

namespace ocw::angular {
namespace {

constexpr int kMaxFactorial = 64;

const std::array<double, kMaxFactorial + 1>& factorials() {
  static const auto table = [] {
    std::array<double, kMaxFactorial + 1> t{};
    t[0] = 1.0;
    for (int i = 1; i <= kMaxFactorial; ++i) t[i] = t[i - 1] * i;
    return t;
  }();
  return table;
}

// n given doubled; must be even and non-negative.
double fact2(int two_n) { return factorials().at(static_cast<std::size_t>(two_n / 2)); }

bool triangle_ok(int ta, int tb, int tc) {
  return tc >= std::abs(ta - tb) && tc <= ta + tb && ((ta + tb + tc) % 2 == 0);
}

double triangle_coeff(int ta, int tb, int tc) {
  return fact2(ta + tb - tc) * fact2(ta - tb + tc) * fact2(-ta + tb + tc) /
         fact2(ta + tb + tc + 2);
}

double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

}  // namespace

double wigner_3j(int tj1, int tj2, int tj3, int tm1, int tm2, int tm3) {
  if (tm1 + tm2 + tm3 != 0) return 0.0;
  if (!triangle_ok(tj1, tj2, tj3)) return 0.0;
  if (std::abs(tm1) > tj1 || std::abs(tm2) > tj2 || std::abs(tm3) > tj3) return 0.0;
  if ((tj1 + tm1) % 2 || (tj2 + tm2) % 2 || (tj3 + tm3) % 2) return 0.0;

  const double pre =
      std::sqrt(triangle_coeff(tj1, tj2, tj3) * fact2(tj1 + tm1) * fact2(tj1 - tm1) *
                fact2(tj2 + tm2) * fact2(tj2 - tm2) * fact2(tj3 + tm3) * fact2(tj3 - tm3));

  // Racah sum over k (doubled), all factorial arguments non-negative.
  const int tk_min = std::max({0, tj2 - tj3 - tm1, tj1 - tj3 + tm2});
  const int tk_max = std::min({tj1 + tj2 - tj3, tj1 - tm1, tj2 + tm2});
  double sum = 0.0;
  for (int tk = tk_min; tk <= tk_max; tk += 2) {
    const double den = fact2(tk) * fact2(tj1 + tj2 - tj3 - tk) * fact2(tj1 - tm1 - tk) *
                       fact2(tj2 + tm2 - tk) * fact2(tj3 - tj2 + tm1 + tk) *
                       fact2(tj3 - tj1 - tm2 + tk);
    sum += parity(tk / 2) / den;
  }
  return parity((tj1 - tj2 - tm3) / 2) * pre * sum;
}

double wigner_6j(int tj1, int tj2, int tj3, int tj4, int tj5, int tj6) {
  // { j1 j2 j3 }
  // { j4 j5 j6 }
  if (!triangle_ok(tj1, tj2, tj3) || !triangle_ok(tj1, tj5, tj6) ||
      !triangle_ok(tj4, tj2, tj6) || !triangle_ok(tj4, tj5, tj3)) {
    return 0.0;
  }
  const double delta = std::sqrt(triangle_coeff(tj1, tj2, tj3) * triangle_coeff(tj1, tj5, tj6) *
                                 triangle_coeff(tj4, tj2, tj6) * triangle_coeff(tj4, tj5, tj3));
  const int a1 = tj1 + tj2 + tj3;
  const int a2 = tj1 + tj5 + tj6;
  const int a3 = tj4 + tj2 + tj6;
  const int a4 = tj4 + tj5 + tj3;
  const int b1 = tj1 + tj2 + tj4 + tj5;
  const int b2 = tj2 + tj3 + tj5 + tj6;
  const int b3 = tj3 + tj1 + tj6 + tj4;
  const int tt_min = std::max({a1, a2, a3, a4});
  const int tt_max = std::min({b1, b2, b3});
  double sum = 0.0;
  for (int tt = tt_min; tt <= tt_max; tt += 2) {
    const double den = fact2(tt - a1) * fact2(tt - a2) * fact2(tt - a3) * fact2(tt - a4) *
                       fact2(b1 - tt) * fact2(b2 - tt) * fact2(b3 - tt);
    sum += parity(tt / 2) * fact2(tt + 2) / den;
  }
  return delta * sum;
}

double clebsch_gordan(int tj1, int tm1, int tj2, int tm2, int tJ, int tM) {
  if (tm1 + tm2 != tM) return 0.0;
  return parity((tj1 - tj2 + tM) / 2) * std::sqrt(tJ + 1.0) *
         wigner_3j(tj1, tj2, tJ, tm1, tm2, -tM);
}

double relative_strength(const HyperfineLine& line, int f_upper, int mf_upper, int f_lower,
                         int mf_lower, int q) {
  if (std::abs(mf_upper) > f_upper || std::abs(mf_lower) > f_lower || f_upper < 0 ||
      f_lower < 0) {
    throw InputError(fmt::format("invalid quantum numbers: F_u={} m_u={} F_l={} m_l={}",
                                 f_upper, mf_upper, f_lower, mf_lower));
  }
  const int tfu = 2 * f_upper;
  const int tfl = 2 * f_lower;
  if (!triangle_ok(line.two_j_upper, line.two_i, tfu) ||
      !triangle_ok(line.two_j_lower, line.two_i, tfl)) {
    throw InputError(fmt::format("F_u={} / F_l={} not reachable from the configured J and I",
                                 f_upper, f_lower));
  }
  if (q < -1 || q > 1 || q != mf_upper - mf_lower) return 0.0;

  const double six_j = wigner_6j(line.two_j_upper, line.two_j_lower, 2, tfl, tfu, line.two_i);
  const double cg = clebsch_gordan(tfl, 2 * mf_lower, 2, 2 * q, tfu, 2 * mf_upper);
  const int phase2 = tfl + line.two_j_upper + 2 + line.two_i;
  return parity(phase2 / 2) * std::sqrt((tfl + 1.0) * (line.two_j_upper + 1.0)) * six_j * cg;
}

}  // namespace ocw::angular
