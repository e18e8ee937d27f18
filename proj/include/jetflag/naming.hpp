#pragma once

#include <string>

#include "jetflag/multiindex.hpp"

// Coordinate names shared by every chart and by the JSON wire format.
namespace jetflag::names {

/// `x{i}`, 1-based.
inline std::string x(int i) { return "x" + std::to_string(i); }

/// Standard jet coordinate `u{alpha}_{sigma}`, e.g. `u1_2.0.1`.
inline std::string jet(int alpha, const MultiIndex& sigma) {
  return "u" + std::to_string(alpha) + "_" + sigma.str();
}

/// The Cauchy surface height coordinate.
inline std::string t() { return "t"; }

/// Flag / Cauchy-chart jet coordinate `u{alpha}_{A}_{l}`, e.g. `u1_2.0_3`.
inline std::string flag_u(int alpha, const MultiIndex& a, int l) {
  return "u" + std::to_string(alpha) + "_" + a.str() + "_" + std::to_string(l);
}

/// Surface slope jet `tD_{B}`, B nonzero, e.g. `tD_1.1`.
inline std::string t_jet(const MultiIndex& b) { return "tD_" + b.str(); }

/// Inner derivative `(u^alpha_{A,l})_B` as `w{alpha}_{A}_{l}_{B}`.
inline std::string inner(int alpha, const MultiIndex& a, int l, const MultiIndex& b) {
  return "w" + std::to_string(alpha) + "_" + a.str() + "_" + std::to_string(l) + "_" + b.str();
}

/// Slope of a dependent variable `y` along the i-th independent variable of
/// a first-order plane chart: `{y}_{i}`.
inline std::string slope(const std::string& y, int i) { return y + "_" + std::to_string(i); }

}  // namespace jetflag::names
