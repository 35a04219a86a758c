#include "delaytherm/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "delaytherm/errors.hpp"

namespace delaytherm {

// Abramowitz & Stegun, table 25.4, n = 16.
const std::array<double, 16> GaussLegendre16::nodes = {
    -0.989400934991649932596, -0.944575023073232576078, -0.865631202387831743880,
    -0.755404408355003033895, -0.617876244402643748447, -0.458016777657227386342,
    -0.281603550779258913230, -0.095012509837637440185, 0.095012509837637440185,
    0.281603550779258913230,  0.458016777657227386342,  0.617876244402643748447,
    0.755404408355003033895,  0.865631202387831743880,  0.944575023073232576078,
    0.989400934991649932596};

const std::array<double, 16> GaussLegendre16::weights = {
    0.027152459411754094852, 0.062253523938647892863, 0.095158511682492784810,
    0.124628971255533872052, 0.149595988816576732081, 0.169156519395002538189,
    0.182603415044923588867, 0.189450610455068496285, 0.189450610455068496285,
    0.182603415044923588867, 0.169156519395002538189, 0.149595988816576732081,
    0.124628971255533872052, 0.095158511682492784810, 0.062253523938647892863,
    0.027152459411754094852};

CVector gl16_panel(const std::function<CVector(double)>& f, double a, double b, std::size_t dim) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  CVector acc(dim, Complex{0.0, 0.0});
  for (std::size_t q = 0; q < 16; ++q) {
    const CVector fx = f(mid + half * GaussLegendre16::nodes[q]);
    const double w = half * GaussLegendre16::weights[q];
    for (std::size_t i = 0; i < dim; ++i) acc[i] += w * fx[i];
  }
  return acc;
}

namespace {

struct PanelAccumulator {
  CVector sum;
  double err = 0.0;
  explicit PanelAccumulator(std::size_t dim) : sum(dim, Complex{0.0, 0.0}) {}
};

void refine_panel(const std::function<CVector(double)>& f, double a, double b, std::size_t dim,
                  double abs_tol, int depth, int max_depth, PanelAccumulator& out) {
  const CVector whole = gl16_panel(f, a, b, dim);
  const double mid = 0.5 * (a + b);
  const CVector left = gl16_panel(f, a, mid, dim);
  const CVector right = gl16_panel(f, mid, b, dim);
  double diff = 0.0;
  for (std::size_t i = 0; i < dim; ++i) diff += std::norm(whole[i] - (left[i] + right[i]));
  diff = std::sqrt(diff);
  if (diff <= abs_tol || depth >= max_depth) {
    for (std::size_t i = 0; i < dim; ++i) out.sum[i] += left[i] + right[i];
    out.err += diff;
    return;
  }
  refine_panel(f, a, mid, dim, abs_tol / 2.0, depth + 1, max_depth, out);
  refine_panel(f, mid, b, dim, abs_tol / 2.0, depth + 1, max_depth, out);
}

}  // namespace

QuadratureResult integrate_breakpoints(const std::function<CVector(double)>& f, double a, double b,
                                       std::span<const double> breakpoints, std::size_t dim,
                                       double rel_tol, int max_depth) {
  QuadratureResult res;
  res.value.assign(dim, Complex{0.0, 0.0});
  if (!(b > a)) return res;

  std::vector<double> cuts;
  cuts.push_back(a);
  for (double c : breakpoints) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double x, double y) { return std::abs(x - y) <= 1e-15 * (b - a); }),
             cuts.end());

  // First pass to set the absolute tolerance scale.
  double scale = 0.0;
  std::vector<CVector> coarse(cuts.size() - 1);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    coarse[s] = gl16_panel(f, cuts[s], cuts[s + 1], dim);
    scale += vector_norm(coarse[s]);
  }
  const double abs_tol = rel_tol * (scale + 1.0);

  PanelAccumulator acc(dim);
  for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
    refine_panel(f, cuts[s], cuts[s + 1], dim, abs_tol / static_cast<double>(cuts.size()), 0,
                 max_depth, acc);
  }
  if (acc.err > abs_tol * 4.0) {
    throw NumericError("quadrature failed to reach tolerance", acc.err);
  }
  res.value = std::move(acc.sum);
  res.error_estimate = acc.err;
  return res;
}

CVector integrate_uniform(const std::function<CVector(double)>& f, double a, double b,
                          std::size_t n_panels, std::size_t dim) {
  CVector acc(dim, Complex{0.0, 0.0});
  const double h = (b - a) / static_cast<double>(n_panels);
  for (std::size_t s = 0; s < n_panels; ++s) {
    const CVector p = gl16_panel(f, a + h * static_cast<double>(s),
                                 a + h * static_cast<double>(s + 1), dim);
    for (std::size_t i = 0; i < dim; ++i) acc[i] += p[i];
  }
  return acc;
}

double integrate_scalar_uniform(const std::function<double(double)>& f, double a, double b,
                                std::size_t n_panels) {
  const auto wrapped = [&f](double x) { return CVector{Complex{f(x), 0.0}}; };
  const CVector v = integrate_uniform(wrapped, a, b, n_panels, 1);
  return v[0].real();
}

}  // namespace delaytherm
