#include "schedopt/quadrature.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <algorithm>
#include <stdexcept>
#include <vector>

#include "schedopt/errors.hpp"

namespace schedopt {
namespace {

// Kronrod abscissae; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  double magnitude;

  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod(const ScalarFunction& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double kronrod = 0.0;
  double gauss = 0.0;
  double magnitude = 0.0;
  for (std::size_t j = 0; j < kNodes.size(); ++j) {
    const double dx = half * kNodes[j];
    const double values[2] = {f(center - dx), f(center + dx)};
    const int count = j + 1 == kNodes.size() ? 1 : 2;
    for (int side = 0; side < count; ++side) {
      const double v = values[side];
      if (!std::isfinite(v)) throw QuadratureError("integrand is not finite on the interval");
      kronrod += kKronrodWeights[j] * v;
      magnitude += kKronrodWeights[j] * std::abs(v);
      if (j % 2 == 1) gauss += kGaussWeights[j / 2] * v;
    }
  }
  return {a, b, kronrod * half, std::abs((kronrod - gauss) * half), magnitude * std::abs(half)};
}

}  // namespace

QuadratureResult integrate_adaptive(const ScalarFunction& f, double a, double b, double abs_tol,
                                    std::size_t max_intervals) {
  if (!(abs_tol > 0.0)) throw std::invalid_argument("quadrature tolerance must be positive");
  if (a == b) return {0.0, 0.0, 0};
  if (!(a < b)) throw std::invalid_argument("quadrature requires a < b");

  std::vector<Panel> heap{gauss_kronrod(f, a, b)};
  constexpr double kEps = std::numeric_limits<double>::epsilon();

  while (true) {
    // Totals are re-summed each pass so they carry no cancellation drift.
    double value = 0.0;
    double error = 0.0;
    double magnitude = 0.0;
    for (const Panel& p : heap) {
      value += p.value;
      error += p.error;
      magnitude += p.magnitude;
    }
    if (error <= abs_tol || error <= 50.0 * kEps * magnitude) {
      return {value, error, heap.size()};
    }
    if (heap.size() >= max_intervals) {
      throw QuadratureError("adaptive quadrature did not reach its tolerance within the subdivision budget");
    }
    std::pop_heap(heap.begin(), heap.end());
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw QuadratureError("adaptive quadrature interval underflow");
    }
    heap.push_back(gauss_kronrod(f, worst.a, mid));
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(gauss_kronrod(f, mid, worst.b));
    std::push_heap(heap.begin(), heap.end());
  }
}

}  // namespace schedopt
