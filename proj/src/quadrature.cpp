#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>
#include <vector>

#include "dpd/errors.hpp"
#include "dpd/numerics.hpp"

namespace dpd {
namespace {

// 21-point Kronrod extension of the 10-point Gauss rule (QUADPACK qk21).
constexpr std::array<double, 11> kKronrodNodes = {
    0.0,
    0.14887433898163122,
    0.2943928627014602,
    0.43339539412924721,
    0.56275713466860466,
    0.67940956829902444,
    0.7808177265864169,
    0.86506336668898454,
    0.93015749135570824,
    0.97390652851717174,
    0.99565716302580809};
constexpr std::array<double, 11> kKronrodWeights = {
    0.1494455540029169,
    0.14773910490133849,
    0.14277593857706009,
    0.13470921731147334,
    0.12349197626206584,
    0.10938715880229764,
    0.093125454583697601,
    0.075039674810919957,
    0.054755896574351995,
    0.032558162307964725,
    0.011694638867371874};
// Gauss weights for the odd-indexed Kronrod nodes.
constexpr std::array<double, 5> kGaussWeights = {
    0.29552422471475287, 0.26926671930999635, 0.21908636251598204,
    0.14945134915058059, 0.066671344308688138};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

class MappedIntegrand {
 public:
  MappedIntegrand(const Integrand& f, const QuadratureSpec& spec) : f_(f), spec_(spec) {}

  double operator()(double t) const {
    double x = 0.0;
    double jac = 1.0;
    switch (spec_.domain) {
      case Domain::Interval:
        x = t;
        break;
      case Domain::PositiveHalfLine: {
        const double one_minus = 1.0 - t;
        x = spec_.scale * t / one_minus;
        jac = spec_.scale / (one_minus * one_minus);
        break;
      }
      case Domain::RealLine: {
        const double d = 1.0 - t * t;
        x = spec_.center + spec_.scale * t / d;
        jac = spec_.scale * (1.0 + t * t) / (d * d);
        break;
      }
    }
    const double fx = f_(x);
    if (!std::isfinite(fx)) {
      std::ostringstream msg;
      msg << "integrand is not finite at x = " << x;
      throw Error(ErrorKind::DomainError, msg.str());
    }
    if (fx == 0.0) return 0.0;
    return fx * jac;
  }

 private:
  const Integrand& f_;
  const QuadratureSpec& spec_;
};

Segment kronrod21(const MappedIntegrand& g, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = g(center);
  double kronrod = fc * kKronrodWeights[0];
  double gauss = 0.0;
  for (std::size_t i = 1; i < kKronrodNodes.size(); ++i) {
    const double dx = half * kKronrodNodes[i];
    const double pair = g(center - dx) + g(center + dx);
    kronrod += kKronrodWeights[i] * pair;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
  }
  kronrod *= half;
  gauss *= half;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw Error(ErrorKind::DomainError, "quadrature tolerances must be strictly positive");
  }
  if (max_subdivisions < 1) {
    throw Error(ErrorKind::DomainError, "max_subdivisions must be at least 1");
  }
  if (!(scale > 0.0) || !std::isfinite(center)) {
    throw Error(ErrorKind::DomainError, "quadrature map needs a finite center and positive scale");
  }
  if (domain == Domain::Interval && !(upper > lower)) {
    throw Error(ErrorKind::DomainError, "interval quadrature needs lower < upper");
  }
}

QuadratureResult integrate_detailed(const Integrand& f, const QuadratureSpec& spec) {
  spec.validate();
  const MappedIntegrand g(f, spec);

  double a = 0.0;
  double b = 1.0;
  switch (spec.domain) {
    case Domain::Interval:
      a = spec.lower;
      b = spec.upper;
      break;
    case Domain::PositiveHalfLine:
      a = 0.0;
      b = 1.0;
      break;
    case Domain::RealLine:
      a = -1.0;
      b = 1.0;
      break;
  }

  std::priority_queue<Segment> heap;
  Segment first = kronrod21(g, a, b);
  double total = first.value;
  double total_error = first.error;
  heap.push(first);
  int subdivisions = 1;

  auto satisfied = [&] {
    return total_error <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
  };

  while (!satisfied()) {
    if (subdivisions >= spec.max_subdivisions) {
      std::ostringstream msg;
      msg << "error estimate " << total_error << " above tolerance after " << subdivisions
          << " subdivisions (value " << total << ")";
      throw Error(ErrorKind::NonConvergent, msg.str());
    }
    const Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      throw Error(ErrorKind::NonConvergent, "quadrature segment below floating-point resolution");
    }
    const Segment left = kronrod21(g, worst.a, mid);
    const Segment right = kronrod21(g, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;

    // Resum periodically: the running error total drifts under cancellation.
    if (subdivisions % 64 == 0) {
      std::vector<Segment> all;
      all.reserve(heap.size());
      total = 0.0;
      total_error = 0.0;
      while (!heap.empty()) {
        all.push_back(heap.top());
        heap.pop();
      }
      for (const auto& s : all) {
        total += s.value;
        total_error += s.error;
        heap.push(s);
      }
    }
  }
  return {total, total_error, subdivisions};
}

double integrate(const Integrand& f, const QuadratureSpec& spec) {
  return integrate_detailed(f, spec).value;
}

}  // namespace dpd
