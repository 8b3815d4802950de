#include "dpd/stats_util.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpd/errors.hpp"

namespace dpd {
namespace {

void require_nonempty(std::span<const double> x) {
  if (x.empty()) throw Error(ErrorKind::DegenerateData, "empty sample");
}

}  // namespace

double mean(std::span<const double> x) {
  require_nonempty(x);
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double central_second_moment(std::span<const double> x) {
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  return ss / static_cast<double>(x.size());
}

double sample_variance(std::span<const double> x) {
  if (x.size() < 2) throw Error(ErrorKind::DegenerateData, "need at least two observations");
  return central_second_moment(x) * static_cast<double>(x.size()) /
         static_cast<double>(x.size() - 1);
}

double quantile(std::span<const double> x, double prob) {
  require_nonempty(x);
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double h = (static_cast<double>(s.size()) - 1.0) * std::clamp(prob, 0.0, 1.0);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double median(std::span<const double> x) { return quantile(x, 0.5); }

double median_absolute_deviation(std::span<const double> x) {
  const double m = median(x);
  std::vector<double> dev;
  dev.reserve(x.size());
  for (double v : x) dev.push_back(std::abs(v - m));
  return median(dev);
}

}  // namespace dpd
