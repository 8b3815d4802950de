#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/non_central_chi_squared.hpp>

#include "dpd/errors.hpp"
#include "dpd/rng.hpp"
#include "dpd/testing.hpp"

namespace dpd {
namespace {

void fill_chunk(const ChiSquareMixture& mix, std::int64_t chunk, std::span<double> out) {
  RngStream rng(mix.seed, static_cast<std::uint64_t>(chunk));
  const Eigen::Index k = mix.weights.size();
  const bool shifted = mix.shifts.size() > 0;
  const std::int64_t begin = chunk * kMixtureChunk;
  const std::int64_t end = std::min<std::int64_t>(begin + kMixtureChunk, mix.mc_draws);
  for (std::int64_t d = begin; d < end; ++d) {
    double s = mix.offset;
    for (Eigen::Index i = 0; i < k; ++i) {
      const double z = rng.next_gaussian() + (shifted ? mix.shifts[i] : 0.0);
      s += mix.weights[i] * z * z;
    }
    out[static_cast<std::size_t>(d)] = s;
  }
}

std::int64_t chunk_count(std::int64_t draws) { return (draws + kMixtureChunk - 1) / kMixtureChunk; }

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::DomainError, "alpha must lie in (0, 1)");
}

}  // namespace

void ChiSquareMixture::validate() const {
  if (weights.size() == 0) throw Error(ErrorKind::DomainError, "mixture needs at least one weight");
  if ((weights.array() <= 0.0).any() || !weights.allFinite()) {
    throw Error(ErrorKind::DomainError, "mixture weights must be positive and finite");
  }
  if (shifts.size() != 0 && (shifts.size() != weights.size() || !shifts.allFinite())) {
    throw Error(ErrorKind::DomainError, "shifts must match the weights");
  }
  if (!std::isfinite(offset)) throw Error(ErrorKind::DomainError, "offset must be finite");
  if (mc_draws < 1) throw Error(ErrorKind::DomainError, "mc_draws must be positive");
}

bool ChiSquareMixture::exact_route() const {
  return !force_monte_carlo && weights.size() == 1;
}

namespace {

double noncentrality(const ChiSquareMixture& mix) {
  return mix.shifts.size() == 0 ? 0.0 : mix.shifts[0] * mix.shifts[0];
}

// lambda (Z + w)^2 + eta
double exact_quantile(const ChiSquareMixture& mix, double alpha) {
  const double nc = noncentrality(mix);
  double q = 0.0;
  if (nc == 0.0) {
    q = chi_square_quantile(1.0 - alpha, 1.0);
  } else {
    const boost::math::non_central_chi_squared_distribution<double> dist(1.0, nc);
    q = boost::math::quantile(boost::math::complement(dist, alpha));
  }
  return mix.offset + mix.weights[0] * q;
}

double exact_sf(const ChiSquareMixture& mix, double t) {
  const double x = (t - mix.offset) / mix.weights[0];
  if (x <= 0.0) return 1.0;
  const double nc = noncentrality(mix);
  if (nc == 0.0) return chi_square_sf(x, 1.0);
  const boost::math::non_central_chi_squared_distribution<double> dist(1.0, nc);
  return boost::math::cdf(boost::math::complement(dist, x));
}

}  // namespace

void sample_mixture(const ChiSquareMixture& mix, std::span<double> out) {
  mix.validate();
  if (static_cast<std::int64_t>(out.size()) != mix.mc_draws) {
    throw Error(ErrorKind::DomainError, "output size must equal mc_draws");
  }
  const std::int64_t chunks = chunk_count(mix.mc_draws);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < chunks; ++c) fill_chunk(mix, c, out);
}

void sample_mixture_serial(const ChiSquareMixture& mix, std::span<double> out) {
  mix.validate();
  if (static_cast<std::int64_t>(out.size()) != mix.mc_draws) {
    throw Error(ErrorKind::DomainError, "output size must equal mc_draws");
  }
  const std::int64_t chunks = chunk_count(mix.mc_draws);
  for (std::int64_t c = 0; c < chunks; ++c) fill_chunk(mix, c, out);
}

MixtureDistribution::MixtureDistribution(ChiSquareMixture mix) : mix_(std::move(mix)) {
  mix_.validate();
  if (!mix_.exact_route()) {
    sorted_.resize(static_cast<std::size_t>(mix_.mc_draws));
    sample_mixture(mix_, sorted_);
    std::sort(sorted_.begin(), sorted_.end());
  }
}

double MixtureDistribution::quantile(double alpha) const {
  check_alpha(alpha);
  if (mix_.exact_route()) return exact_quantile(mix_, alpha);
  if (alpha < 10.0 / static_cast<double>(mix_.mc_draws)) {
    std::ostringstream msg;
    msg << "alpha = " << alpha << " needs more than " << mix_.mc_draws << " Monte Carlo draws";
    throw Error(ErrorKind::MCUnderResolved, msg.str());
  }
  const auto n = static_cast<double>(sorted_.size());
  const auto idx = static_cast<std::size_t>(std::max(0.0, std::ceil((1.0 - alpha) * n) - 1.0));
  return sorted_[std::min(idx, sorted_.size() - 1)];
}

double MixtureDistribution::pvalue(double t) const {
  if (std::isnan(t)) throw Error(ErrorKind::DomainError, "statistic is NaN");
  if (mix_.exact_route()) return exact_sf(mix_, t);
  const auto first = std::lower_bound(sorted_.begin(), sorted_.end(), t);
  const auto exceed = static_cast<double>(sorted_.end() - first);
  const auto n = static_cast<double>(sorted_.size());
  return std::max(exceed / n, 1.0 / (n + 1.0));
}

double mixture_quantile(const ChiSquareMixture& mix, double alpha) {
  return MixtureDistribution(mix).quantile(alpha);
}

double mixture_pvalue(const ChiSquareMixture& mix, double t) {
  return MixtureDistribution(mix).pvalue(t);
}

}  // namespace dpd
