#include "confspec/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <vector>

#include "confspec/error.hpp"
#include "confspec/rng.hpp"
#include "confspec/simd.hpp"

namespace confspec::stats {
namespace {

std::vector<double> centred(std::span<const double> x) {
  const double m = mean(x);
  std::vector<double> out(x.begin(), x.end());
  for (double& v : out) v -= m;
  return out;
}

void check_pair(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) fail(ErrorKind::InvalidInput, "paired samples differ in length");
  if (x.size() < 2) fail(ErrorKind::InvalidInput, "need at least 2 paired samples");
}

}  // namespace

double mean(std::span<const double> x) {
  if (x.empty()) fail(ErrorKind::InvalidInput, "mean of an empty sample");
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double median(std::span<const double> x) {
  if (x.empty()) fail(ErrorKind::InvalidInput, "median of an empty sample");
  std::vector<double> v(x.begin(), x.end());
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  check_pair(x, y);
  const auto xc = centred(x);
  const auto yc = centred(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xc.size(); ++i) {
    sxy += xc[i] * yc[i];
    sxx += xc[i] * xc[i];
    syy += yc[i] * yc[i];
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

double rmse(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.empty()) fail(ErrorKind::InvalidInput, "rmse needs equal, non-empty samples");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s / static_cast<double>(x.size()));
}

double permutation_p_value(std::span<const double> x, std::span<const double> y,
                           std::uint64_t permutations, std::uint64_t seed) {
  check_pair(x, y);
  auto xc = centred(x);
  auto yc = centred(y);
  const double nx = std::sqrt(std::inner_product(xc.begin(), xc.end(), xc.begin(), 0.0));
  const double ny = std::sqrt(std::inner_product(yc.begin(), yc.end(), yc.begin(), 0.0));
  if (nx == 0.0 || ny == 0.0) return 1.0;
  for (double& v : xc) v /= nx;
  for (double& v : yc) v /= ny;

  const auto& k = simd::active_kernels();
  const double observed = std::fabs(k.dot(xc.data(), yc.data(), xc.size()));
  // Guard against ties lost to rounding when a permutation reproduces the data.
  const double threshold = observed * (1.0 - 1e-12);
  Engine rng(seed);
  std::uint64_t hits = 0;
  for (std::uint64_t p = 0; p < permutations; ++p) {
    std::shuffle(yc.begin(), yc.end(), rng);
    if (std::fabs(k.dot(xc.data(), yc.data(), xc.size())) >= threshold) ++hits;
  }
  return static_cast<double>(hits + 1) / static_cast<double>(permutations + 1);
}

double fisher_p_value(double r, std::size_t n) {
  if (n <= 3) return 1.0;
  const double rr = std::clamp(std::fabs(r), 0.0, 1.0 - 1e-16);
  const double z = std::atanh(rr) * std::sqrt(static_cast<double>(n - 3));
  return std::erfc(z / std::sqrt(2.0));
}

unsigned default_threads() {
  if (const char* env = std::getenv("CONFSPEC_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, threads), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace confspec::stats
