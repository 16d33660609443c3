#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <thread>

namespace confspec::stats {

double mean(std::span<const double> x);
double median(std::span<const double> x);
double pearson(std::span<const double> x, std::span<const double> y);
double rmse(std::span<const double> x, std::span<const double> y);

// Two-sided permutation p-value for the Pearson correlation:
// (1 + #{|r_perm| >= |r_obs|}) / (1 + permutations).
double permutation_p_value(std::span<const double> x, std::span<const double> y,
                           std::uint64_t permutations, std::uint64_t seed);

// Normal approximation through Fisher's z-transform.
double fisher_p_value(double r, std::size_t n);

// Worker count: CONFSPEC_THREADS when set, else hardware concurrency.
unsigned default_threads();

// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace confspec::stats
