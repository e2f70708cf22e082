#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace mallows {

double normal_cdf(double x);

double sample_mean(const std::vector<double>& xs);
// Unbiased sample variance; 0 for fewer than two values.
double sample_variance(const std::vector<double>& xs);
double sample_correlation(const std::vector<double>& xs, const std::vector<double>& ys);

// sup_x |F_n(x) - Phi(x)| for the empirical CDF of xs. Ties are handled by
// comparing Phi at each atom with the empirical CDF just before and after it.
double ks_to_normal(std::vector<double> xs);

struct ChiSquare {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
};

// Upper tail P(chi^2_dof >= statistic).
double chi_square_p_value(double statistic, std::size_t dof);

// Goodness of fit of observed counts against cell probabilities. Cells with
// expected count below 5 are pooled, smallest first.
ChiSquare chi_square_gof(const std::vector<std::uint64_t>& observed, const std::vector<double>& probabilities);

// Homogeneity test of two count vectors over the same cells. Cells whose
// combined count is below 10 are pooled.
ChiSquare chi_square_two_sample(const std::vector<std::uint64_t>& first, const std::vector<std::uint64_t>& second);

using DiscreteLaw = std::map<std::int64_t, double>;

// Half the L1 distance, over the union of the supports.
double total_variation(const DiscreteLaw& a, const DiscreteLaw& b);

// Empirical law of integer observations.
DiscreteLaw empirical_law(const std::vector<std::int64_t>& values);

// Poisson(lambda) pmf on 0..K, with K the first index at which the remaining
// upper tail mass is below tail.
std::vector<double> poisson_pmf(double lambda, double tail = 1e-9);

}  // namespace mallows
