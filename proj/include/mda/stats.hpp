#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace mda {

// Kolmogorov-Smirnov statistic sup |F_emp - F| against a monotone target CDF.
double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf);

// Two-sample KS distance between empirical distributions.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct ChiSquare {
    double statistic = 0.0;
    int dof = 0;
};

// Chi-square statistic of observed counts against the uniform expectation;
// requires expected count >= 5 per class.
ChiSquare chi_square_uniform(const std::vector<long long>& counts);

// 99th percentile of the chi-square distribution (exact for dof 1..2,
// Wilson-Hilferty beyond).
double chi_square_critical_99(int dof);

struct PowerLawFit {
    double coefficient = 0.0;
    double rel_residual = 0.0; // RMS residual / RMS data
};

// Least squares of D_i against T_i^e with the exponent fixed.
PowerLawFit fit_power_law(const std::vector<double>& T, const std::vector<double>& D,
                          int exponent);

struct TestReport {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool below_threshold = true; // pass means statistic <= threshold when true,
                                 // statistic >= threshold otherwise
    bool pass = false;
    long long sample_size = 0;
    std::string target;
    std::uint64_t seed = 0;

    static TestReport below(std::string name, double stat, double thr, long long n,
                            std::string target, std::uint64_t seed);
    static TestReport exact(std::string name, bool ok, std::string target);
};

} // namespace mda
