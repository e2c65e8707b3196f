#include "mda/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mda {

double ks_statistic(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.size() < 10) throw std::invalid_argument("ks_statistic: need >= 10 samples");
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double worst = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        double F = cdf(samples[i]);
        double above = (static_cast<double>(i) + 1.0) / n - F;
        double below = F - static_cast<double>(i) / n;
        worst = std::max({worst, above, below});
    }
    return worst;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty input");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    size_t i = 0, j = 0;
    double worst = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        worst = std::max(worst, std::fabs(static_cast<double>(i) / na -
                                          static_cast<double>(j) / nb));
    }
    return worst;
}

ChiSquare chi_square_uniform(const std::vector<long long>& counts) {
    if (counts.size() < 2) throw std::invalid_argument("chi_square_uniform: >= 2 classes");
    long long total = 0;
    for (long long c : counts) total += c;
    double expected = static_cast<double>(total) / static_cast<double>(counts.size());
    if (expected < 5.0)
        throw std::invalid_argument("chi_square_uniform: expected count below 5 per class");
    ChiSquare out;
    out.dof = static_cast<int>(counts.size()) - 1;
    for (long long c : counts) {
        double diff = static_cast<double>(c) - expected;
        out.statistic += diff * diff / expected;
    }
    return out;
}

double chi_square_critical_99(int dof) {
    if (dof < 1) throw std::invalid_argument("chi_square_critical_99: dof >= 1");
    if (dof == 1) return 6.6349;
    if (dof == 2) return 9.2103;
    // Wilson-Hilferty cube approximation, z = 99% normal quantile.
    const double z = 2.3263478740;
    double h = 2.0 / (9.0 * dof);
    double t = 1.0 - h + z * std::sqrt(h);
    return dof * t * t * t;
}

PowerLawFit fit_power_law(const std::vector<double>& T, const std::vector<double>& D,
                          int exponent) {
    if (T.size() != D.size()) throw std::invalid_argument("fit_power_law: size mismatch");
    if (T.size() < 4) throw std::invalid_argument("fit_power_law: need >= 4 points");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < T.size(); ++i) {
        double x = std::pow(T[i], exponent);
        num += D[i] * x;
        den += x * x;
    }
    if (den == 0.0) throw std::invalid_argument("fit_power_law: degenerate design");
    PowerLawFit fit;
    fit.coefficient = num / den;
    double ss = 0.0, sd = 0.0;
    for (size_t i = 0; i < T.size(); ++i) {
        double resid = D[i] - fit.coefficient * std::pow(T[i], exponent);
        ss += resid * resid;
        sd += D[i] * D[i];
    }
    fit.rel_residual = sd > 0 ? std::sqrt(ss / sd) : 0.0;
    return fit;
}

TestReport TestReport::below(std::string name, double stat, double thr, long long n,
                             std::string target, std::uint64_t seed) {
    TestReport r;
    r.name = std::move(name);
    r.statistic = stat;
    r.threshold = thr;
    r.below_threshold = true;
    r.pass = stat <= thr;
    r.sample_size = n;
    r.target = std::move(target);
    r.seed = seed;
    return r;
}

TestReport TestReport::exact(std::string name, bool ok, std::string target) {
    TestReport r;
    r.name = std::move(name);
    r.statistic = ok ? 0.0 : 1.0;
    r.threshold = 0.0;
    r.pass = ok;
    r.sample_size = 0;
    r.target = std::move(target);
    return r;
}

} // namespace mda
