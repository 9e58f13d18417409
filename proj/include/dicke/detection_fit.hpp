#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace dicke {

inline constexpr int kDefaultMaxCount = 100;

/// Probabilities for photon counts 0..n_max; the last bin holds every count >= n_max.
struct CountDistribution {
    std::vector<double> p;

    int n_max() const { return static_cast<int>(p.size()) - 1; }
    double mean() const;
    /// Non-negative and summing to 1 within `tol`.
    void validate(double tol = 1e-9) const;
    static CountDistribution delta(int n_max);
};

/// Mean counts are per detection window.
struct ReadoutModel {
    double lambda_bright = 30.0;   ///< one ion in |down>
    double lambda_dark = 0.3;      ///< one ion in |up>
    double lambda_bg = 0.2;        ///< background
    double gamma = 500.0;          ///< repump rate |up> -> |down>, 1/s
    double t_detect = 200e-6;      ///< s
    int n_max = kDefaultMaxCount;

    void validate() const;
    double repump_exponent() const { return gamma * t_detect; }
};

CountDistribution poisson_dist(double mean, int n_max = kDefaultMaxCount);

/// (g * h)(n) = sum_{k <= n} g(n-k) h(k), with the tail folded into n_max.
CountDistribution convolve(const CountDistribution& g, const CountDistribution& h);

CountDistribution bright_ion_dist(const ReadoutModel& model);

/// Counts from one ion that starts in |up> and is repumped to |down> at an
/// exponentially distributed time tau: Poisson with mean
/// lambda_dark * tau/T + lambda_bright * (T - tau)/T when tau < T.
CountDistribution dark_ion_dist(const ReadoutModel& model);

/// P(n | i) for i = number of ions in |down>, i = 0, 1, 2.
struct CompositeDists {
    std::array<CountDistribution, 3> given_bright;

    const CountDistribution& operator[](std::size_t i) const { return given_bright.at(i); }
    int n_max() const { return given_bright[0].n_max(); }
};

CompositeDists composite_dists(const ReadoutModel& model);

using Populations = std::array<double, 3>;

CountDistribution mixture(const CompositeDists& dists, const Populations& c);

struct Histogram {
    std::vector<std::uint64_t> counts;  ///< counts[n] = shots with n photons

    std::uint64_t total() const;
    std::size_t occupied_bins() const;
    double mean() const;
};

/// Throws DataError naming the 1-based sample position of any count outside [0, n_max].
Histogram histogram_of(std::span<const int> samples, int n_max = kDefaultMaxCount);

struct CalibrationResult {
    ReadoutModel model;
    double log_likelihood = 0.0;
    double deviance = 0.0;  ///< G statistic against the saturated model
    int degrees_of_freedom = 0;
    int evaluations = 0;
};

/// Joint maximum-likelihood fit of lambda_bright, lambda_dark and gamma to an
/// all-bright (P(n|2)) and an all-dark (P(n|0)) reference. Background and the
/// detection window are taken from `known`; the background is not
/// identifiable from these two references alone.
CalibrationResult calibrate(const Histogram& ref_bright, const Histogram& ref_dark, const ReadoutModel& known);

struct FitOptions {
    int bootstrap = 200;
    std::uint64_t seed = 0x5eed;
    double tolerance = 1e-10;  ///< log-likelihood change
    int max_iterations = 200000;
};

struct FitResult {
    Populations c{};
    Populations standard_error{};
    double parity_standard_error = 0.0;
    double log_likelihood = 0.0;
    std::size_t n_samples = 0;
    int iterations = 0;
};

/// Maximum-likelihood populations on the simplex by multiplicative (EM) updates.
/// No bootstrap.
FitResult ml_point_estimate(const Histogram& hist, const CompositeDists& dists, const FitOptions& options = {});

FitResult ml_fit(const Histogram& hist, const CompositeDists& dists, const FitOptions& options = {});
FitResult ml_fit(std::span<const int> samples, const CompositeDists& dists, const FitOptions& options = {});

/// Nonparametric bootstrap; resample r uses a generator seeded from (seed, r).
/// OpenMP over resamples.
std::vector<Populations> bootstrap_populations(const Histogram& hist, const CompositeDists& dists,
                                               const FitOptions& options);
/// Serial reference for bootstrap_populations.
std::vector<Populations> bootstrap_populations_serial(const Histogram& hist, const CompositeDists& dists,
                                                      const FitOptions& options);

/// c0 + c2 - c1.
double parity_from_fit(const FitResult& fit);
double parity_of(const Populations& c);

struct ParityScanPoint {
    double phi = 0.0;
    std::vector<int> samples;
};

struct ParityScanResult {
    std::vector<double> phis;
    std::vector<double> parities;
    std::vector<double> parity_errors;
    double amplitude = 0.0;  ///< A in A cos(2 phi - phase) + offset
    double phase = 0.0;
    double offset = 0.0;
    /// 1/2 [Pi(pi/2, 0) + Pi(pi/2, pi/2)] from the fitted curve.
    double coherence_term = 0.0;
    double coherence_error = 0.0;
    /// Amplitude of a cos(phi) component in a fit with both harmonics; NaN
    /// when fewer than five independent phases.
    double fundamental_amplitude = std::numeric_limits<double>::quiet_NaN();
};

/// Per-phase ML parities fitted by least squares to A cos(2 phi - phase) + B.
/// Throws IdentifiabilityError with fewer than four distinct phases or a
/// rank-deficient design.
ParityScanResult parity_scan_analysis(const std::vector<ParityScanPoint>& scans, const CompositeDists& dists,
                                      const FitOptions& options = {});

/// i.i.d. counts: component i ~ c, then n ~ P(n | i). Reproducible per seed.
std::vector<int> synthesize_shots(const Populations& c, const CompositeDists& dists, std::size_t n_shots,
                                  std::uint64_t seed);

/// Total-variation distance between two distributions on the same support.
double total_variation(const CountDistribution& a, const CountDistribution& b);

/// Empirical distribution of a histogram.
CountDistribution empirical(const Histogram& hist);

}  // namespace dicke
