#include "dicke/detection_fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "dicke/errors.hpp"

namespace dicke {

namespace {

constexpr int kRepumpIntervals = 512;
constexpr double kLogFloor = 1e-300;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 stream_for(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(seed ^ splitmix64(stream)));
}

// Uniform in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t draw_index(std::span<const double> cumulative, double u) {
    const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

std::vector<double> cumulative_of(const std::vector<double>& p) {
    std::vector<double> c(p.size());
    std::partial_sum(p.begin(), p.end(), c.begin());
    return c;
}

void require_same_support(const CountDistribution& a, const CountDistribution& b) {
    if (a.p.size() != b.p.size()) throw std::invalid_argument("count distributions have different n_max");
}

// Poisson pmf into out[0..n_max), remaining mass into out[n_max].
// Weights of f(0), f(1), f(2) in the integral of e^{-a s} q(s) over [0, 2],
// q the quadratic through the three nodes.
std::array<double, 3> exponential_simpson_weights(double a) {
    double m0, m1, m2;  // integrals of s^k e^{-a s}
    if (a < 0.5) {
        m0 = m1 = m2 = 0.0;
        double term = 1.0;  // (-a)^n / n!
        for (int n = 0; n < 40; ++n) {
            const double p = std::pow(2.0, n + 1);
            m0 += term * p / (n + 1);
            m1 += term * 2.0 * p / (n + 2);
            m2 += term * 4.0 * p / (n + 3);
            term *= -a / (n + 1);
        }
    } else {
        const double e = std::exp(-2.0 * a);
        m0 = (1.0 - e) / a;
        m1 = (1.0 - e * (1.0 + 2.0 * a)) / (a * a);
        m2 = (2.0 - e * (2.0 + 4.0 * a + 4.0 * a * a)) / (a * a * a);
    }
    return {0.5 * (m2 - 3.0 * m1 + 2.0 * m0), 2.0 * m1 - m2, 0.5 * (m2 - m1)};
}

void poisson_into(double mean, std::vector<double>& out) {
    const std::size_t size = out.size();
    std::fill(out.begin(), out.end(), 0.0);
    if (mean == 0.0) {
        out[0] = 1.0;
        return;
    }
    double acc = 0.0;
    const double log_mean = std::log(mean);
    for (std::size_t n = 0; n + 1 < size; ++n) {
        const double v = std::exp(static_cast<double>(n) * log_mean - mean - std::lgamma(static_cast<double>(n) + 1.0));
        out[n] = v;
        acc += v;
    }
    out[size - 1] = std::max(0.0, 1.0 - acc);
}

double log_likelihood(const Histogram& h, const CountDistribution& d) {
    double ll = 0.0;
    for (std::size_t n = 0; n < h.counts.size(); ++n)
        if (h.counts[n] > 0) ll += static_cast<double>(h.counts[n]) * std::log(std::max(d.p[n], kLogFloor));
    return ll;
}

double g_statistic(const Histogram& h, const CountDistribution& d) {
    const double total = static_cast<double>(h.total());
    double g = 0.0;
    for (std::size_t n = 0; n < h.counts.size(); ++n) {
        if (h.counts[n] == 0) continue;
        const double obs = static_cast<double>(h.counts[n]);
        g += 2.0 * obs * std::log(obs / std::max(total * d.p[n], kLogFloor));
    }
    return g;
}

// Small Nelder-Mead minimiser; enough for a smooth 3-parameter likelihood.
template <class F>
Eigen::VectorXd nelder_mead(F&& f, Eigen::VectorXd x0, double step, int max_evals, int& evals) {
    const Eigen::Index n = x0.size();
    std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(n) + 1, x0);
    std::vector<double> values(simplex.size());
    for (Eigen::Index i = 0; i < n; ++i) simplex[static_cast<std::size_t>(i) + 1][i] += step;
    for (std::size_t i = 0; i < simplex.size(); ++i) values[i] = f(simplex[i]);
    evals += static_cast<int>(simplex.size());

    std::vector<std::size_t> order(simplex.size());
    while (evals < max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front(), worst = order.back(), second = order[order.size() - 2];

        double size = 0.0;
        for (const auto& v : simplex) size = std::max(size, (v - simplex[best]).cwiseAbs().maxCoeff());
        if (values[worst] - values[best] < 1e-10 && size < 1e-9) break;

        Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
        for (std::size_t i : order)
            if (i != worst) centroid += simplex[i];
        centroid /= static_cast<double>(n);

        const Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
        const double fr = f(reflected);
        ++evals;
        if (fr < values[best]) {
            const Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
            const double fe = f(expanded);
            ++evals;
            if (fe < fr) { simplex[worst] = expanded; values[worst] = fe; }
            else { simplex[worst] = reflected; values[worst] = fr; }
            continue;
        }
        if (fr < values[second]) {
            simplex[worst] = reflected;
            values[worst] = fr;
            continue;
        }
        const bool outside = fr < values[worst];
        const Eigen::VectorXd contracted = outside ? Eigen::VectorXd(centroid + 0.5 * (reflected - centroid))
                                                   : Eigen::VectorXd(centroid + 0.5 * (simplex[worst] - centroid));
        const double fc = f(contracted);
        ++evals;
        if (fc < std::min(fr, values[worst])) {
            simplex[worst] = contracted;
            values[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i < simplex.size(); ++i) {
            if (i == best) continue;
            simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
            values[i] = f(simplex[i]);
            ++evals;
        }
    }
    const auto it = std::min_element(values.begin(), values.end());
    return simplex[static_cast<std::size_t>(it - values.begin())];
}

Histogram resample(const Histogram& hist, std::mt19937_64& rng) {
    std::vector<double> cumulative(hist.counts.size());
    double acc = 0.0;
    for (std::size_t n = 0; n < hist.counts.size(); ++n) {
        acc += static_cast<double>(hist.counts[n]);
        cumulative[n] = acc;
    }
    Histogram out{std::vector<std::uint64_t>(hist.counts.size(), 0)};
    const std::uint64_t total = hist.total();
    for (std::uint64_t s = 0; s < total; ++s) {
        const double u = uniform01(rng) * acc;
        ++out.counts[draw_index(cumulative, u)];
    }
    return out;
}

Populations bootstrap_one(const Histogram& hist, const CompositeDists& dists, const FitOptions& options,
                          std::uint64_t r) {
    auto rng = stream_for(options.seed, r);
    return ml_point_estimate(resample(hist, rng), dists, options).c;
}

}  // namespace

double CountDistribution::mean() const {
    double m = 0.0;
    for (std::size_t n = 0; n < p.size(); ++n) m += static_cast<double>(n) * p[n];
    return m;
}

void CountDistribution::validate(double tol) const {
    if (p.empty()) throw std::invalid_argument("empty count distribution");
    double sum = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw std::invalid_argument("negative probability in count distribution");
        sum += v;
    }
    if (std::abs(sum - 1.0) > tol) throw std::invalid_argument("count distribution does not sum to 1");
}

CountDistribution CountDistribution::delta(int n_max) {
    if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
    CountDistribution d{std::vector<double>(static_cast<std::size_t>(n_max) + 1, 0.0)};
    d.p[0] = 1.0;
    return d;
}

void ReadoutModel::validate() const {
    for (double v : {lambda_bright, lambda_dark, lambda_bg, gamma})
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("readout rates must be non-negative");
    if (!(t_detect > 0.0)) throw std::invalid_argument("detection window must be positive");
    if (n_max < 1) throw std::invalid_argument("n_max must be at least 1");
}

CountDistribution poisson_dist(double mean, int n_max) {
    if (!(mean >= 0.0) || !std::isfinite(mean)) throw std::invalid_argument("Poisson mean must be non-negative");
    if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
    CountDistribution d{std::vector<double>(static_cast<std::size_t>(n_max) + 1)};
    poisson_into(mean, d.p);
    return d;
}

CountDistribution convolve(const CountDistribution& g, const CountDistribution& h) {
    require_same_support(g, h);
    const std::size_t size = g.p.size();
    CountDistribution out{std::vector<double>(size, 0.0)};
    for (std::size_t n = 0; n < size; ++n) {
        if (g.p[n] == 0.0) continue;
        for (std::size_t k = 0; k < size; ++k) {
            // Any sum reaching the last bin stays there: the tail is ">= n_max".
            out.p[std::min(n + k, size - 1)] += g.p[n] * h.p[k];
        }
    }
    return out;
}

CountDistribution bright_ion_dist(const ReadoutModel& model) {
    model.validate();
    return poisson_dist(model.lambda_bright, model.n_max);
}

CountDistribution dark_ion_dist(const ReadoutModel& model) {
    model.validate();
    const double gt = model.repump_exponent();
    CountDistribution out = poisson_dist(model.lambda_dark, model.n_max);
    if (gt == 0.0) return out;

    const double survive = std::exp(-gt);
    for (double& v : out.p) v *= survive;

    // Simpson panels on uniform tau nodes (tau in units of T). The Poisson
    // factor is interpolated quadratically; the exponential weight is
    // integrated exactly, which reduces to plain Simpson as gamma -> 0.
    const double h = 1.0 / kRepumpIntervals;
    const std::array<double, 3> w = exponential_simpson_weights(gt * h);
    std::vector<double> node_weight(kRepumpIntervals + 1, 0.0);
    for (int k = 0; k < kRepumpIntervals; k += 2) {
        const double scale = gt * h * std::exp(-gt * k * h);
        for (int j = 0; j < 3; ++j) node_weight[static_cast<std::size_t>(k + j)] += scale * w[static_cast<std::size_t>(j)];
    }
    std::vector<double> pmf(out.p.size());
    for (int j = 0; j <= kRepumpIntervals; ++j) {
        const double frac = j * h;
        poisson_into(model.lambda_dark * frac + model.lambda_bright * (1.0 - frac), pmf);
        const double scale = node_weight[static_cast<std::size_t>(j)];
        for (std::size_t n = 0; n < pmf.size(); ++n) out.p[n] += scale * pmf[n];
    }
    return out;
}

CompositeDists composite_dists(const ReadoutModel& model) {
    const CountDistribution bg = poisson_dist(model.lambda_bg, model.n_max);
    const CountDistribution up = dark_ion_dist(model);
    const CountDistribution down = bright_ion_dist(model);
    return {{convolve(convolve(bg, up), up), convolve(convolve(bg, up), down), convolve(convolve(bg, down), down)}};
}

CountDistribution mixture(const CompositeDists& dists, const Populations& c) {
    CountDistribution out{std::vector<double>(dists[0].p.size(), 0.0)};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t n = 0; n < out.p.size(); ++n) out.p[n] += c[i] * dists[i].p[n];
    return out;
}

std::uint64_t Histogram::total() const {
    return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

std::size_t Histogram::occupied_bins() const {
    return static_cast<std::size_t>(std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
}

double Histogram::mean() const {
    const auto t = total();
    if (t == 0) return 0.0;
    double s = 0.0;
    for (std::size_t n = 0; n < counts.size(); ++n) s += static_cast<double>(n) * static_cast<double>(counts[n]);
    return s / static_cast<double>(t);
}

Histogram histogram_of(std::span<const int> samples, int n_max) {
    Histogram h{std::vector<std::uint64_t>(static_cast<std::size_t>(n_max) + 1, 0)};
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const int n = samples[j];
        if (n < 0 || n > n_max) {
            std::ostringstream msg;
            msg << "sample " << j + 1 << ": count " << n << " outside [0, " << n_max << "]";
            throw DataError(msg.str(), j + 1);
        }
        ++h.counts[static_cast<std::size_t>(n)];
    }
    return h;
}

CalibrationResult calibrate(const Histogram& ref_bright, const Histogram& ref_dark, const ReadoutModel& known) {
    known.validate();
    const auto size = static_cast<std::size_t>(known.n_max) + 1;
    if (ref_bright.counts.size() != size || ref_dark.counts.size() != size)
        throw std::invalid_argument("reference histograms must span 0..n_max");
    if (ref_bright.total() == 0 || ref_dark.total() == 0)
        throw IdentifiabilityError("reference histogram is empty");
    if (ref_bright.occupied_bins() < 2 || ref_dark.occupied_bins() < 2)
        throw IdentifiabilityError("reference histogram occupies a single bin");
    if (!(ref_bright.mean() > ref_dark.mean()))
        throw IdentifiabilityError("bright reference is not brighter than dark reference");

    const double bg = known.lambda_bg;
    const double lb0 = std::max(0.5 * (ref_bright.mean() - bg), 1e-3);

    // Dark seed: low-count part gives lambda_dark, the bright tail gives the repump probability.
    const auto threshold = static_cast<std::size_t>(std::max(1.0, std::round(0.25 * lb0)));
    double low_shots = 0.0, low_sum = 0.0;
    for (std::size_t n = 0; n < std::min(threshold, size); ++n) {
        low_shots += static_cast<double>(ref_dark.counts[n]);
        low_sum += static_cast<double>(n) * static_cast<double>(ref_dark.counts[n]);
    }
    const double ld0 = low_shots > 0 ? std::max(0.5 * (low_sum / low_shots - bg), 1e-3) : 1e-3;
    const double high_frac = std::clamp(1.0 - low_shots / static_cast<double>(ref_dark.total()), 1e-4, 0.99);
    const double repumped = 1.0 - std::sqrt(1.0 - high_frac);
    const double gt0 = std::clamp(-std::log1p(-repumped), 1e-4, 10.0);

    auto model_at = [&](const Eigen::VectorXd& x) {
        ReadoutModel m = known;
        m.lambda_bright = std::exp(x[0]);
        m.lambda_dark = std::exp(x[1]);
        m.gamma = std::exp(x[2]) / known.t_detect;
        return m;
    };
    auto objective = [&](const Eigen::VectorXd& x) {
        if ((x.array().abs() > 50.0).any()) return std::numeric_limits<double>::infinity();
        const CompositeDists d = composite_dists(model_at(x));
        return -(log_likelihood(ref_bright, d[2]) + log_likelihood(ref_dark, d[0]));
    };

    CalibrationResult result;
    Eigen::VectorXd x(3);
    x << std::log(lb0), std::log(ld0), std::log(gt0);
    x = nelder_mead(objective, x, 0.3, 4000, result.evaluations);
    x = nelder_mead(objective, x, 0.05, 8000, result.evaluations);

    result.model = model_at(x);
    const CompositeDists d = composite_dists(result.model);
    result.log_likelihood = log_likelihood(ref_bright, d[2]) + log_likelihood(ref_dark, d[0]);
    result.deviance = g_statistic(ref_bright, d[2]) + g_statistic(ref_dark, d[0]);
    result.degrees_of_freedom =
        static_cast<int>(ref_bright.occupied_bins() - 1 + ref_dark.occupied_bins() - 1) - 3;
    return result;
}

FitResult ml_point_estimate(const Histogram& hist, const CompositeDists& dists, const FitOptions& options) {
    const std::size_t size = dists[0].p.size();
    if (hist.counts.size() != size) throw std::invalid_argument("histogram and distributions differ in n_max");
    const std::uint64_t total = hist.total();
    if (total == 0) throw DataError("no samples to fit");

    std::vector<std::size_t> bins;
    for (std::size_t n = 0; n < size; ++n)
        if (hist.counts[n] > 0) bins.push_back(n);

    FitResult fit;
    fit.n_samples = static_cast<std::size_t>(total);
    Populations c{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    const double inv_total = 1.0 / static_cast<double>(total);

    auto evaluate = [&](const Populations& cc, Populations* responsibilities) {
        double ll = 0.0;
        Populations r{0.0, 0.0, 0.0};
        for (std::size_t n : bins) {
            const double w = static_cast<double>(hist.counts[n]);
            const double terms[3] = {cc[0] * dists[0].p[n], cc[1] * dists[1].p[n], cc[2] * dists[2].p[n]};
            const double mix = terms[0] + terms[1] + terms[2];
            ll += w * std::log(std::max(mix, kLogFloor));
            if (responsibilities && mix > 0.0)
                for (std::size_t i = 0; i < 3; ++i) r[i] += w * terms[i] / mix;
        }
        if (responsibilities) *responsibilities = r;
        return ll;
    };

    Populations r;
    double ll = evaluate(c, &r);
    int it = 0;
    for (; it < options.max_iterations; ++it) {
        Populations next{r[0] * inv_total, r[1] * inv_total, r[2] * inv_total};
        const double norm = next[0] + next[1] + next[2];
        if (!(norm > 0.0)) throw DataError("samples have zero likelihood under every component");
        for (double& v : next) v /= norm;
        const double ll_next = evaluate(next, &r);
        double change = 0.0;
        for (std::size_t i = 0; i < 3; ++i) change = std::max(change, std::abs(next[i] - c[i]));
        c = next;
        const double gain = ll_next - ll;
        ll = ll_next;
        if (change < 1e-13 || (gain >= 0.0 && gain < options.tolerance && change < 1e-9)) break;
    }
    fit.c = c;
    fit.log_likelihood = ll;
    fit.iterations = it;
    return fit;
}

std::vector<Populations> bootstrap_populations(const Histogram& hist, const CompositeDists& dists,
                                               const FitOptions& options) {
    std::vector<Populations> out(static_cast<std::size_t>(std::max(options.bootstrap, 0)));
    const auto n = static_cast<std::ptrdiff_t>(out.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t r = 0; r < n; ++r)
        out[static_cast<std::size_t>(r)] = bootstrap_one(hist, dists, options, static_cast<std::uint64_t>(r));
    return out;
}

std::vector<Populations> bootstrap_populations_serial(const Histogram& hist, const CompositeDists& dists,
                                                      const FitOptions& options) {
    std::vector<Populations> out;
    for (int r = 0; r < options.bootstrap; ++r)
        out.push_back(bootstrap_one(hist, dists, options, static_cast<std::uint64_t>(r)));
    return out;
}

FitResult ml_fit(const Histogram& hist, const CompositeDists& dists, const FitOptions& options) {
    FitResult fit = ml_point_estimate(hist, dists, options);
    if (options.bootstrap < 2) return fit;

    const auto samples = bootstrap_populations(hist, dists, options);
    const double count = static_cast<double>(samples.size());
    Populations mean{0.0, 0.0, 0.0};
    double parity_mean = 0.0;
    for (const auto& s : samples) {
        for (std::size_t i = 0; i < 3; ++i) mean[i] += s[i] / count;
        parity_mean += parity_of(s) / count;
    }
    Populations var{0.0, 0.0, 0.0};
    double parity_var = 0.0;
    for (const auto& s : samples) {
        for (std::size_t i = 0; i < 3; ++i) var[i] += (s[i] - mean[i]) * (s[i] - mean[i]) / (count - 1.0);
        const double dp = parity_of(s) - parity_mean;
        parity_var += dp * dp / (count - 1.0);
    }
    for (std::size_t i = 0; i < 3; ++i) fit.standard_error[i] = std::sqrt(var[i]);
    fit.parity_standard_error = std::sqrt(parity_var);
    return fit;
}

FitResult ml_fit(std::span<const int> samples, const CompositeDists& dists, const FitOptions& options) {
    if (samples.empty()) throw DataError("no samples to fit");
    return ml_fit(histogram_of(samples, dists.n_max()), dists, options);
}

double parity_of(const Populations& c) { return c[0] + c[2] - c[1]; }

double parity_from_fit(const FitResult& fit) { return parity_of(fit.c); }

ParityScanResult parity_scan_analysis(const std::vector<ParityScanPoint>& scans, const CompositeDists& dists,
                                      const FitOptions& options) {
    std::set<double> distinct;
    for (const auto& s : scans) distinct.insert(s.phi);
    if (distinct.size() < 4) throw IdentifiabilityError("parity scan needs at least four distinct phases");

    ParityScanResult out;
    for (std::size_t k = 0; k < scans.size(); ++k) {
        FitOptions per_phase = options;
        per_phase.seed = splitmix64(options.seed + 0x1000 * (k + 1));
        const FitResult fit = ml_fit(std::span<const int>(scans[k].samples), dists, per_phase);
        out.phis.push_back(scans[k].phi);
        out.parities.push_back(parity_from_fit(fit));
        out.parity_errors.push_back(fit.parity_standard_error);
    }

    const auto rows = static_cast<Eigen::Index>(scans.size());
    Eigen::MatrixXd x(rows, 3);
    Eigen::VectorXd y(rows);
    for (Eigen::Index k = 0; k < rows; ++k) {
        const double phi = out.phis[static_cast<std::size_t>(k)];
        x(k, 0) = std::cos(2.0 * phi);
        x(k, 1) = std::sin(2.0 * phi);
        x(k, 2) = 1.0;
        y[k] = out.parities[static_cast<std::size_t>(k)];
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < 3) throw IdentifiabilityError("parity scan phases do not determine a period-pi sinusoid");
    const Eigen::Vector3d beta = qr.solve(y);

    out.amplitude = std::hypot(beta[0], beta[1]);
    out.phase = std::atan2(beta[1], beta[0]);
    out.offset = beta[2];
    // Fitted curve at phi = 0 and pi/2 is (a + B) and (-a + B); their mean is B.
    out.coherence_term = beta[2];

    // Propagate per-phase bootstrap errors through the unweighted solution.
    const Eigen::MatrixXd xtx_inv = (x.transpose() * x).inverse();
    Eigen::VectorXd sigma2(rows);
    for (Eigen::Index k = 0; k < rows; ++k) sigma2[k] = std::pow(out.parity_errors[static_cast<std::size_t>(k)], 2);
    const Eigen::MatrixXd cov = xtx_inv * x.transpose() * sigma2.asDiagonal() * x * xtx_inv;
    out.coherence_error = std::sqrt(std::max(cov(2, 2), 0.0));

    if (rows >= 5) {
        Eigen::MatrixXd x5(rows, 5);
        x5.leftCols(3) = x;
        for (Eigen::Index k = 0; k < rows; ++k) {
            x5(k, 3) = std::cos(out.phis[static_cast<std::size_t>(k)]);
            x5(k, 4) = std::sin(out.phis[static_cast<std::size_t>(k)]);
        }
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr5(x5);
        if (qr5.rank() == 5) {
            const Eigen::VectorXd b5 = qr5.solve(y);
            out.fundamental_amplitude = std::hypot(b5[3], b5[4]);
        }
    }
    return out;
}

std::vector<int> synthesize_shots(const Populations& c, const CompositeDists& dists, std::size_t n_shots,
                                  std::uint64_t seed) {
    double sum = 0.0;
    for (double v : c) {
        if (!(v >= 0.0) || v > 1.0 + 1e-12) throw std::invalid_argument("populations must lie in [0, 1]");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("populations must sum to 1");

    const std::vector<double> pick = cumulative_of({c[0], c[1], c[2]});
    std::array<std::vector<double>, 3> cdf;
    for (std::size_t i = 0; i < 3; ++i) cdf[i] = cumulative_of(dists[i].p);

    auto rng = stream_for(seed, 0);
    std::vector<int> shots;
    shots.reserve(n_shots);
    for (std::size_t s = 0; s < n_shots; ++s) {
        const std::size_t i = draw_index(pick, uniform01(rng) * pick.back());
        const auto& f = cdf[i];
        shots.push_back(static_cast<int>(draw_index(f, uniform01(rng) * f.back())));
    }
    return shots;
}

double total_variation(const CountDistribution& a, const CountDistribution& b) {
    require_same_support(a, b);
    double tv = 0.0;
    for (std::size_t n = 0; n < a.p.size(); ++n) tv += std::abs(a.p[n] - b.p[n]);
    return 0.5 * tv;
}

CountDistribution empirical(const Histogram& hist) {
    CountDistribution d{std::vector<double>(hist.counts.size(), 0.0)};
    const double total = static_cast<double>(hist.total());
    if (total == 0.0) throw DataError("empty histogram");
    for (std::size_t n = 0; n < d.p.size(); ++n) d.p[n] = static_cast<double>(hist.counts[n]) / total;
    return d;
}

}  // namespace dicke
