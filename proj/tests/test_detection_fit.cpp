#include <doctest.h>

#include <cmath>
#include <random>

#include "dicke/detection_fit.hpp"
#include "dicke/errors.hpp"

using namespace dicke;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Poisson pmf on 0..n_max with the tail in the last bin, by direct recursion.
std::vector<double> poisson_oracle(double mean, int n_max) {
    std::vector<double> p(static_cast<std::size_t>(n_max) + 1);
    double term = std::exp(-mean), cum = 0.0;
    for (int n = 0; n < n_max; ++n) {
        p[static_cast<std::size_t>(n)] = term;
        cum += term;
        term *= mean / (n + 1);
    }
    p.back() = std::max(0.0, 1.0 - cum);
    return p;
}

// Dark-ion counts integrated over the decay-time CDF u = 1 - e^{-gamma tau}
// with a fine midpoint rule.
std::vector<double> dark_oracle(const ReadoutModel& m) {
    const double gt = m.gamma * m.t_detect;
    std::vector<double> out = poisson_oracle(m.lambda_dark, m.n_max);
    for (double& v : out) v *= std::exp(-gt);
    const int steps = 100000;
    const double u_max = -std::expm1(-gt), h = u_max / steps;
    for (int k = 0; k < steps; ++k) {
        const double f = -std::log1p(-(k + 0.5) * h) / gt;
        const auto p = poisson_oracle(m.lambda_dark * f + m.lambda_bright * (1 - f), m.n_max);
        for (std::size_t n = 0; n < p.size(); ++n) out[n] += h * p[n];
    }
    return out;
}

// Rao-Blackwellised Monte Carlo: average exact Poisson pmfs over sampled decay times.
std::vector<double> dark_monte_carlo(const ReadoutModel& m, int samples, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::exponential_distribution<double> decay(m.gamma);
    std::vector<double> out(static_cast<std::size_t>(m.n_max) + 1, 0.0);
    for (int s = 0; s < samples; ++s) {
        const double tau = std::min(decay(rng), m.t_detect);
        const double f = tau / m.t_detect;
        const auto p = poisson_oracle(m.lambda_dark * f + m.lambda_bright * (1 - f), m.n_max);
        for (std::size_t n = 0; n < p.size(); ++n) out[n] += p[n] / samples;
    }
    return out;
}

double tv(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
    return 0.5 * s;
}

Histogram expected_histogram(const CountDistribution& d, double shots) {
    Histogram h;
    for (double p : d.p) h.counts.push_back(static_cast<std::uint64_t>(std::llround(p * shots)));
    return h;
}

}  // namespace

TEST_CASE("Poisson distributions fold the tail into the last bin") {
    for (double mean : {0.0, 0.2, 3.0, 30.0, 120.0}) {
        const CountDistribution d = poisson_dist(mean, 100);
        CHECK_NOTHROW(d.validate());
        CHECK(tv(d.p, poisson_oracle(mean, 100)) < 1e-12);
    }
    CHECK(poisson_dist(30.0).mean() == doctest::Approx(30.0).epsilon(1e-9));
    CHECK_THROWS_AS(poisson_dist(-1.0), std::invalid_argument);
}

TEST_CASE("convolving Poissons adds their means") {
    for (auto [a, b] : {std::pair{0.2, 0.3}, std::pair{30.0, 0.5}, std::pair{60.0, 45.0}}) {
        const CountDistribution c = convolve(poisson_dist(a), poisson_dist(b));
        CHECK(tv(c.p, poisson_oracle(a + b, 100)) < 1e-12);
        CHECK_NOTHROW(c.validate());
    }
    const CountDistribution d = convolve(poisson_dist(4.0), CountDistribution::delta(100));
    CHECK(tv(d.p, poisson_oracle(4.0, 100)) < 1e-15);
}

TEST_CASE("dark-ion distribution matches direct integration and Monte Carlo") {
    for (double gt : {0.01, 0.1, 1.0, 5.0, 50.0, 2000.0}) {
        ReadoutModel m;
        m.gamma = gt / m.t_detect;
        CAPTURE(gt);
        const CountDistribution d = dark_ion_dist(m);
        CHECK_NOTHROW(d.validate(1e-12));
        CHECK(tv(d.p, dark_oracle(m)) < 1e-6);
    }
    const ReadoutModel m;
    CHECK(tv(dark_ion_dist(m).p, dark_monte_carlo(m, 200000, 42)) < 2e-3);
}

TEST_CASE("no repumping leaves a plain Poisson for the dark ion") {
    ReadoutModel m;
    m.gamma = 0.0;
    CHECK(tv(dark_ion_dist(m).p, poisson_oracle(m.lambda_dark, m.n_max)) < 1e-15);
}

TEST_CASE("composite distributions and mixtures are normalised and ordered by brightness") {
    const CompositeDists d = composite_dists(ReadoutModel{});
    for (std::size_t i = 0; i < 3; ++i) CHECK_NOTHROW(d[i].validate(1e-9));
    CHECK(d[0].mean() < d[1].mean());
    CHECK(d[1].mean() < d[2].mean());
    CHECK(d[2].mean() == doctest::Approx(60.2).epsilon(1e-6));
    const CountDistribution mix = mixture(d, {0.08, 0.80, 0.12});
    CHECK_NOTHROW(mix.validate(1e-9));
    CHECK(mix.mean() == doctest::Approx(0.08 * d[0].mean() + 0.8 * d[1].mean() + 0.12 * d[2].mean()));
}

TEST_CASE("synthesized shots follow the mixture and are reproducible") {
    const CompositeDists d = composite_dists(ReadoutModel{});
    const Populations c{0.08, 0.80, 0.12};
    const auto shots = synthesize_shots(c, d, 200000, 7);
    CHECK(shots == synthesize_shots(c, d, 200000, 7));
    CHECK(shots != synthesize_shots(c, d, 200000, 8));
    CHECK(total_variation(empirical(histogram_of(shots)), mixture(d, c)) < 0.02);
    CHECK_THROWS_AS(synthesize_shots({0.5, 0.6, 0.1}, d, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS(synthesize_shots({-0.1, 0.6, 0.5}, d, 10, 1), std::invalid_argument);
}

TEST_CASE("ML fit recovers populations from an expected histogram") {
    const CompositeDists d = composite_dists(ReadoutModel{});
    for (Populations c : {Populations{0.08, 0.80, 0.12}, Populations{1.0, 0.0, 0.0}, Populations{0.3, 0.3, 0.4}}) {
        const FitResult r = ml_point_estimate(expected_histogram(mixture(d, c), 1e7), d);
        for (std::size_t i = 0; i < 3; ++i) CHECK(std::abs(r.c[i] - c[i]) < 2e-3);
        CHECK(r.c[0] + r.c[1] + r.c[2] == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("ML fit on 10^4 shots at the operating point") {
    const CompositeDists d = composite_dists(ReadoutModel{});
    const Populations c{0.08, 0.80, 0.12};
    FitOptions opts;
    opts.bootstrap = 100;
    int passes = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto shots = synthesize_shots(c, d, 10000, seed);
        const FitResult r = ml_fit(std::span<const int>(shots), d, opts);
        bool ok = true;
        for (std::size_t i = 0; i < 3; ++i) ok = ok && std::abs(r.c[i] - c[i]) < 0.02;
        passes += ok;
        CHECK(r.n_samples == 10000);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(r.standard_error[i] > 0.0);
            CHECK(r.standard_error[i] < 0.02);
        }
        // The optimum beats the generating populations.
        const Histogram h = histogram_of(shots);
        double ll_true = 0;
        const CountDistribution mix = mixture(d, c);
        for (std::size_t n = 0; n < h.counts.size(); ++n) ll_true += h.counts[n] * std::log(mix.p[n]);
        CHECK(r.log_likelihood >= ll_true - 1e-9);
    }
    CHECK(passes >= 9);
}

TEST_CASE("bootstrap: parallel matches the serial reference and depends only on the seed") {
    const CompositeDists d = composite_dists(ReadoutModel{});
    const auto shots = synthesize_shots({0.2, 0.5, 0.3}, d, 3000, 3);
    const Histogram h = histogram_of(shots);
    FitOptions o;
    o.bootstrap = 40;
    const auto a = bootstrap_populations(h, d, o);
    const auto b = bootstrap_populations_serial(h, d, o);
    REQUIRE(a.size() == 40);
    for (std::size_t r = 0; r < a.size(); ++r) CHECK(a[r] == b[r]);
    CHECK(ml_fit(h, d, o).standard_error == ml_fit(h, d, o).standard_error);
}

TEST_CASE("parity of fitted populations") {
    CHECK(parity_of({0.08, 0.80, 0.12}) == doctest::Approx(-0.6));
    FitResult r;
    r.c = {1.0, 0.0, 0.0};
    CHECK(parity_from_fit(r) == doctest::Approx(1.0));
}

TEST_CASE("parity scan recovers a 2 phi oscillation and its offset") {
    const CompositeDists d = composite_dists(ReadoutModel{});
    const double amp = 0.6, off = 0.1, phase = 0.4;
    std::vector<ParityScanPoint> pts;
    for (int k = 0; k < 16; ++k) {
        const double phi = 2 * kPi * k / 16;
        const double parity = amp * std::cos(2 * phi - phase) + off;
        // Put all odd weight in c1, split the even weight evenly.
        const double c1 = 0.5 * (1 - parity);
        pts.push_back({phi, synthesize_shots({0.5 * (1 - c1), c1, 0.5 * (1 - c1)}, d, 20000, 100 + k)});
    }
    FitOptions o;
    o.bootstrap = 50;
    const ParityScanResult r = parity_scan_analysis(pts, d, o);
    CHECK(r.amplitude == doctest::Approx(amp).epsilon(0.05));
    CHECK(r.offset == doctest::Approx(off).epsilon(0.03));
    CHECK(std::abs(r.fundamental_amplitude) < 0.03);
    CHECK(r.coherence_error > 0.0);
    CHECK(r.coherence_term == doctest::Approx(0.5 * (amp * std::cos(phase) + off + amp * std::cos(kPi - phase) + off))
                                  .epsilon(0.03));
    pts.resize(3);
    CHECK_THROWS_AS(parity_scan_analysis(pts, d, o), IdentifiabilityError);
}

TEST_CASE("calibration recovers the readout model from bright and dark references") {
    ReadoutModel truth;
    const CompositeDists d = composite_dists(truth);
    const Histogram bright = histogram_of(synthesize_shots({0, 0, 1}, d, 100000, 21));
    const Histogram dark = histogram_of(synthesize_shots({1, 0, 0}, d, 100000, 22));
    const CalibrationResult r = calibrate(bright, dark, truth);
    CHECK(r.model.lambda_bright == doctest::Approx(truth.lambda_bright).epsilon(0.01));
    CHECK(r.model.lambda_dark == doctest::Approx(truth.lambda_dark).epsilon(0.15));
    CHECK(r.model.gamma == doctest::Approx(truth.gamma).epsilon(0.15));
    CHECK(r.model.lambda_bg == truth.lambda_bg);
    CHECK(r.deviance >= 0.0);

    CHECK_THROWS_AS(calibrate(Histogram{std::vector<std::uint64_t>(101, 0)}, dark, truth), IdentifiabilityError);
    CHECK_THROWS_AS(calibrate(dark, bright, truth), IdentifiabilityError);
    Histogram single{std::vector<std::uint64_t>(101, 0)};
    single.counts[0] = 500;
    CHECK_THROWS_AS(calibrate(bright, single, truth), IdentifiabilityError);
}

TEST_CASE("bad data is reported") {
    const std::vector<int> bad{3, 4, 101};
    try {
        histogram_of(bad);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(e.line() == 3);
    }
    CHECK_THROWS_AS(ml_fit(std::span<const int>(), composite_dists(ReadoutModel{})), DataError);
    ReadoutModel m;
    m.lambda_bright = -1;
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("Poisson special cases") {
    const CountDistribution zero = poisson_dist(0.0);
    CHECK(zero.p[0] == 1.0);
    const CountDistribution ten = poisson_dist(10.0);
    const auto mode = std::max_element(ten.p.begin(), ten.p.end()) - ten.p.begin();
    CHECK((mode == 9 || mode == 10));
    double s = 0;
    for (double v : poisson_dist(30.0, 100).p) s += v;
    CHECK(std::abs(s - 1.0) < 1e-12);
}

TEST_CASE("convolution algebra") {
    const CountDistribution a = poisson_dist(2.0), b = dark_ion_dist(ReadoutModel{}), c = poisson_dist(25.0);
    CHECK(tv(convolve(a, b).p, convolve(b, a).p) < 1e-12);
    CHECK(tv(convolve(convolve(a, b), c).p, convolve(a, convolve(b, c)).p) < 1e-12);
    CHECK(convolve(a, c).mean() == doctest::Approx(a.mean() + c.mean()).epsilon(1e-10));
}

TEST_CASE("fast repumping approaches the bright-ion distribution") {
    ReadoutModel m;
    double previous = 1.0;
    for (double gt : {1.0, 10.0, 1e3, 1e5}) {
        m.gamma = gt / m.t_detect;
        const double d = tv(dark_ion_dist(m).p, poisson_oracle(m.lambda_bright, m.n_max));
        CHECK(d < previous);
        previous = d;
    }
    CHECK(previous < 1e-4);
}

TEST_CASE("Monte-Carlo oracle at gamma T = 1 with 10^6 decay times") {
    ReadoutModel m;
    m.lambda_dark = 0.2;
    m.gamma = 1.0 / m.t_detect;
    const auto mc_dark = dark_monte_carlo(m, 1000000, 99);
    CHECK(tv(dark_ion_dist(m).p, mc_dark) < 2e-3);
    // One bright and one dark ion plus background.
    std::vector<double> mc_one(static_cast<std::size_t>(m.n_max) + 1, 0.0);
    const CountDistribution bg = poisson_dist(m.lambda_bg, m.n_max), bright = bright_ion_dist(m);
    const CountDistribution mc = convolve(convolve(bg, bright), CountDistribution{mc_dark});
    CHECK(tv(composite_dists(m)[1].p, mc.p) < 2e-3);
}

TEST_CASE("all rates zero gives a point mass at zero") {
    ReadoutModel m;
    m.lambda_bright = m.lambda_dark = m.lambda_bg = 0.0;
    const CompositeDists d = composite_dists(m);
    for (std::size_t i = 0; i < 3; ++i) CHECK(d[i].p[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("calibration round trip over repump rates") {
    for (double gt : {0.05, 0.1, 0.5}) {
        CAPTURE(gt);
        ReadoutModel truth;
        truth.gamma = gt / truth.t_detect;
        const CompositeDists d = composite_dists(truth);
        const Histogram bright = histogram_of(synthesize_shots({0, 0, 1}, d, 100000, 31));
        const Histogram dark = histogram_of(synthesize_shots({1, 0, 0}, d, 100000, 32));
        const CalibrationResult r = calibrate(bright, dark, truth);
        CHECK(r.model.lambda_bright == doctest::Approx(truth.lambda_bright).epsilon(0.02));
        CHECK(r.model.lambda_dark == doctest::Approx(truth.lambda_dark).epsilon(0.02));
        CHECK(r.model.gamma == doctest::Approx(truth.gamma).epsilon(0.10));
    }
}

TEST_CASE("generative round trips") {
    const CompositeDists d = composite_dists(ReadoutModel{});
    FitOptions o;
    o.bootstrap = 0;
    const auto one = synthesize_shots({0, 1, 0}, d, 100000, 41);
    CHECK(ml_fit(std::span<const int>(one), d, o).c[1] >= 0.99);
    const std::vector<int> zeros(500, 0);
    CHECK(ml_fit(std::span<const int>(zeros), d, o).c[0] > 0.99);
    CHECK(synthesize_shots({0.2, 0.3, 0.5}, d, 0, 1).empty());
    const auto dark = synthesize_shots({1, 0, 0}, d, 100000, 42);
    CHECK(total_variation(empirical(histogram_of(dark)), d[0]) < 0.01);
}

TEST_CASE("ML error shrinks like one over root n") {
    const CompositeDists d = composite_dists(ReadoutModel{});
    const Populations c{0.08, 0.80, 0.12};
    FitOptions o;
    o.bootstrap = 0;
    std::vector<double> rms;
    for (std::size_t n : {1000u, 10000u, 100000u}) {
        double s = 0;
        const int trials = 20;
        for (int t = 0; t < trials; ++t) {
            const auto shots = synthesize_shots(c, d, n, 500 + t);
            const FitResult r = ml_fit(std::span<const int>(shots), d, o);
            s += std::pow(r.c[1] - c[1], 2);
        }
        rms.push_back(std::sqrt(s / trials));
    }
    CHECK(rms[0] / rms[1] == doctest::Approx(std::sqrt(10.0)).epsilon(0.5));
    CHECK(rms[1] / rms[2] == doctest::Approx(std::sqrt(10.0)).epsilon(0.5));
}
