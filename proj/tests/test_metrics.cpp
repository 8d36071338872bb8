#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "zbias/metrics.hpp"
#include "zbias/rng.hpp"

using zbias::DiscreteDistribution;
using zbias::SplitMix64;

namespace {

double simpson(const std::function<double(double)>& f, double a, double b) {
    double m = 0.5 * (a + b);
    return (b - a) / 6.0 * (f(a) + 4.0 * f(m) + f(b));
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int depth) {
    double m = 0.5 * (a + b);
    double whole = simpson(f, a, b);
    double left = simpson(f, a, m);
    double right = simpson(f, m, b);
    if (depth <= 0 || std::abs(left + right - whole) < 15.0 * tol) {
        return left + right + (left + right - whole) / 15.0;
    }
    return adaptive_simpson(f, a, m, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, 0.5 * tol, depth - 1);
}

// Independent W1 oracle: numerically integrate |F_law - Phi| over the real
// line, splitting at the atoms where the law's CDF jumps.
double w1_quadrature_oracle(const DiscreteDistribution& law) {
    const auto& v = law.values();
    const auto& p = law.probs();
    const double lo = std::min(v.front(), -14.0);
    const double hi = std::max(v.back(), 14.0);
    std::vector<double> cuts;
    cuts.push_back(lo);
    for (double x : v) cuts.push_back(x);
    cuts.push_back(hi);
    double total = 0.0;
    double cum = 0.0;
    std::size_t atom = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (i > 0) cum += p[atom++];
        double level = cum;
        auto integrand = [&](double x) { return std::abs(level - zbias::normal_cdf(x)); };
        total += adaptive_simpson(integrand, cuts[i], cuts[i + 1], 1e-10, 48);
    }
    return total;
}

DiscreteDistribution fair_pm1() {
    return DiscreteDistribution({-1.0, 1.0}, {0.5, 0.5});
}

}  // namespace

TEST_CASE("normal cdf matches frozen high precision values") {
    struct Row {
        double x;
        double phi;
    };
    const Row rows[] = {
        {0.0, 0.5},
        {1.0, 0.8413447460685429486},
        {-1.0, 0.1586552539314570514},
        {2.0, 0.9772498680518207928},
        {-2.0, 0.0227501319481792072},
        {3.0, 0.9986501019683699055},
        {-3.0, 0.0013498980316300945},
        {0.5, 0.6914624612740131036},
        {-5.0, 2.8665157187919391167e-07},
        {6.0, 0.9999999990134123550},
    };
    for (const auto& row : rows) {
        REQUIRE(zbias::normal_cdf(row.x) == Catch::Approx(row.phi).margin(1e-12).epsilon(0));
    }
    REQUIRE(std::abs(zbias::normal_cdf(1.959963985) - 0.975) <= 1e-9);
}

TEST_CASE("normal pdf basics") {
    REQUIRE(zbias::normal_pdf(0.0) == Catch::Approx(0.39894228040143268).margin(1e-15).epsilon(0));
    REQUIRE(zbias::normal_pdf(1.0) == Catch::Approx(zbias::normal_pdf(-1.0)).margin(0.0).epsilon(0));
}

TEST_CASE("normal quantile inverts the cdf") {
    for (double x = -6.0; x <= 6.0 + 1e-9; x += 0.125) {
        double p = zbias::normal_cdf(x);
        // Rounding p to a double already perturbs the exact quantile by up to
        // ulp(p) / (2 pdf(x)); allow that on top of the solver tolerance.
        double limit = 1e-9 + (std::nextafter(p, 2.0) - p) / zbias::normal_pdf(x);
        REQUIRE(std::abs(zbias::normal_quantile(p) - x) <= limit);
    }
    for (double p : {1e-12, 1e-6, 0.02425, 0.3, 0.5, 0.7, 0.97575, 1.0 - 1e-6}) {
        REQUIRE(zbias::normal_cdf(zbias::normal_quantile(p)) == Catch::Approx(p).epsilon(1e-11));
    }
    REQUIRE(zbias::normal_quantile(0.5) == Catch::Approx(0.0).margin(1e-15).epsilon(0));
    REQUIRE_THROWS_AS(zbias::normal_quantile(0.0), std::domain_error);
    REQUIRE_THROWS_AS(zbias::normal_quantile(1.0), std::domain_error);
    REQUIRE_THROWS_AS(zbias::normal_quantile(-0.1), std::domain_error);
    REQUIRE_THROWS_AS(zbias::normal_quantile(1.5), std::domain_error);
}

TEST_CASE("discrete distribution validation") {
    REQUIRE_THROWS_AS(DiscreteDistribution({1.0, 0.0}, {0.5, 0.5}), std::invalid_argument);
    REQUIRE_THROWS_AS(DiscreteDistribution({0.0, 0.0}, {0.5, 0.5}), std::invalid_argument);
    REQUIRE_THROWS_AS(DiscreteDistribution({0.0, 1.0}, {0.7, 0.7}), std::invalid_argument);
    REQUIRE_THROWS_AS(DiscreteDistribution({0.0, 1.0}, {-0.1, 1.1}), std::invalid_argument);
    REQUIRE_THROWS_AS(DiscreteDistribution({}, {}), std::invalid_argument);

    auto law = DiscreteDistribution::from_atoms({{1.0, 0.25}, {-1.0, 0.5}, {1.0, 0.25}});
    REQUIRE(law.size() == 2);
    REQUIRE(law.values()[0] == -1.0);
    REQUIRE(law.probs()[0] == 0.5);
    REQUIRE(law.probs()[1] == 0.5);
    REQUIRE(law.mean() == Catch::Approx(0.0).margin(1e-15).epsilon(0));
    REQUIRE(law.variance() == Catch::Approx(1.0).margin(1e-15).epsilon(0));
    REQUIRE(law.cdf(-1.0) == 0.5);
    REQUIRE(law.cdf(0.99) == 0.5);
    REQUIRE(law.cdf(1.0) == 1.0);
}

TEST_CASE("discrete distribution sampling hits atom frequencies") {
    auto law = DiscreteDistribution({-2.0, 0.0, 3.0}, {0.2, 0.5, 0.3});
    SplitMix64 rng(20260818);
    const int n = 200000;
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) {
        double x = law.sample(rng);
        if (x == -2.0) ++counts[0];
        else if (x == 0.0) ++counts[1];
        else ++counts[2];
    }
    REQUIRE(std::abs(counts[0] / double(n) - 0.2) < 0.005);
    REQUIRE(std::abs(counts[1] / double(n) - 0.5) < 0.005);
    REQUIRE(std::abs(counts[2] / double(n) - 0.3) < 0.005);
}

TEST_CASE("w1_exact of a point mass at zero is the normal mean absolute value") {
    auto law = DiscreteDistribution({0.0}, {1.0});
    auto report = zbias::w1_exact(law);
    REQUIRE(report.method == zbias::W1Method::exact);
    REQUIRE(report.value == Catch::Approx(std::sqrt(2.0 / M_PI)).margin(1e-8).epsilon(0));
    REQUIRE_FALSE(report.stderr_estimate.has_value());
}

TEST_CASE("w1_exact matches an independent quadrature oracle") {
    auto fair = fair_pm1();
    double exact = zbias::w1_exact(fair).value;
    REQUIRE(exact == Catch::Approx(0.5353773215478798).margin(1e-10).epsilon(0));
    REQUIRE(exact == Catch::Approx(w1_quadrature_oracle(fair)).margin(1e-6).epsilon(0));

    auto skewed = DiscreteDistribution({-0.75, 0.25, 2.0}, {0.4, 0.45, 0.15});
    REQUIRE(zbias::w1_exact(skewed).value ==
            Catch::Approx(w1_quadrature_oracle(skewed)).margin(1e-6).epsilon(0));

    auto wide = DiscreteDistribution({-3.0, -1.0, 0.5, 1.0, 4.0}, {0.1, 0.3, 0.3, 0.2, 0.1});
    REQUIRE(zbias::w1_exact(wide).value == Catch::Approx(w1_quadrature_oracle(wide)).margin(1e-6).epsilon(0));

    auto mass_far = DiscreteDistribution({5.0}, {1.0});
    REQUIRE(zbias::w1_exact(mass_far).value ==
            Catch::Approx(w1_quadrature_oracle(mass_far)).margin(1e-6).epsilon(0));
}

TEST_CASE("w1_exact is invariant under reflection of the law") {
    auto skewed = DiscreteDistribution({-0.75, 0.25, 2.0}, {0.4, 0.45, 0.15});
    auto mirrored = DiscreteDistribution({-2.0, -0.25, 0.75}, {0.15, 0.45, 0.4});
    REQUIRE(zbias::w1_exact(skewed).value ==
            Catch::Approx(zbias::w1_exact(mirrored).value).margin(1e-10).epsilon(0));
}

TEST_CASE("w1_exact shift lower bound") {
    auto base = fair_pm1();
    auto shifted = DiscreteDistribution({2.0, 4.0}, {0.5, 0.5});
    double d0 = zbias::w1_exact(base).value;
    double d3 = zbias::w1_exact(shifted).value;
    REQUIRE(d3 >= 3.0 - d0 - 1e-12);
    REQUIRE(d3 >= d0);
}

TEST_CASE("w1_empirical requires enough samples") {
    SplitMix64 rng(7);
    std::vector<double> tiny(99, 0.0);
    REQUIRE_THROWS_AS(zbias::w1_empirical(tiny, rng), std::invalid_argument);
}

TEST_CASE("w1_empirical is small for genuine normal draws") {
    SplitMix64 rng(123456789);
    const std::size_t n = 100000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = zbias::normal_quantile(rng.next_double_open());
    SplitMix64 boot_rng(42);
    auto report = zbias::w1_empirical(xs, boot_rng);
    REQUIRE(report.method == zbias::W1Method::empirical);
    REQUIRE(report.sample_count == n);
    REQUIRE(report.value >= 0.0);
    REQUIRE(report.value <= 0.02);
    REQUIRE(report.stderr_estimate.has_value());
    REQUIRE(*report.stderr_estimate > 0.0);
    REQUIRE(*report.stderr_estimate < 0.01);
}

TEST_CASE("w1_empirical ignores input order") {
    SplitMix64 rng(55);
    std::vector<double> xs(500);
    for (auto& x : xs) x = 3.0 * rng.next_double() - 1.5;
    std::vector<double> reversed(xs.rbegin(), xs.rend());
    SplitMix64 b1(9), b2(9);
    auto r1 = zbias::w1_empirical(xs, b1);
    auto r2 = zbias::w1_empirical(reversed, b2);
    REQUIRE(r1.value == r2.value);
}

TEST_CASE("w1_empirical agrees with w1_exact on a two point law") {
    auto law = fair_pm1();
    SplitMix64 rng(987654321);
    const std::size_t n = 100000;
    std::vector<double> xs(n);
    for (auto& x : xs) x = law.sample(rng);
    SplitMix64 boot_rng(101);
    auto emp = zbias::w1_empirical(xs, boot_rng);
    double exact = zbias::w1_exact(law).value;
    REQUIRE(std::abs(emp.value - exact) <= 3.0 * *emp.stderr_estimate);
}

TEST_CASE("ks statistic basics") {
    REQUIRE_THROWS_AS(zbias::ks_statistic({}, zbias::normal_cdf), std::invalid_argument);
    std::vector<double> degenerate(10, 0.0);
    REQUIRE(zbias::ks_statistic(degenerate, zbias::normal_cdf) == Catch::Approx(0.5).margin(1e-12).epsilon(0));
    SplitMix64 rng(2024);
    std::vector<double> xs(20000);
    for (auto& x : xs) x = zbias::normal_quantile(rng.next_double_open());
    REQUIRE(zbias::ks_statistic(xs, zbias::normal_cdf) < 0.015);
}
