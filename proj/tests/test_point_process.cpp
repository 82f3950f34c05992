#include <doctest.h>

#include <cmath>
#include <random>

#include "cascadefuse/error.hpp"
#include "cascadefuse/log.hpp"
#include "cascadefuse/point_process.hpp"
#include "cascadefuse/quadrature.hpp"
#include "oracles.hpp"

using namespace cascadefuse;
using doctest::Approx;

namespace {

Post post(double t, double n) {
  Post p;
  p.t = t;
  p.followers = n;
  return p;
}

NewsStory make_story(std::vector<std::pair<double, double>> events) {
  NewsStory s{"s", Label::True, {}};
  for (auto [t, n] : events) s.posts.push_back(post(t, n));
  return s;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::IoError;
}

}  // namespace

TEST_SUITE("point_process") {
  TEST_CASE("memory kernel regimes") {
    CHECK(memory_kernel(60) == 6.27e-4);
    CHECK(memory_kernel(300) == 6.27e-4);
    CHECK(memory_kernel(600) == Approx(6.27e-4 * std::pow(2.0, -1.242)).epsilon(1e-14));
    CHECK(memory_kernel(600) == Approx(2.65e-4).epsilon(1e-3));
    CHECK(std::abs(memory_kernel(300 * (1 + 1e-13)) - memory_kernel(300)) < 1e-15);
    CHECK(code_of([] { memory_kernel(0); }) == ErrorCode::NonPositiveDelay);
    CHECK(code_of([] { memory_kernel(-5); }) == ErrorCode::NonPositiveDelay);
    CHECK(code_of([] { memory_kernel(1, KernelParams{0, 300, 0.2}); }) == ErrorCode::InvalidParams);
  }

  TEST_CASE("memory kernel is non-increasing") {
    double prev = memory_kernel(1e-3);
    for (double s = 1; s < 1e6; s *= 1.37) {
      const double v = memory_kernel(s);
      CHECK(v <= prev);
      prev = v;
    }
  }

  TEST_CASE("triangular kernel") {
    CHECK(triangular_kernel(1e-12, 100) == Approx(1.0));
    CHECK(triangular_kernel(50, 100) == 0);
    CHECK(triangular_kernel(25, 100) == Approx(0.5));
    CHECK(triangular_kernel(80, 100) == 0);
    CHECK(code_of([] { triangular_kernel(1, 0); }) == ErrorCode::NonPositiveWindow);
    const double area = testutil::simpson([](double s) { return triangular_kernel(s, 360); }, 0, 180, 2000);
    CHECK(area == Approx(90.0).epsilon(1e-12));
  }

  TEST_CASE("kernel_integral on the flat regime") {
    CHECK(kernel_integral(0, 200) == Approx(50 * 6.27e-4).epsilon(1e-13));
    CHECK(kernel_integral(0, 200) == Approx(3.135e-2).epsilon(1e-13));
    CHECK(kernel_integral(0, 200, KernelParams{1, 300, 0.242}) == Approx(50).epsilon(1e-13));
    // Independent check of the flat case with Simpson on the raw integrand.
    const double simpson = testutil::simpson(
        [](double s) { return triangular_kernel(200 - s + 1e-300, 200) * 6.27e-4; }, 0, 200, 20000);
    CHECK(kernel_integral(0, 200) == Approx(simpson).epsilon(1e-8));
  }

  TEST_CASE("kernel_integral matches adaptive quadrature") {
    const KernelParams p{};
    CHECK(kernel_integral(0, 7200, p) == Approx(testutil::kernel_integral_oracle(0, 7200, p)).epsilon(1e-9));
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 200; ++k) {
      const KernelParams q{std::exp(-10 + 8 * u(rng)), 10 + 1000 * u(rng), 0.05 + 1.5 * u(rng)};
      const double t = std::exp(std::log(1.0) + u(rng) * std::log(1e6));
      const double t_i = t * u(rng);
      const double oracle = testutil::kernel_integral_oracle(t_i, t, q);
      const double value = kernel_integral(t_i, t, q);
      INFO("t_i=" << t_i << " t=" << t << " c=" << q.c << " s0=" << q.s0 << " theta=" << q.theta);
      if (oracle == 0) CHECK(value == 0);
      else CHECK(std::abs(value - oracle) / oracle < 1e-9);
    }
  }

  TEST_CASE("kernel_integral edge cases") {
    // A 1e-9 s span under a ~50 s window: weight ~1, so the integral is ~c * span.
    CHECK(kernel_integral(100, 100 + 1e-9) == Approx(6.27e-4 * 1e-9).epsilon(1e-6));
    CHECK(kernel_integral(100, 100 + 1e-9) >= 0);
    CHECK(code_of([] { kernel_integral(5, 5); }) == ErrorCode::InvalidInterval);
    CHECK(code_of([] { kernel_integral(6, 5); }) == ErrorCode::InvalidInterval);
    // Short power-law pieces near the s0 boundary stay accurate.
    const KernelParams p{};
    for (double span : {300.0, 300.5, 301.0, 310.0, 330.0, 600.0, 620.0})
      for (double t : {span, span * 1.2, span * 1.9, span * 2.0, span * 2.05, span * 10})
        CHECK(kernel_integral(t - span, t, p) ==
              Approx(testutil::kernel_integral_oracle(t - span, t, p)).epsilon(1e-9));
  }

  TEST_CASE("intensity") {
    const auto one = make_story({{0, 100}});
    CHECK(intensity(one, 0.5, 60).lambda == Approx(3.135e-2).epsilon(1e-14));
    CHECK(intensity(one, 0.0, 60).lambda == 0);
    const auto two = make_story({{0, 100}, {300, 50}});
    const double hand = 100 * 6.27e-4 * std::pow(1.2, -1.242) + 50 * 6.27e-4;
    CHECK(intensity(two, 1.0, 360).lambda == Approx(hand).epsilon(1e-14));
    CHECK(intensity(two, 1.0, 360).at_time == 360);
    // A post exactly at t contributes through phi(0+) = c.
    CHECK(intensity(two, 1.0, 300).lambda == Approx(100 * 6.27e-4 + 50 * 6.27e-4).epsilon(1e-14));
    CHECK(code_of([&] { intensity(two, 1.0, -1); }) == ErrorCode::TimeBeforeOrigin);
  }

  TEST_CASE("estimator examples") {
    const KernelParams p{};
    CHECK(estimate_infectiousness(make_story({{0, 1000}}), 3600) == 0);
    // The reshare at 1800 s sits outside the one-sided window of t = 7200 s (t/2 = 3600 s back).
    CHECK(estimate_infectiousness(make_story({{0, 1000}, {1800, 10}}), 7200) == 0);
    const double t = 3000;
    const double numerator = 1 - 2 * (t - 1800) / t;
    const double denominator = 1000 * testutil::kernel_integral_oracle(0, t, p) +
                               10 * testutil::kernel_integral_oracle(1800, t, p);
    CHECK(estimate_infectiousness(make_story({{0, 1000}, {1800, 10}}), t) ==
          Approx(numerator / denominator).epsilon(1e-9));
    CHECK(code_of([] { estimate_infectiousness(make_story({{0, 0}, {80, 0}}), 100); }) == ErrorCode::ZeroDenominator);
    CHECK(code_of([] { estimate_infectiousness(make_story({{0, 10}}), 0); }) == ErrorCode::NonPositiveTime);
  }

  TEST_CASE("estimator is scale covariant in followers") {
    std::mt19937_64 rng(5);
    std::exponential_distribution<double> gap(1.0 / 200);
    std::uniform_real_distribution<double> n(1, 500);
    NewsStory s{"s", Label::True, {post(0, 1000)}};
    for (int i = 0; i < 300; ++i) s.posts.push_back(post(s.posts.back().t + gap(rng), std::round(n(rng))));
    NewsStory scaled = s;
    for (auto& p : scaled.posts) p.followers *= 7.5;
    for (double h = 1; h <= 16; ++h) {
      const double a = estimate_infectiousness(s, h * 3600);
      const double b = estimate_infectiousness(scaled, h * 3600);
      CHECK(b * 7.5 == Approx(a).epsilon(1e-12));
    }
  }

  TEST_CASE("infectiousness_series") {
    const auto source_only = make_story({{0, 10}});
    const auto series = infectiousness_series(source_only, hourly_grid());
    CHECK(series.values.size() == 47);
    CHECK(series.grid_hours.front() == 1);
    CHECK(series.grid_hours.back() == 47);
    for (double v : series.values) CHECK(v == 0);
    CHECK(code_of([&] { infectiousness_series(source_only, {}); }) == ErrorCode::EmptyGrid);
    CHECK(code_of([&] { infectiousness_series(source_only, {2, 1}); }) == ErrorCode::InvalidParams);
    CHECK(code_of([&] { infectiousness_series(source_only, {0, 1}); }) == ErrorCode::InvalidParams);

    // A zero exposure degrades to 0 with a warning.
    set_warnings_enabled(false);
    const auto before = warning_count();
    const auto silent = infectiousness_series(make_story({{0, 0}, {3000, 0}}), {1, 2});
    CHECK(silent.values == std::vector<double>{0, 0});
    CHECK(warning_count() > before);
    set_warnings_enabled(true);

    for (std::size_t d = 1; d <= 6; ++d) CHECK(grid_for_days(d).size() == 24 * d - 1);
    CHECK(grid_for_days(2) == hourly_grid(47));
    CHECK(grid_for_days(0).empty());
  }

  TEST_CASE("post_count_series") {
    const auto s = make_story({{0, 1}, {1800, 1}, {5400, 1}});
    CHECK(post_count_series(s, {1, 2}) == std::vector<double>{2, 1});
    CHECK(post_count_series(make_story({{0, 1}}), {1, 2, 3}) == std::vector<double>{1, 0, 0});
    const auto edge = make_story({{0, 1}, {3600, 1}, {3600.5, 1}, {7200, 1}, {90000, 1}});
    const auto counts = post_count_series(edge, hourly_grid(3));
    CHECK(counts == std::vector<double>{2, 2, 0});
    double total = 0;
    for (double c : post_count_series(edge, hourly_grid(47))) total += c;
    CHECK(total == 5);
    CHECK(code_of([&] { post_count_series(edge, {}); }) == ErrorCode::EmptyGrid);
  }

  TEST_CASE("gauss-legendre rule integrates polynomials exactly") {
    const auto rule = make_gauss_legendre(8);
    const double v = integrate_fixed(rule, [](double x) { return std::pow(x, 15) + 3 * x * x; }, 0.0, 2.0);
    CHECK(v == Approx(std::pow(2.0, 16) / 16 + 8).epsilon(1e-13));
  }
}
