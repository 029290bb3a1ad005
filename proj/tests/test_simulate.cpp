#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dcp/errors.hpp"
#include "dcp/rng.hpp"
#include "dcp/simulate.hpp"

using namespace dcp;

namespace {

JumpDensityModel test_mixture() {
    return JumpDensityModel({
        MixtureComponent{GaussianComponent{0.0, 1.0}, 0.95},
        MixtureComponent{LaplaceComponent{1.0, 0.1}, 0.05},
    });
}

}  // namespace

TEST_CASE("density_eval hand values") {
    const auto mixture = test_mixture();
    CHECK(density_eval(mixture, 1.0) == doctest::Approx(0.4798721882931862).epsilon(1e-12));
    CHECK(density_eval(JumpDensityModel::gaussian(0.0, 1.0), 0.0) ==
          doctest::Approx(0.3989422804014327).epsilon(1e-12));
    CHECK(density_eval(mixture, 50.0) < 1e-12);
    CHECK(density_eval(mixture, -50.0) < 1e-12);
}

TEST_CASE("mixture density is nonnegative and integrates to one") {
    const auto mixture = test_mixture();
    const double step = 1e-4;
    double integral = 0.0;
    for (double x = -20.0; x <= 20.0 + step / 2; x += step) {
        const double v = density_eval(mixture, x);
        REQUIRE(v >= 0.0);
        integral += v * step;
    }
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("model validation") {
    CHECK_THROWS_AS(JumpDensityModel({}), ParameterError);
    CHECK_THROWS_AS(
        JumpDensityModel({MixtureComponent{GaussianComponent{0.0, 1.0}, 0.5}}),
        ParameterError);  // weights must sum to one
    CHECK_THROWS_AS(JumpDensityModel({MixtureComponent{GaussianComponent{0.0, -1.0}, 1.0}}),
                    ParameterError);
    CHECK_THROWS_AS(JumpDensityModel({MixtureComponent{LaplaceComponent{0.0, 0.0}, 1.0}}),
                    ParameterError);
}

TEST_CASE("model json round trip") {
    const auto mixture = test_mixture();
    const auto back = JumpDensityModel::from_json(mixture.to_json());
    REQUIRE(back.components().size() == 2);
    CHECK(back.components()[0].weight == 0.95);
    for (double x : {-2.0, 0.0, 0.7, 1.0, 3.5})
        CHECK(back.density(x) == doctest::Approx(mixture.density(x)).epsilon(1e-15));

    CHECK_THROWS_AS(JumpDensityModel::from_json("{not json"), ParameterError);
    CHECK_THROWS_AS(JumpDensityModel::from_json(R"({"components":[{"kind":"cauchy"}]})"),
                    ParameterError);
}

TEST_CASE("simulate_path with zero intensity") {
    const auto record = simulate_path(0.0, test_mixture(), 10.0, 0.1, 42);
    REQUIRE(record.increments.size() == 100);
    for (double v : record.increments) CHECK(v == 0.0);
    CHECK(record.jumps.empty());
}

TEST_CASE("simulate_path parameter errors") {
    const auto m = test_mixture();
    CHECK_THROWS_AS(simulate_path(-1.0, m, 10.0, 0.1, 1), ParameterError);
    CHECK_THROWS_AS(simulate_path(1.0, m, -10.0, 0.1, 1), ParameterError);
    CHECK_THROWS_AS(simulate_path(1.0, m, 10.0, 0.0, 1), ParameterError);
    CHECK_THROWS_AS(simulate_path(1.0, m, 10.0, 20.0, 1), ParameterError);
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(simulate_path(inf, m, 10.0, 0.1, 1), ParameterError);
}

TEST_CASE("nonzero fraction matches the closed form") {
    // P(increment != 0) = 1 - exp(-theta*delta) = 0.09516258 at theta=1,
    // delta=0.1; five standard errors over 1e5 slots.
    const double p = 0.09516258196404048;
    const double se = std::sqrt(p * (1.0 - p) / 1e5);
    for (std::uint64_t seed : {1ULL, 77ULL, 123456789ULL}) {
        const auto record = simulate_path(1.0, test_mixture(), 10000.0, 0.1, seed);
        REQUIRE(record.increments.size() == 100000);
        const auto nz = extract_nonzero(record);
        const double frac =
            static_cast<double>(nz.count()) / static_cast<double>(nz.total_slots);
        CHECK(std::abs(frac - p) < 5.0 * se);
    }
}

TEST_CASE("determinism: same seed, same path") {
    const auto a = simulate_path(1.0, test_mixture(), 100.0, 0.1, 987654321);
    const auto b = simulate_path(1.0, test_mixture(), 100.0, 0.1, 987654321);
    REQUIRE(a.increments.size() == b.increments.size());
    for (std::size_t i = 0; i < a.increments.size(); ++i)
        CHECK(a.increments[i] == b.increments[i]);
    REQUIRE(a.jumps.size() == b.jumps.size());
    for (std::size_t i = 0; i < a.jumps.size(); ++i) {
        CHECK(a.jumps[i].time == b.jumps[i].time);
        CHECK(a.jumps[i].size == b.jumps[i].size);
    }

    const auto c = simulate_path(1.0, test_mixture(), 100.0, 0.1, 987654322);
    bool all_equal = a.increments == c.increments;
    CHECK(!all_equal);
}

TEST_CASE("conservation: increments sum to jump sizes") {
    for (std::uint64_t seed : {3ULL, 4ULL, 5ULL, 6ULL}) {
        const auto record = simulate_path(2.0, test_mixture(), 500.0, 0.25, seed);
        const double inc = record.increment_sum();
        const double jmp = record.jump_sum();
        CHECK(std::abs(inc - jmp) <= 1e-9 * std::max(1.0, std::abs(jmp)));
    }
}

TEST_CASE("jump times are sorted and live in their slots") {
    const auto record = simulate_path(5.0, test_mixture(), 100.0, 0.5, 11);
    for (std::size_t i = 1; i < record.jumps.size(); ++i)
        CHECK(record.jumps[i - 1].time <= record.jumps[i].time);
    for (const Jump& j : record.jumps) {
        CHECK(j.time >= 0.0);
        CHECK(j.time <= record.horizon);
    }
    // Every nonzero increment's slot contains at least one jump.
    std::vector<int> counts(record.increments.size(), 0);
    for (const Jump& j : record.jumps) {
        auto slot = static_cast<std::size_t>(j.time / record.delta);
        if (slot >= counts.size()) slot = counts.size() - 1;
        ++counts[slot];
    }
    for (std::size_t i = 0; i < record.increments.size(); ++i)
        if (record.increments[i] != 0.0) CHECK(counts[i] >= 1);
}

TEST_CASE("latent jump-count frequencies match the compounding weights") {
    // Classify each nonzero increment by its latent jump count; the
    // frequencies estimate p_m = (theta*delta)^m / ((e^{theta*delta}-1) m!).
    const auto record = simulate_path(1.0, test_mixture(), 10000.0, 0.1, 314159);
    const auto nz = extract_nonzero(record);

    std::vector<int> counts(record.increments.size(), 0);
    for (const Jump& j : record.jumps) {
        auto slot = static_cast<std::size_t>(j.time / record.delta);
        if (slot >= counts.size()) slot = counts.size() - 1;
        ++counts[slot];
    }
    std::array<double, 3> freq{};
    for (std::size_t i = 0; i < counts.size(); ++i) {
        if (record.increments[i] != 0.0 && counts[i] >= 1 && counts[i] <= 3)
            freq[static_cast<std::size_t>(counts[i] - 1)] += 1.0;
    }
    for (double& f : freq) f /= static_cast<double>(nz.count());

    const std::array<double, 3> pm{0.950833194477505, 0.04754165972387525,
                                   0.001584721990795842};
    const auto n = static_cast<double>(nz.count());
    for (std::size_t q = 0; q < 3; ++q) {
        const double se = std::sqrt(pm[q] * (1.0 - pm[q]) / n);
        CHECK(std::abs(freq[q] - pm[q]) < 5.0 * se);
    }
}

TEST_CASE("extract_nonzero") {
    ObservationRecord record;
    record.delta = 1.0;
    record.horizon = 5.0;

    record.increments = {0.0, 1.5, 0.0, -0.2, 0.0};
    auto nz = extract_nonzero(record);
    CHECK(nz.values == std::vector<double>{1.5, -0.2});
    CHECK(nz.count() == 2);
    CHECK(nz.total_slots == 5);

    record.increments = {0.0, 0.0, 0.0};
    nz = extract_nonzero(record);
    CHECK(nz.values.empty());
    CHECK(nz.count() == 0);

    record.increments = {3.0};
    nz = extract_nonzero(record);
    CHECK(nz.values == std::vector<double>{3.0});
    CHECK(nz.count() == 1);
}

TEST_CASE("sample_jump moments") {
    SUBCASE("standard gaussian mean") {
        Rng rng(1);
        const auto model = JumpDensityModel::gaussian(0.0, 1.0);
        double sum = 0.0;
        const int n = 1000000;
        for (int i = 0; i < n; ++i) sum += sample_jump(model, rng);
        CHECK(std::abs(sum / n) < 5e-3);
    }
    SUBCASE("mixture mean") {
        Rng rng(2);
        const auto model = test_mixture();
        CHECK(model.mean() == doctest::Approx(0.05));
        double sum = 0.0;
        const int n = 1000000;
        for (int i = 0; i < n; ++i) sum += sample_jump(model, rng);
        // mixture sd is about 1.0, so 5 SE is 5e-3
        CHECK(std::abs(sum / n - 0.05) < 5e-3);
    }
    SUBCASE("laplace median sits at the location") {
        Rng rng(3);
        const auto model = JumpDensityModel::laplace(1.0, 0.1);
        std::vector<double> draws(100000);
        for (double& d : draws) d = sample_jump(model, rng);
        std::nth_element(draws.begin(), draws.begin() + 50000, draws.end());
        CHECK(std::abs(draws[50000] - 1.0) < 0.01);
    }
}
