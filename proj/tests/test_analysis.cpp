#include "boundedsnr/analysis.hpp"
#include "boundedsnr/errors.hpp"
#include "boundedsnr/serialize.hpp"
#include "boundedsnr/specfun.hpp"
#include "doctest.h"
#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

using namespace snr;
using namespace snr::analysis;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool has_check(const VerificationReport& rep, const std::string& check) {
    return std::any_of(rep.violations.begin(), rep.violations.end(),
                       [&](const Violation& v) { return v.check == check; });
}

}  // namespace

TEST_CASE("grids") {
    const auto t = default_t_grid();
    REQUIRE(t.size() == 202);
    CHECK(t.front() == 0.0);
    CHECK(t[1] == 1e-4);
    CHECK(t[200] == 1e4);
    CHECK(t.back() == kInf);
    CHECK(std::is_sorted(t.begin(), t.end()));
    const auto z = default_z_grid();
    REQUIRE(z.size() == 100);
    CHECK(z.front() == 1e-3);
    CHECK(z.back() == 700.0);
    CHECK_THROWS_AS(log_grid(0.0, 1.0, 5), ConfigurationError);
    CHECK_THROWS_AS(log_grid(1.0, 2.0, 0), ConfigurationError);

    const Problem prob(5, 20, 2.0);
    const auto l = default_l_grid(prob);
    CHECK(l.back() == 24.0);
    CHECK(std::all_of(l.begin(), l.end(), [](double v) { return v < 25.0; }));
    const auto lam = default_lambda_grid(prob);
    CHECK(lam.size() == 21);
    CHECK(lam.back() == 2.0);
}

TEST_CASE("envelope violation set") {
    const auto grid = default_t_grid();
    for (const Problem prob : {Problem(5, 20, 2.0), Problem(3, 20, 3.0), Problem(2, 4, 1.0)}) {
        CHECK(envelope_violation_set(EstimatorSpec::boundary_uniform(0.0), prob, grid).empty());
        CHECK(envelope_violation_set(EstimatorSpec::boundary_uniform(0.0, prob.m), prob, grid).empty());
    }
    for (const Problem prob : {Problem(5, 20, 2.0), Problem(4, 6, 2.0), Problem(3, 10, 1.0)}) {
        const auto v = envelope_violation_set(EstimatorSpec::unbiased(), prob, grid);
        std::vector<double> positive(grid.begin() + 1, grid.end());
        std::vector<double> got = v;
        got.erase(std::remove(got.begin(), got.end(), 0.0), got.end());
        CHECK(got == positive);
        // For m <= sqrt(p) the mle multiplier sits on or above the envelope everywhere.
        const auto mle = envelope_violation_set(EstimatorSpec::mle(), prob, grid);
        CHECK(std::vector<double>(mle.end() - 201, mle.end()) == positive);
        for (double t : grid) CHECK(h_mle(t, prob) >= envelope(t, prob) - kSlack);
    }
    const Problem wide(5, 20, 3.0);
    const auto v = envelope_violation_set(EstimatorSpec::mle(), wide, grid);
    CHECK_FALSE(v.empty());
    for (double t : grid) {
        if (t > 9.0 / 25.0) CHECK(std::find(v.begin(), v.end(), t) != v.end());
    }
}

TEST_CASE("midpoint dominance check") {
    const auto grid = default_t_grid();
    const Problem prob(5, 20, 2.0);
    CHECK(midpoint_dominance_check(EstimatorSpec::unbiased(), EstimatorSpec::mle(), prob, grid).passed);
    CHECK(midpoint_dominance_check(EstimatorSpec::mle(), EstimatorSpec::boundary_uniform(0.0), prob,
                                   grid)
              .passed);
    for (const Problem q : {Problem(5, 20, 2.0), Problem(3, 10, 3.0), Problem(2, 2, 0.5)}) {
        CHECK(midpoint_dominance_check(EstimatorSpec::boundary_uniform(2.0),
                                       EstimatorSpec::boundary_uniform(0.0), q, grid)
                  .passed);
    }
    const auto bad =
        midpoint_dominance_check(EstimatorSpec::mle(), EstimatorSpec::unbiased(), prob, grid);
    CHECK_FALSE(bad.passed);
    CHECK(has_check(bad, "h_A >= h_B"));
    CHECK(bad == midpoint_dominance_check(EstimatorSpec::mle(), EstimatorSpec::unbiased(), prob, grid));

    const Problem wide(5, 20, 3.0);
    CHECK(midpoint_dominance_check(EstimatorSpec::mle(),
                                   EstimatorSpec::truncated(EstimatorSpec::mle()), wide, grid)
              .passed);
}

TEST_CASE("ratio lower bound") {
    const auto rep = verify_inequality_r1(5, 20, {0.1, 1.0, 10.0, 50.0});
    CHECK(rep.passed);
    CHECK(rep.checks == 8);
    CHECK_FALSE(rep.exploratory);

    // Small z: R near 1 and the bound near 0.
    const auto small = verify_inequality_r1(5, 20, {1e-6});
    CHECK(small.passed);

    CHECK(verify_inequality_r1(2, 2, {25.0}).passed);
    {
        using oracle::Big;
        const Big z = 25, p = 2, k = 2;
        const Big a = (k + p) / 2 + 1;
        const Big r = oracle::kummer(a, p / 2, z) / oracle::kummer(a, p / 2 + 1, z);
        const Big bound = (z / p) * (boost::multiprecision::sqrt(1 + 2 * (k + p) / z) + 1);
        CHECK(r > bound);
        CHECK(specfun::kummer_ratio(3.0, 1.0, 3.0, 2.0, 25.0) ==
              doctest::Approx(oracle::to_double(r)).epsilon(1e-12));
    }

    CHECK(verify_inequality_r1(1, 5, default_z_grid()).exploratory);
    CHECK_THROWS_AS(verify_inequality_r1(3, 3, {0.0}), DomainError);
}

TEST_CASE("envelope below mle above the threshold") {
    const auto grid = default_t_grid();
    for (int p = 2; p <= 6; ++p) {
        for (int k = 2; k <= 6; ++k) {
            for (double f : {0.5, 1.0, 2.0}) {
                const auto rep = verify_envelope_inequality(Problem(p, k, f * std::sqrt(p)), grid);
                CAPTURE(p);
                CAPTURE(k);
                CAPTURE(f);
                CHECK(rep.passed);
                CHECK(rep.checks > 0);
            }
        }
    }
}

TEST_CASE("h properties") {
    for (const Problem prob : {Problem(5, 20, 2.0), Problem(3, 20, 3.0)}) {
        const auto rep = verify_h_properties(prob, default_l_grid(prob), default_t_grid(),
                                             default_lambda_grid(prob));
        CHECK(rep.passed);
        CHECK(rep.checks > 10000);
    }

    const Problem prob(5, 20, 2.0);
    const double bad_t = 100.0;
    auto grid = default_t_grid();
    grid.push_back(bad_t);
    const auto corrupted = verify_h_properties(
        prob, default_l_grid(prob), grid, default_lambda_grid(prob),
        [&prob, bad_t](double lambda, double l, double t) {
            const double h = h_sphere(t, prob, l, lambda);
            return (t == bad_t && lambda == 1.0 && l == 0.0) ? h + 0.01 : h;
        });
    CHECK_FALSE(corrupted.passed);
    const bool listed = std::any_of(
        corrupted.violations.begin(), corrupted.violations.end(), [&](const Violation& v) {
            return std::find(v.inputs.begin(), v.inputs.end(), std::pair<std::string, double>{"t", bad_t}) !=
                   v.inputs.end();
        });
    CHECK(listed);

    CHECK_THROWS_AS(verify_h_properties(prob, {25.0}, {1.0}, {1.0}), DomainError);
}

TEST_CASE("ratio monotonicity and recurrence") {
    std::vector<double> z{0.0};
    for (int i = 1; i <= 100; ++i) z.push_back(0.5 * i);
    CHECK(verify_ratio_properties({12.5}, {2.5}, z).passed);
    CHECK(verify_ratio_properties({0.5, 1.0, 2.5, 5.0, 12.5, 25.0}, {0.5, 1.5, 2.5, 5.0},
                                  default_z_grid())
              .passed);
    const auto rec = verify_recurrence({1.0, 5.0, 12.5}, {1.5, 2.5}, {0.1, 1.0, 10.0, 100.0});
    CHECK(rec.passed);
    CHECK(rec.checks == 24);
}

TEST_CASE("dominating truncation") {
    const Problem wide(5, 20, 3.0);
    const auto tr = build_dominating_truncation(EstimatorSpec::mle(), wide);
    CHECK(tr.spec == EstimatorSpec::truncated(EstimatorSpec::mle()));
    CHECK_FALSE(tr.identity);
    CHECK_FALSE(tr.violations.empty());
    CHECK(tr.violations == envelope_violation_set(EstimatorSpec::mle(), wide, default_t_grid()));
    const auto h = make_multiplier(tr.spec, wide);
    for (double t : default_t_grid()) {
        CHECK(h(t) <= envelope(t, wide) + kSlack);
        CHECK(h(t) == doctest::Approx(std::min(h_mle(t, wide), envelope(t, wide))).epsilon(1e-15));
        if (t > 9.0 / 25.0) CHECK(h(t) < h_mle(t, wide));
    }

    const Problem narrow(5, 20, 2.0);
    const auto tu = build_dominating_truncation(EstimatorSpec::unbiased(), narrow);
    const auto hu = make_multiplier(tu.spec, narrow);
    for (double t : default_t_grid()) {
        if (t > 0.0) CHECK(hu(t) == doctest::Approx(envelope(t, narrow)).epsilon(1e-15));
    }

    const auto id = build_dominating_truncation(EstimatorSpec::boundary_uniform(0.0), narrow);
    CHECK(id.identity);
    CHECK_FALSE(id.advisory.empty());
}

TEST_CASE("report serialization") {
    const Problem prob(5, 20, 2.0);
    const auto bad =
        midpoint_dominance_check(EstimatorSpec::mle(), EstimatorSpec::unbiased(), prob, default_t_grid());
    const auto j = to_json(bad);
    CHECK(j.at("name").is_string());
    CHECK(j.at("grid").is_string());
    CHECK(j.at("passed") == false);
    REQUIRE(j.at("violations").size() == bad.violations.size());
    CHECK(j.at("violations")[0].at("inputs").contains("t"));
    CHECK(j.dump() == to_json(bad).dump());
}

TEST_CASE("spec serialization round trip") {
    const std::vector<EstimatorSpec> specs{
        EstimatorSpec::unbiased(),
        EstimatorSpec::affine(0.7),
        EstimatorSpec::mle(),
        EstimatorSpec::boundary_uniform(0.0),
        EstimatorSpec::boundary_uniform(-2.0, 2.5),
        EstimatorSpec::radial_mixture(0.0, BallUniform{}),
        EstimatorSpec::radial_mixture(1.0, PointMass{1.5}),
        EstimatorSpec::radial_mixture(0.0, TabulatedDensity{{0.0, 2.0}, {0.5, 0.5}}),
        EstimatorSpec::truncated(EstimatorSpec::mle()),
        EstimatorSpec::tabulated({0.0, 1.0, 10.0}, {0.5, 0.4, 0.2}),
    };
    for (const auto& s : specs) {
        CAPTURE(s.label());
        CHECK(spec_from_json(to_json(s)) == s);
        CHECK(parse_spec(to_json(s).dump()) == s);
    }
    CHECK(parse_spec("mle") == EstimatorSpec::mle());
    CHECK(parse_spec("boundary_uniform") == EstimatorSpec::boundary_uniform(0.0));
    CHECK(parse_spec(R"({"kind":"boundary_uniform","l":2})") == EstimatorSpec::boundary_uniform(2.0));

    auto message = [](const std::string& text) {
        try {
            parse_spec(text);
        } catch (const ConfigurationError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("smoothing").find("kind") != std::string::npos);
    CHECK(message(R"({"kind":"affine"})").find("'a'") != std::string::npos);
    CHECK(message(R"({"kind":"boundary_uniform","radius":"x"})").find("'radius'") != std::string::npos);
    CHECK(message("{bad json").find("JSON") != std::string::npos);
}
