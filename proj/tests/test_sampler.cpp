#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "ds/sampler.hpp"
#include "test_util.hpp"

using namespace ds;

namespace {

double ks_statistic_uniform(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double stat = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double hi = (i + 1.0) / n - values[i];
        const double lo = values[i] - i / n;
        stat = std::max({stat, hi, lo});
    }
    return stat;
}

std::vector<double> point_norms(const SamplePoints& s) {
    std::vector<double> norms(s.count());
    for (std::size_t j = 0; j < s.count(); ++j) {
        const double* z = s.points.row(j);
        double ss = 0.0;
        for (std::size_t a = 0; a < s.dim; ++a) ss += z[a] * z[a];
        norms[j] = std::sqrt(ss);
    }
    return norms;
}

}  // namespace

TEST_CASE("sampling_radius") {
    CHECK(sampling_radius({1, 1, 1, 1}) == 1.0);
    CHECK(sampling_radius({2, 5, 3}, 1.0) == 5.0);

    std::vector<double> norms;
    for (int i = 0; i <= 100; ++i) norms.push_back(static_cast<double>(i));
    CHECK(sampling_radius(norms, 0.95) == doctest::Approx(95.0).epsilon(1e-12));

    CHECK_THROWS_AS(sampling_radius({0.0, 0.0}, 0.95), std::invalid_argument);
    CHECK_THROWS_AS(sampling_radius({}, 0.95), std::invalid_argument);
    CHECK_THROWS_AS(sampling_radius({1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("sample_ball basic contracts") {
    CHECK(sample_ball(0, 4, 1.0, 9).count() == 0);
    CHECK_THROWS_AS(sample_ball(5, 0, 1.0, 9), std::invalid_argument);
    CHECK_THROWS_AS(sample_ball(5, 3, 0.0, 9), std::invalid_argument);

    const auto s = sample_ball(2000, 6, 2.5, 123);
    for (double norm : point_norms(s)) CHECK(norm <= 2.5);
    CHECK(s.dim == 6);
    CHECK(s.radius == 2.5);
    CHECK(s.seed == 123);
}

TEST_CASE("sample_ball mean norm approaches R d/(d+1)") {
    const auto s = sample_ball(10000, 10, 1.0, 77);
    const auto norms = point_norms(s);
    double mean = 0.0;
    for (double v : norms) mean += v;
    mean /= static_cast<double>(norms.size());
    const double expected = 10.0 / 11.0;
    CHECK(std::abs(mean - expected) < 0.01 * expected);
}

TEST_CASE("sample_ball radial law: (|z|/R)^d is uniform") {
    for (std::uint64_t seed : {1ull, 42ull}) {
        const auto s = sample_ball(10000, 5, 3.0, seed);
        auto norms = point_norms(s);
        for (double& v : norms) v = std::pow(v / 3.0, 5.0);
        CHECK(ks_statistic_uniform(std::move(norms)) < 0.02);
    }
}

TEST_CASE("sample_ball angles are uniform in d=2") {
    // chi-square over 36 bins; p > 0.001 at 35 dof means stat < 66.62
    const auto s = sample_ball(10000, 2, 1.0, 2024);
    std::vector<std::size_t> bins(36, 0);
    for (std::size_t j = 0; j < s.count(); ++j) {
        const double angle = std::atan2(s.points.at(j, 1), s.points.at(j, 0));
        auto bin = static_cast<std::size_t>((angle + M_PI) / (2.0 * M_PI) * 36.0);
        if (bin >= 36) bin = 35;
        ++bins[bin];
    }
    const double expected = 10000.0 / 36.0;
    double chi2 = 0.0;
    for (auto count : bins) {
        const double delta = static_cast<double>(count) - expected;
        chi2 += delta * delta / expected;
    }
    CHECK(chi2 < 66.62);
}

TEST_CASE("sample_ball is deterministic and thread-count independent") {
    const auto a = sample_ball(501, 7, 1.5, 99, 1);
    const auto b = sample_ball(501, 7, 1.5, 99, 8);
    CHECK(a.points == b.points);

    const auto c = sample_ball(501, 7, 1.5, 99, 3);
    CHECK(a.points == c.points);

    const auto other_seed = sample_ball(501, 7, 1.5, 100);
    CHECK_FALSE(a.points == other_seed.points);
}

TEST_CASE("sample points persist with their sidecar metadata") {
    const auto dir = test_tmp_dir("sampler_io");
    const auto s = sample_ball(20, 3, 1.25, 5);
    const auto matrix_path = (dir / "pts.dsm").string();
    const auto meta_path = (dir / "pts.meta").string();
    save_sample_points(s, matrix_path, meta_path);

    const auto loaded = load_sample_points(matrix_path, meta_path);
    CHECK(loaded.points == s.points);
    CHECK(loaded.dim == s.dim);
    CHECK(loaded.radius == s.radius);
    CHECK(loaded.seed == s.seed);

    const auto meta = read_file(meta_path);
    CHECK(meta.find("generator = splitmix64-polar") != std::string::npos);
}
