#include <doctest.h>

#include <cmath>
#include <fstream>

#include <tcdm/degrade.hpp>
#include <tcdm/error.hpp>
#include <tcdm/evaluation/benchmark.hpp>
#include <tcdm/evaluation/logistic.hpp>
#include <tcdm/evaluation/stats.hpp>
#include <tcdm/ply.hpp>
#include <tcdm/rng.hpp>

#include "oracles.hpp"
#include "scratch_dir.hpp"
#include "shapes.hpp"

using namespace tcdm;
using namespace tcdm::evaluation;
using tcdm::testing::ScratchDir;

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

MetricConfig quick_config() {
  MetricConfig config;
  config.seeds = 20;
  return config;
}

}  // namespace

TEST_CASE("hand-checked correlation triples") {
  const std::vector<double> a = {1, 2, 3, 4, 5};
  CHECK(plcc(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(srocc(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(rmse(a, a) == 0.0);

  const std::vector<double> rev = {5, 4, 3, 2, 1};
  CHECK(std::abs(srocc(a, rev) + 1.0) <= 1e-12);

  const std::vector<double> b = {1, 3, 2, 5, 4};
  // Rank differences 0, 1, 1, 1, 1: 1 - 6 * 4 / 120.
  CHECK(std::abs(srocc(a, b) - 0.8) <= 1e-12);
  CHECK(std::abs(srocc(a, b) - testing::srocc_rank_formula(a, b)) <= 1e-12);
  CHECK(std::abs(plcc(a, b) - 0.8) <= 1e-12);  // sum of deviation products 8 over 10
  CHECK(std::abs(rmse(a, b) - std::sqrt(4.0 / 5.0)) <= 1e-12);

  const std::vector<double> c = {2, 4, 6, 8, 11};
  CHECK(std::abs(rmse(a, c) - std::sqrt((1 + 4 + 9 + 16 + 36) / 5.0)) <= 1e-12);
  CHECK(std::abs(srocc(a, c) - 1.0) <= 1e-12);
  // mean 6.2, deviations -4.2 -2.2 -0.2 1.8 4.8
  CHECK(std::abs(plcc(a, c) - 22.0 / std::sqrt(10.0 * 48.8)) <= 1e-12);
}

TEST_CASE("rank formula oracle agrees on random tie-free data") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(5 + rng.below(40)), b(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = rng.uniform();
      b[i] = a[i] + rng.gaussian() * 0.3;
    }
    CHECK(std::abs(srocc(a, b) - testing::srocc_rank_formula(a, b)) <= 1e-12);
  }
}

TEST_CASE("ties use average ranks") {
  const std::vector<double> v = {10, 20, 20, 30, 20};
  CHECK(fractional_ranks(v) == std::vector<double>{1, 3, 3, 5, 3});
  const std::vector<double> a = {1, 2, 2, 3};
  const std::vector<double> b = {1, 2, 3, 4};
  CHECK(srocc(a, b) == doctest::Approx(plcc(std::vector<double>{1, 2.5, 2.5, 4}, b)));
}

TEST_CASE("transform invariances") {
  Rng rng(2);
  std::vector<double> a(30), b(30);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.uniform();
    b[i] = a[i] * a[i] + 0.2 * rng.gaussian();
  }
  std::vector<double> a_exp(a), a_aff(a);
  for (auto& x : a_exp) x = std::exp(3 * x);
  for (auto& x : a_aff) x = 4 * x - 7;
  CHECK(srocc(a_exp, b) == doctest::Approx(srocc(a, b)).epsilon(1e-12));
  CHECK(plcc(a_aff, b) == doctest::Approx(plcc(a, b)).epsilon(1e-12));
}

TEST_CASE("statistics errors") {
  const std::vector<double> a = {1, 2, 3};
  const std::vector<double> flat = {2, 2, 2};
  CHECK_THROWS_AS(plcc(a, std::vector<double>{1, 2}), InputError);
  CHECK_THROWS_AS(plcc(std::vector<double>{1}, std::vector<double>{1}), InputError);
  CHECK_THROWS_AS(plcc(a, flat), InputError);
  CHECK_THROWS_AS(srocc(flat, a), InputError);
  CHECK_THROWS_AS(rmse(a, std::vector<double>{}), InputError);
}

TEST_CASE("planted logistic is recovered") {
  const LogisticParams truth{{4.0, 6.0, 0.55, 1.5, 3.0}};
  Rng rng(3);
  std::vector<double> q(80), mos(80);
  for (std::size_t i = 0; i < q.size(); ++i) {
    q[i] = rng.uniform();
    mos[i] = logistic5(truth, q[i]);
  }
  const auto fit = fit_logistic5(q, mos);
  CHECK(rmse(fit.mapped, mos) <= 1e-4);
  CHECK(fit.final_sse <= fit.initial_sse);
  CHECK(fit.evaluations <= 10000);
}

TEST_CASE("linear MOS gives PLCC 1 after the fit") {
  std::vector<double> q, mos;
  for (int i = 0; i < 20; ++i) {
    q.push_back(0.05 * i);
    mos.push_back(2 * q.back() + 1);
  }
  const auto fit = fit_logistic5(q, mos);
  CHECK(std::abs(plcc(fit.mapped, mos) - 1.0) <= 1e-9);
}

TEST_CASE("fit never does worse than its starting point") {
  Rng rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<double> q(6 + rng.below(50)), mos(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) {
      q[i] = rng.uniform();
      mos[i] = (trial % 3 == 0 ? rng.uniform() * 5 : 5 * q[i] * q[i]) + rng.gaussian() * 0.3;
    }
    const auto fit = fit_logistic5(q, mos);
    CHECK(fit.final_sse <= fit.initial_sse);
    double init = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) init += std::pow(logistic5(fit.initial, q[i]) - mos[i], 2);
    CHECK(fit.initial_sse == doctest::Approx(init));
  }
}

TEST_CASE("initial guess") {
  const std::vector<double> q = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  const std::vector<double> mos = {1, 2, 2, 3, 5, 5};
  const auto guess = initial_logistic_guess(q, mos);
  CHECK(guess.beta[0] == 4.0);
  CHECK(guess.beta[1] == doctest::Approx(1.0 / std::sqrt(0.0291666666666667)));
  CHECK(guess.beta[2] == doctest::Approx(0.35));
  CHECK(guess.beta[3] == 0.0);
  CHECK(guess.beta[4] == doctest::Approx(3.0));
  CHECK_THROWS_AS(fit_logistic5(std::vector<double>(5, 1.0), std::vector<double>(5, 1.0)), InputError);
  CHECK_THROWS_AS(fit_logistic5(std::vector<double>(8, 0.5), mos), InputError);
}

TEST_CASE("F-test is left-tailed") {
  Rng rng(5);
  std::vector<double> small(200), large(200);
  for (std::size_t i = 0; i < 200; ++i) {
    small[i] = 0.01 * rng.gaussian();
    large[i] = 1.0 * rng.gaussian();
  }
  CHECK(f_test(small, large));
  CHECK_FALSE(f_test(large, small));
  CHECK_FALSE(f_test(large, large));
  CHECK_THROWS_AS(f_test(std::vector<double>(5, 1.0), large), InputError);
}

TEST_CASE("csv helpers and manifest parsing") {
  CHECK(split_csv_line("a,\"b,c\",d") == std::vector<std::string>{"a", "b,c", "d"});
  CHECK(split_csv_line("x,\"say \"\"hi\"\"\",") == std::vector<std::string>{"x", "say \"hi\"", ""});
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

  ScratchDir dir("manifest");
  write_text(dir / "bad_header.csv", "ref,dist,type,mos\na,b,c,1\n");
  CHECK_THROWS_AS(read_manifest(dir / "bad_header.csv"), InputError);
  write_text(dir / "empty.csv", "reference,distorted,distortion_type,mos\n");
  CHECK_THROWS_AS(read_manifest(dir / "empty.csv"), InputError);
  write_text(dir / "dup.csv", "reference,distorted,distortion_type,mos\na,b,c,1\na,b,c,2\n");
  CHECK_THROWS_AS(read_manifest(dir / "dup.csv"), InputError);
  write_text(dir / "ok.csv", "reference,distorted,distortion_type,mos\r\na.ply,b.ply,noise,3.5\n");
  const auto rows = read_manifest(dir / "ok.csv");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].distortion_type == "noise");
  CHECK(rows[0].mos == 3.5);
}

TEST_CASE("degenerate manifest of self-pairs") {
  ScratchDir dir("bench");
  for (int i = 0; i < 3; ++i) save_ply(testing::make_sphere(1500, 10 + i), dir / ("s" + std::to_string(i) + ".ply"), PlyEncoding::binary_le);
  write_text(dir / "m.csv", "reference,distorted,distortion_type,mos\ns0.ply,s0.ply,none,5\ns1.ply,s1.ply,none,5\ns2.ply,s2.ply,none,5\n");
  const auto result = run_benchmark(dir / "m.csv", quick_config(), dir / "report.csv", 1);
  REQUIRE(result.records.size() == 3);
  for (const auto& r : result.records) CHECK(r.q == result.records[0].q);
  CHECK(result.summary.degenerate);
  CHECK(result.summary.zero_variance);
  CHECK(std::isnan(result.summary.srocc));
  CHECK_FALSE(result.summary.logistic.has_value());
}

TEST_CASE("benchmark: per-shape ordering, report and cache") {
  ScratchDir dir("bench");
  const char* shapes[] = {"plane", "sphere", "torus"};
  // Noise above the point spacing; far below it a jittered copy predicts the
  // reference better than the reference predicts itself.
  const double levels[] = {0.01, 0.02, 0.04, 0.08};
  std::string manifest = "reference,distorted,distortion_type,mos\n";
  for (int s = 0; s < 3; ++s) {
    const auto ref = s == 0 ? testing::make_plane(3000, 1) : s == 1 ? testing::make_sphere(3000, 2) : testing::make_torus(3000, 3);
    save_ply(ref, dir / (std::string(shapes[s]) + ".ply"), PlyEncoding::binary_le);
    const double diag = testing::bbox_diagonal(ref);
    for (int l = 0; l < 4; ++l) {
      const auto name = std::string(shapes[s]) + "_ggn" + std::to_string(l) + ".ply";
      save_ply(degrade(ref, {DegradationKind::geometry_gaussian, levels[l] * diag, std::uint64_t(7 + l)}), dir / name, PlyEncoding::binary_le);
      manifest += std::string(shapes[s]) + ".ply," + name + "," + shapes[s] + "," + std::to_string(-levels[l]) + "\n";
    }
  }
  manifest += "plane.ply,missing.ply,plane,0\n";
  write_text(dir / "m.csv", manifest);

  const auto first = run_benchmark(dir / "m.csv", quick_config(), dir / "report.csv", 1);
  CHECK(first.computed == 12);
  CHECK(first.cache_hits == 0);
  CHECK(first.skipped == 1);
  CHECK(first.summary.n == 12);
  for (const auto* shape : shapes) {
    REQUIRE(first.summary.per_type.count(shape) == 1);
    CHECK(first.summary.per_type.at(shape).n == 4);
    CHECK(std::abs(first.summary.per_type.at(shape).srocc - 1.0) <= 1e-12);
  }
  CHECK(first.summary.srocc > 0.0);
  CHECK(first.summary.logistic.has_value());
  CHECK(first.summary.plcc >= -1.0);
  CHECK(first.summary.plcc <= 1.0);

  const auto back = read_report(dir / "report.csv");
  REQUIRE(back.size() == 12);
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].q == first.records[i].q);
    CHECK(back[i].mapped_q == first.records[i].mapped_q);
    CHECK(back[i].distortion_type == first.records[i].distortion_type);
  }

  const auto second = run_benchmark(dir / "m.csv", quick_config(), dir / "report.csv", 1);
  CHECK(second.computed == 0);
  CHECK(second.cache_hits == 12);
  for (std::size_t i = 0; i < second.records.size(); ++i) CHECK(second.records[i].q == first.records[i].q);

  auto other = quick_config();
  other.alpha = 0.5;
  CHECK(run_benchmark(dir / "m.csv", other, dir / "report.csv", 1).computed == 12);
}

TEST_CASE("benchmark errors") {
  ScratchDir dir("bench");
  write_text(dir / "m.csv", "reference,distorted,distortion_type,mos\nnope.ply,nope.ply,x,1\n");
  CHECK_THROWS_AS(run_benchmark(dir / "m.csv", quick_config(), dir / "r.csv", 1), InputError);
  CHECK_THROWS_AS(run_benchmark(dir / "absent.csv", quick_config(), dir / "r.csv", 1), InputError);
}
