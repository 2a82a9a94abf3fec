#include "doctest.h"
#include "nftrack/fisher.hpp"
#include "nftrack/observation_model.hpp"
#include "support.hpp"

using namespace nftrack;
using nftrack::test::mat_rel_err;
using nftrack::test::rel_err;

namespace {

const double kLambda28 = kSpeedOfLight / 28e9;

Vec3 central_difference(const ArrayGeometry& g, std::size_t n, const Vec3& p) {
  const double h = 1e-6 * std::max(1.0, (p - g.reference()).norm());
  Vec3 out;
  for (int i = 0; i < 3; ++i) {
    Vec3 e = Vec3::Zero();
    e(i) = h;
    out(i) = (extra_distance(g, n, p + e) - extra_distance(g, n, p - e)) / (2 * h);
  }
  return out;
}

// Sum over antennas of squared central differences of Δd_n along one
// spherical coordinate of the source.
PolarFim polar_fd(const MeasurementModel& m, const SphericalCoords& s) {
  const Vec3 ref = m.geometry.reference();
  const double k2 = std::pow(m.wavenumber() / m.sigma_eta, 2);
  const double hd = 1e-6 * std::max(1.0, s.d);
  const double ha = 1e-6;
  PolarFim out;
  for (std::size_t n = 0; n < m.geometry.size(); ++n) {
    auto dd = [&](double d, double th, double ph) {
      return extra_distance(m.geometry, n, from_spherical({d, th, ph}, ref));
    };
    const double gd = (dd(s.d + hd, s.theta, s.phi) - dd(s.d - hd, s.theta, s.phi)) / (2 * hd);
    const double gt = (dd(s.d, s.theta + ha, s.phi) - dd(s.d, s.theta - ha, s.phi)) / (2 * ha);
    const double gp = (dd(s.d, s.theta, s.phi + ha) - dd(s.d, s.theta, s.phi - ha)) / (2 * ha);
    out.range += k2 * gd * gd;
    out.elevation += k2 * gt * gt;
    out.azimuth += k2 * gp * gp;
  }
  return out;
}

MeasurementModel rect_model(int ny, int nz, double lambda, double sigma) {
  return MeasurementModel(make_rectangular_array(ny, nz, lambda / 2, Vec3(0, 0, 1)), lambda, sigma);
}

}  // namespace

TEST_CASE("extra-distance gradient") {
  SUBCASE("reference antenna has zero gradient") {
    const auto g = make_rectangular_array(3, 3, 0.01, Vec3::Zero());
    CHECK(grad_extra_distance(g, 0, Vec3(2, 0.4, 0.3)).norm() == 0.0);
  }
  SUBCASE("central differences on random points") {
    Rng rng(17);
    int checked = 0;
    while (checked < 1000) {
      const auto g = test::random_array(rng, 4, rng.uniform(0.01, 0.5));
      const Vec3 p = g.reference() + rng.uniform(0.5, 50.0) * test::random_unit(rng);
      const auto s = to_spherical(p, g.reference());
      if (std::sin(s.theta) < 1e-3) continue;
      const std::size_t n = 1 + static_cast<std::size_t>(rng.uniform() * 3);
      const Vec3 ga = grad_extra_distance(g, n, p);
      const Vec3 fd = central_difference(g, n, p);
      CHECK((ga - fd).norm() <= 1e-6 * ga.norm());
      const State gs = grad_extra_distance_state(g, n, p);
      CHECK((gs.head<3>() - ga).norm() == 0.0);
      CHECK(gs.tail<3>().norm() == 0.0);
      ++checked;
    }
  }
  SUBCASE("batched gradients equal single-antenna ones") {
    const auto g = make_rectangular_array(4, 3, 0.01, Vec3(0, 0, 1));
    const Vec3 p(2.0, -0.7, 1.4);
    Eigen::VectorXd extra;
    const auto all = extra_distance_gradients(g, p, &extra);
    for (std::size_t n = 0; n < g.size(); ++n) {
      const auto i = static_cast<Eigen::Index>(n);
      CHECK((all.row(i).transpose() - grad_extra_distance(g, n, p)).norm() < 1e-15);
      CHECK(std::abs(extra(i) - extra_distance(g, n, p)) < 1e-15);
    }
  }
  SUBCASE("polar axis and coincident antenna are rejected") {
    const auto g = make_rectangular_array(2, 2, 0.01, Vec3::Zero());
    CHECK_THROWS_AS(grad_extra_distance(g, 1, Vec3(0, 0, 3)), Error);
    CHECK_THROWS_AS(grad_extra_distance(g, 1, g.antenna(1).position), Error);
  }
  SUBCASE("decay from the Fraunhofer distance to a thousand times it") {
    // Each component shrinks like d_F/d up to the curvature of the
    // antenna-to-source path: 1e-3 (1 + λ/2D) / (1 - λ/2000D) bounds it.
    const double lambda = 0.01;
    const auto g = make_rectangular_array(20, 20, lambda / 2, Vec3(0, 0, 1));
    const double big_d = g.diameter();
    const double d_f = fraunhofer_distance(big_d, lambda);
    const double bound = 1e-3 * (1 + lambda / (2 * big_d)) / (1 - lambda / (2000 * big_d));
    const Vec3 broadside = Vec3::UnitX();
    for (std::size_t n = 1; n < g.size(); n += 37) {
      const Vec3 near = grad_extra_distance(g, n, g.reference() + d_f * broadside);
      const Vec3 far = grad_extra_distance(g, n, g.reference() + 1e3 * d_f * broadside);
      for (int i = 0; i < 3; ++i) CHECK(std::abs(far(i)) <= bound * std::abs(near(i)));
    }
    // Off broadside single components can nearly cancel at d_F; the
    // gradient as a whole still decays.
    const Vec3 dir = Vec3(0.9, 0.3, 0.2).normalized();
    for (std::size_t n = 1; n < g.size(); n += 37) {
      const Vec3 near = grad_extra_distance(g, n, g.reference() + d_f * dir);
      const Vec3 far = grad_extra_distance(g, n, g.reference() + 1e3 * d_f * dir);
      CHECK(far.norm() < bound * near.norm());
    }
  }
}

TEST_CASE("state data FIM") {
  SUBCASE("single antenna gives zero") {
    const MeasurementModel m(ArrayGeometry(Vec3::Zero(), {Vec3::Zero()}), 0.01, 0.2);
    CHECK(data_fim_state(m, Vec3(1, 2, 0.5)).norm() == 0.0);
  }
  SUBCASE("equals H^T H over sigma squared") {
    Rng rng(5);
    for (int t = 0; t < 50; ++t) {
      const MeasurementModel m(test::random_array(rng, 12, 0.2), 0.01, rng.uniform(0.05, 1.0));
      const Vec3 p = m.geometry.reference() + rng.uniform(0.5, 20) * test::random_unit(rng);
      const Eigen::MatrixXd h = jacobian(m, p);
      const Mat6 oracle = h.transpose() * h / (m.sigma_eta * m.sigma_eta);
      const Mat6 fim = data_fim_state(m, p);
      CHECK(mat_rel_err(fim, oracle) < 1e-9);
      CHECK(fim.bottomRows<3>().norm() == 0.0);
      CHECK(fim.rightCols<3>().norm() == 0.0);
      CHECK((fim - fim.transpose()).norm() == 0.0);
      CHECK(Eigen::SelfAdjointEigenSolver<Mat6>(fim).eigenvalues().minCoeff() >=
            -1e-9 * fim.norm());
    }
  }
  SUBCASE("information vanishes far beyond the Fraunhofer distance") {
    const double lambda = 0.01;
    const auto m = rect_model(20, 20, lambda, deg_to_rad(20));
    const double d_f = fraunhofer_distance(m.geometry.diameter(), lambda);
    const Vec3 dir = Vec3(1.0, 0.1, 0.05).normalized();
    const Mat6 near = data_fim_state(m, m.geometry.reference() + 0.5 * d_f * dir);
    const Mat6 far = data_fim_state(m, m.geometry.reference() + 100.0 * d_f * dir);
    CHECK(far.norm() < 1e-4 * near.norm());
    const auto largest = [](const Mat6& j) {
      return Eigen::SelfAdjointEigenSolver<Mat6>(j).eigenvalues().maxCoeff();
    };
    CHECK(largest(far) < 1e-4 * largest(near));
    const auto s_near = to_spherical(m.geometry.reference() + 0.5 * d_f * dir, m.geometry.reference());
    const auto s_far = to_spherical(m.geometry.reference() + 100.0 * d_f * dir, m.geometry.reference());
    const PolarFim p_near = data_fim_polar(m, s_near);
    const PolarFim p_far = data_fim_polar(m, s_far);
    CHECK(rel_err(p_near.elevation, p_far.elevation) < 0.01);
    CHECK(rel_err(p_near.azimuth, p_far.azimuth) < 0.01);
  }
}

TEST_CASE("polar data FIM") {
  SUBCASE("matches finite differences of the extra distance") {
    Rng rng(23);
    for (int t = 0; t < 40; ++t) {
      const MeasurementModel m(test::random_array(rng, 10, 0.1), 0.01, 0.3);
      const Vec3 p = m.geometry.reference() + rng.uniform(0.3, 10) * test::random_unit(rng);
      const auto s = to_spherical(p, m.geometry.reference());
      if (std::sin(s.theta) < 0.05) continue;
      const PolarFim a = data_fim_polar(m, s);
      const PolarFim f = polar_fd(m, s);
      CHECK(rel_err(a.range, f.range) < 1e-6);
      CHECK(rel_err(a.elevation, f.elevation) < 1e-6);
      CHECK(rel_err(a.azimuth, f.azimuth) < 1e-6);
      CHECK(data_fim_polar(m, s, PolarParameter::kRange) == a.range);
      CHECK(data_fim_polar(m, s, PolarParameter::kElevation) == a.elevation);
      CHECK(data_fim_polar(m, s, PolarParameter::kAzimuth) == a.azimuth);
    }
  }
  SUBCASE("range information disappears as D/d goes to zero") {
    const auto m = rect_model(4, 4, 0.01, 0.2);
    const SphericalCoords s{1e7, kPi / 2, 0.0};
    CHECK(data_fim_polar(m, s).range < 1e-12 * data_fim_polar(m, s).elevation);
  }
  SUBCASE("exact 1/sigma^2 scaling") {
    const auto m1 = rect_model(5, 3, 0.01, 0.1);
    const auto m2 = rect_model(5, 3, 0.01, 0.3);
    const SphericalCoords s{1.3, 1.2, 0.4};
    const PolarFim a = data_fim_polar(m1, s);
    const PolarFim b = data_fim_polar(m2, s);
    CHECK(rel_err(a.range, 9 * b.range) < 1e-12);
    CHECK(rel_err(a.elevation, 9 * b.elevation) < 1e-12);
    CHECK(rel_err(a.azimuth, 9 * b.azimuth) < 1e-12);
    const Vec3 p = from_spherical(s, m1.geometry.reference());
    CHECK(mat_rel_err(data_fim_state(m1, p), 9 * data_fim_state(m2, p)) < 1e-12);
  }
}

TEST_CASE("circular closed form") {
  const double sigma = deg_to_rad(20);
  SUBCASE("equals the general sum on the broadside axis") {
    for (int n : {3, 4, 7, 16, 400}) {
      for (double big_d : {0.05, 0.14, 0.75}) {
        const MeasurementModel m(make_circular_array(n, big_d, Vec3(0, 0, 1)), kLambda28, sigma);
        for (double ratio : {0.3, 1.0, 10.0, 500.0}) {
          const double d = ratio * big_d;
          const PolarFim c = fim_circular(n, big_d, kLambda28, sigma, d);
          const PolarFim g = data_fim_polar(m, {d, kPi / 2, 0.0});
          CHECK(rel_err(c.range, g.range) < 1e-10);
          CHECK(rel_err(c.elevation, g.elevation) < 1e-10);
          CHECK(rel_err(c.azimuth, g.azimuth) < 1e-10);
        }
      }
    }
  }
  SUBCASE("far-field limit") {
    const int n = 400;
    const double big_d = 0.14;
    const PolarFim c = fim_circular(n, big_d, kLambda28, sigma, 1e9);
    const double angle = big_d * big_d * n * kPi * kPi / (2 * kLambda28 * kLambda28 * sigma * sigma);
    CHECK(rel_err(c.elevation, angle) < 1e-12);
    CHECK(rel_err(c.azimuth, angle) < 1e-12);
    CHECK(c.range < 1e-20 * angle);
  }
  SUBCASE("at the Fraunhofer distance") {
    const int n = 64;
    const double big_d = 0.3;
    const double x = kLambda28 * kLambda28 / (16 * big_d * big_d);
    const PolarFim c = fim_circular(n, big_d, kLambda28, sigma, fraunhofer_distance(big_d, kLambda28));
    const double base = n * kPi * kPi / (kLambda28 * kLambda28 * sigma * sigma);
    CHECK(rel_err(c.range, 4 * base * (2 + x - 2 * std::sqrt(1 + x)) / (1 + x)) < 1e-6);
    CHECK(rel_err(c.elevation, base / 2 * big_d * big_d / (1 + x)) < 1e-12);
  }
  SUBCASE("range information decreases with distance") {
    const double big_d = 0.14;
    const auto b = field_boundaries(big_d, kLambda28);
    double prev = fim_circular(400, big_d, kLambda28, sigma, b.fresnel_lower).range;
    for (int i = 1; i <= 400; ++i) {
      const double d = b.fresnel_lower * std::pow(100 * b.fraunhofer / b.fresnel_lower, i / 400.0);
      const double cur = fim_circular(400, big_d, kLambda28, sigma, d).range;
      CHECK(cur < prev);
      CHECK(cur >= 0.0);
      prev = cur;
    }
  }
  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(fim_circular(0, 0.1, 0.01, 0.1, 1.0), Error);
    CHECK_THROWS_AS(fim_circular(4, 0.1, 0.01, 0.0, 1.0), Error);
    CHECK_THROWS_AS(fim_circular(4, 0.1, 0.01, 0.1, 0.0), Error);
  }
}

TEST_CASE("rectangular closed form") {
  const double sigma = deg_to_rad(20);
  SUBCASE("equals the general sum on the broadside axis") {
    for (auto [ny, nz] : {std::pair{2, 2}, std::pair{5, 3}, std::pair{20, 20}}) {
      const auto m = rect_model(ny, nz, kLambda28, sigma);
      for (double d : {0.05, 0.4, 3.0, 100.0}) {
        const PolarFim c = fim_rectangular(ny, nz, kLambda28, sigma, d);
        const PolarFim g = data_fim_polar(m, {d, kPi / 2, 0.0});
        CHECK(rel_err(c.range, g.range) < 1e-10);
        CHECK(rel_err(c.elevation, g.elevation) < 1e-10);
        CHECK(rel_err(c.azimuth, g.azimuth) < 1e-10);
      }
    }
  }
  SUBCASE("far-field angle information") {
    for (auto [ny, nz] : {std::pair{2, 2}, std::pair{3, 7}, std::pair{20, 20}}) {
      const PolarFim c = fim_rectangular(ny, nz, kLambda28, sigma, 1e6 * 1000);
      const double k = kPi * kPi / (sigma * sigma);
      CHECK(rel_err(c.elevation, k * ny * nz * (2.0 * nz - 1) * (nz - 1) / 6) < 1e-9);
      CHECK(rel_err(c.azimuth, k * ny * nz * (2.0 * ny - 1) * (ny - 1) / 6) < 1e-9);
    }
    const double d_f = fraunhofer_distance(make_rectangular_array(2, 2, kLambda28 / 2, Vec3::Zero()).diameter(),
                                           kLambda28);
    const PolarFim two = fim_rectangular(2, 2, kLambda28, sigma, 1e6 * d_f);
    CHECK(rel_err(two.elevation, 2 * kPi * kPi / (sigma * sigma)) < 1e-9);
    CHECK(rel_err(two.azimuth, 2 * kPi * kPi / (sigma * sigma)) < 1e-9);
  }
  SUBCASE("values at the Fraunhofer distance of the N-hop diameter") {
    CHECK(fim_rectangular_at_fresnel(1, 1, kLambda28, sigma).range == 0.0);
    CHECK(fim_rectangular_at_fresnel(1, 1, kLambda28, sigma).elevation == 0.0);
    CHECK(fim_rectangular_at_fresnel(1, 1, kLambda28, sigma).azimuth == 0.0);
    for (auto [ny, nz] : {std::pair{20, 20}, std::pair{4, 9}, std::pair{100, 100}}) {
      const double big_d = rectangular_nhop_diameter(ny, nz, kLambda28);
      const PolarFim r = fim_rectangular_at_fresnel(ny, nz, kLambda28, sigma);
      const PolarFim p = fim_rectangular(ny, nz, kLambda28, sigma, 2 * big_d * big_d / kLambda28);
      CHECK(rel_err(r.range, p.range) < 1e-9);
      CHECK(rel_err(r.elevation, p.elevation) < 1e-9);
      CHECK(rel_err(r.azimuth, p.azimuth) < 1e-9);
    }
    const PolarFim sym = fim_rectangular_at_fresnel(20, 20, kLambda28, sigma);
    CHECK(rel_err(sym.elevation, sym.azimuth) < 1e-14);
    // Angle terms do not depend on the wavelength.
    const PolarFim other = fim_rectangular_at_fresnel(20, 20, 2 * kLambda28, sigma);
    CHECK(rel_err(sym.elevation, other.elevation) < 1e-14);
  }
  SUBCASE("non-negative everywhere") {
    for (double d = 1e-3; d < 1e4; d *= 3) {
      const PolarFim c = fim_rectangular(6, 4, 0.01, 0.3, d);
      CHECK(c.range >= 0.0);
      CHECK(c.elevation >= 0.0);
      CHECK(c.azimuth >= 0.0);
    }
  }
}
