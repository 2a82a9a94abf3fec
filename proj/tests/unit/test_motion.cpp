#include "doctest.h"
#include "nftrack/motion.hpp"

using namespace nftrack;

TEST_CASE("transition matrices") {
  SUBCASE("tau = 2 blocks") {
    const auto m = make_ncv(2.0, 1.0, 4.0, 0.0);
    CHECK(m.A(0, 3) == 2.0);
    CHECK(m.A(1, 4) == 2.0);
    CHECK(m.A(2, 5) == 2.0);
    CHECK((m.A.diagonal().array() == 1.0).all());
    CHECK(m.Q(0, 0) == doctest::Approx(8.0 / 3.0));
    CHECK(m.Q(0, 3) == doctest::Approx(2.0));
    CHECK(m.Q(3, 0) == doctest::Approx(2.0));
    CHECK(m.Q(3, 3) == doctest::Approx(2.0));
    CHECK(m.Q(1, 1) == doctest::Approx(4.0 * 8.0 / 3.0));
    CHECK(m.Q(4, 4) == doctest::Approx(8.0));
    CHECK(m.Q.row(2).norm() == 0.0);
    CHECK(m.Q.row(5).norm() == 0.0);
    CHECK((m.Q - m.Q.transpose()).norm() == 0.0);
    CHECK((m.noise_factor * m.noise_factor.transpose() - m.Q).norm() < 1e-12);
    CHECK(m.noise_factor.row(2).norm() == 0.0);
  }
  SUBCASE("cross-axis blocks vanish") {
    const auto m = make_ncv(1.0, 1.0, 1.0, 1.0);
    CHECK(m.Q(0, 1) == 0.0);
    CHECK(m.Q(0, 4) == 0.0);
    CHECK(m.Q(3, 5) == 0.0);
  }
  SUBCASE("scaling") {
    const auto base = make_ncv(1.0, 0.0009, 0.0009, 0.0);
    const auto s = scaled_ncv(base, 10.0);
    CHECK((s.Q - 10.0 * base.Q).norm() < 1e-15);
    CHECK((s.A - base.A).norm() == 0.0);
    CHECK_THROWS_AS(scaled_ncv(base, -1.0), Error);
  }
  SUBCASE("invalid inputs") {
    CHECK_THROWS_AS(make_ncv(0.0, 1, 1, 1), Error);
    CHECK_THROWS_AS(make_ncv(1.0, -1, 1, 1), Error);
  }
  SUBCASE("regularized covariance") {
    const auto m = make_ncv(1.0, 1.0, 1.0, 0.0);
    bool flagged = false;
    const Mat6 q = regularized_process_covariance(m, &flagged);
    CHECK(flagged);
    CHECK(q(2, 2) > 0.0);
    CHECK(q(5, 5) > 0.0);
    CHECK(q(0, 0) == m.Q(0, 0));
    CHECK(Eigen::LLT<Mat6>(q).info() == Eigen::Success);
  }
}

TEST_CASE("propagation") {
  SUBCASE("zero noise is deterministic") {
    const auto m = make_ncv(1.0, 0.0, 0.0, 0.0);
    State s;
    s << 1, 2, 3, 0.5, -0.5, 0.25;
    Rng rng(1);
    const State n = propagate(m, s, rng);
    State expected;
    expected << 1.5, 1.5, 3.25, 0.5, -0.5, 0.25;
    CHECK((n - expected).norm() < 1e-15);
  }
  SUBCASE("sample moments over 1e5 steps") {
    const auto m = make_ncv(1.0, 1.0, 0.5, 0.0);
    State s;
    s << 0, 0, 1, 1, 0, 0;
    Rng rng(42);
    const int n = 100000;
    State mean = State::Zero();
    Mat6 second = Mat6::Zero();
    for (int i = 0; i < n; ++i) {
      const State w = propagate(m, s, rng) - m.A * s;
      mean += w;
      second += w * w.transpose();
    }
    mean /= n;
    const Mat6 cov = second / n - mean * mean.transpose();
    for (int i = 0; i < kStateDim; ++i) {
      const double sd = std::sqrt(m.Q(i, i) / n);
      CHECK(std::abs(mean(i)) <= 4.0 * sd + 1e-15);
    }
    // Relative Frobenius error of the covariance.
    CHECK((cov - m.Q).norm() / m.Q.norm() < 0.02);
    CHECK(cov(2, 2) == 0.0);
  }
  SUBCASE("fixed seed reproduces") {
    const auto m = make_ncv(1.0, 0.0009, 0.0009, 0.0);
    const State s = State::Ones();
    Rng a(7);
    Rng b(7);
    for (int i = 0; i < 10; ++i) CHECK((propagate(m, s, a) - propagate(m, s, b)).norm() == 0.0);
  }
}
