#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ia/errors.hpp"
#include "ia/instances.hpp"
#include "ia/oracle.hpp"

using namespace ia;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// big-endian base-|S| decoding, mirroring the oracle's profile order
std::vector<int> decode_profile(std::int64_t index, int n, int S) {
  std::vector<int> profile(n);
  for (int i = n - 1; i >= 0; --i) {
    profile[i] = static_cast<int>(index % S);
    index /= S;
  }
  return profile;
}

}  // namespace

TEST_CASE("profile payoffs: unit utilities integrate to one") {
  GameInstance g = gen_random_instance(201, 3, 2, 2, 2);
  g.u_receiver = Table(g.num_actions(), g.num_states(), 1.0);
  const oracle::FullPayoffs d = oracle::full_profile_payoffs(g);
  for (int a = 0; a < g.num_actions(); ++a) {
    double total = 0.0;
    for (int p = 0; p < d.d_receiver.rows(); ++p) total += d.d_receiver(p, a);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("single sender payoffs match the definition directly") {
  const GameInstance g = gen_random_instance(203, 1, 3, 2, 2);
  const oracle::FullPayoffs d = oracle::full_profile_payoffs(g);
  for (int s = 0; s < g.num_signals(); ++s) {
    for (int a = 0; a < g.num_actions(); ++a) {
      double expect = 0.0;
      for (int t = 0; t < g.num_states(); ++t)
        expect += g.prior[t] * g.signaling(t, s) * g.u_receiver(a, t);
      CHECK(d.d_receiver(s, a) == doctest::Approx(expect).epsilon(1e-14));
    }
  }
}

TEST_CASE("grouping profile payoffs by class reproduces the compact vectors") {
  for (int i = 0; i < 6; ++i) {
    const GameInstance g = gen_random_instance(210 + i, 2 + i % 3, 2, 2 + i % 2, 2);
    const ClassPartition part = enumerate_classes(g.num_senders, g.num_signals());
    const auto [rr, rs] = compute_utility_vectors(g, g.signaling, part);
    const oracle::FullPayoffs d = oracle::full_profile_payoffs(g);
    Table grouped_r(part.num_classes(), g.num_actions(), 0.0);
    Table grouped_s(part.num_classes(), g.num_actions(), 0.0);
    for (int p = 0; p < d.d_receiver.rows(); ++p) {
      const int c =
          class_of_profile(decode_profile(p, g.num_senders, g.num_signals()), part);
      for (int a = 0; a < g.num_actions(); ++a) {
        grouped_r(c, a) += d.d_receiver(p, a);
        grouped_s(c, a) += d.d_sender(p, a);
      }
    }
    for (int c = 0; c < part.num_classes(); ++c) {
      for (int a = 0; a < g.num_actions(); ++a) {
        CHECK(grouped_r(c, a) == doctest::Approx(rr.values(c, a)).epsilon(1e-12));
        CHECK(grouped_s(c, a) == doctest::Approx(rs.values(c, a)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("counting matrices equal the closed form exactly, for either deviator") {
  for (int n = 2; n <= 6; ++n) {
    for (int S = 2; S <= 3; ++S) {
      const ClassPartition part = enumerate_classes(n, S);
      const DeviationSet set = build_deviation_set(DeviationKind::interim_full, S);
      for (const auto& phi : set.functions) {
        const DeviationMatrix closed = build_deviation_matrix(phi, part, 2);
        const DeviationMatrix first = oracle::brute_force_deviation_matrix(phi, part, n, 2, 0);
        const DeviationMatrix last =
            oracle::brute_force_deviation_matrix(phi, part, n, 2, n - 1);
        REQUIRE(closed.block.rows() == first.block.rows());
        // bitwise: both paths sum integer numerators before one division
        CHECK(closed.block.data() == first.block.data());
        CHECK(first.block.data() == last.block.data());
      }
    }
  }
}

TEST_CASE("identity map counts to identity blocks") {
  const ClassPartition part = enumerate_classes(4, 2);
  const DeviationMatrix m =
      oracle::brute_force_deviation_matrix(DeviationFunction{{0, 1}}, part, 4, 2);
  for (int r = 0; r < part.num_classes(); ++r)
    for (int c = 0; c < part.num_classes(); ++c)
      CHECK(m.block(r, c) == (r == c ? 1.0 : 0.0));
}

TEST_CASE("parallel kernels reproduce the serial reference bit for bit") {
  const GameInstance g = gen_random_instance(231, 6, 3, 3, 2);
  const oracle::FullPayoffs a = oracle::full_profile_payoffs(g);
  const oracle::FullPayoffs b = oracle::full_profile_payoffs_serial(g);
  CHECK(a.d_receiver.data() == b.d_receiver.data());
  CHECK(a.d_sender.data() == b.d_sender.data());

  const ClassPartition part = enumerate_classes(6, 3);
  const DeviationFunction phi{{1, 0, 1}};
  const DeviationMatrix mp = oracle::brute_force_deviation_matrix(phi, part, 6, 2);
  const DeviationMatrix ms = oracle::brute_force_deviation_matrix_serial(phi, part, 6, 2);
  CHECK(mp.block.data() == ms.block.data());
}

TEST_CASE("free profile program picks the best action per profile") {
  const GameInstance g = gen_random_instance(233, 2, 2, 2, 3);
  const DeviationSet set = build_deviation_set(DeviationKind::interim_reduced, 2);
  const oracle::FullLpResult res = oracle::solve_full_lp(g, kInf, set);
  const oracle::FullPayoffs d = oracle::full_profile_payoffs(g);
  double expect = 0.0;
  for (int p = 0; p < d.d_receiver.rows(); ++p) {
    double best = -1.0;
    for (int a = 0; a < g.num_actions(); ++a) best = std::max(best, d.d_receiver(p, a));
    expect += best;
  }
  CHECK(res.value == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("compact and profile programs agree on small instances") {
  for (int i = 0; i < 8; ++i) {
    const GameInstance g = gen_random_instance(240 + i, 2 + i % 2, 2, 2, 2);
    const DeviationKind kind = i % 2 ? DeviationKind::ex_ante : DeviationKind::interim_reduced;
    const DeviationSet set = build_deviation_set(kind, g.num_signals());
    const ClassPartition part = enumerate_classes(g.num_senders, g.num_signals());
    const auto [rr, rs] = compute_utility_vectors(g, g.signaling, part);
    const auto mats = build_deviation_matrices(set, part, g.num_actions());
    for (double eps : {0.0, 0.05, kInf}) {
      const double compact = solve_lp(build_lp(eps, rr, rs, mats)).value;
      const double full = oracle::solve_full_lp(g, eps, set).value;
      CHECK(compact == doctest::Approx(full).epsilon(1e-6));
    }
  }
}

TEST_CASE("three-state family solves to value one in profile space") {
  const GameInstance g = gen_fixture_instance("lb-X", 0.05);
  const DeviationSet set = build_deviation_set(DeviationKind::interim_reduced, 3);
  const oracle::FullLpResult res = oracle::solve_full_lp(g, 0.0, set);
  CHECK(res.value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("profile enumeration refuses oversized spaces") {
  const GameInstance big = gen_random_instance(250, 13, 2, 3, 2);  // 3^13 > 10^6
  CHECK_THROWS_AS((void)oracle::full_profile_payoffs(big), TooLarge);
  const DeviationSet set = build_deviation_set(DeviationKind::ex_ante, 3);
  CHECK_THROWS_AS((void)oracle::solve_full_lp(big, 0.0, set), TooLarge);
  const ClassPartition part = enumerate_classes(13, 3);
  CHECK_THROWS_AS(
      (void)oracle::brute_force_deviation_matrix(DeviationFunction{{0, 0, 0}}, part, 13, 2),
      TooLarge);
}
