// Times the OpenMP enumeration kernels against their serial references and
// the batch runner in both fan-out modes, verifying that outputs agree.
#include <chrono>
#include <cstdio>
#include <functional>
#include <vector>

#include <omp.h>

#include "ia/instances.hpp"
#include "ia/online.hpp"
#include "ia/oracle.hpp"

namespace {

using namespace ia;

double time_once(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

double best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < reps; ++i) best = std::min(best, time_once(fn));
  return best;
}

void row(const char* name, double serial_s, double omp_s, bool equal) {
  std::printf("%-34s %10.4fs %10.4fs %7.2fx   %s\n", name, serial_s, omp_s,
              serial_s / omp_s, equal ? "outputs equal" : "OUTPUTS DIFFER");
}

}  // namespace

int main() {
  std::printf("threads available: %d\n\n", omp_get_max_threads());
  std::printf("%-34s %11s %11s %8s\n", "kernel", "serial", "openmp", "speedup");

  // profile payoff enumeration: 3^12 = 531441 profiles
  {
    const GameInstance g = gen_random_instance(7, 12, 3, 3, 3);
    oracle::FullPayoffs a, b;
    const double ts = best_of(3, [&] { a = oracle::full_profile_payoffs_serial(g); });
    const double tp = best_of(3, [&] { b = oracle::full_profile_payoffs(g); });
    const bool eq = a.d_receiver.data() == b.d_receiver.data() &&
                    a.d_sender.data() == b.d_sender.data();
    row("profile payoffs (3^12 profiles)", ts, tp, eq);
  }

  // deviation operator by profile counting: 3^11 profiles per column pass
  {
    const int n = 11, S = 3;
    const ClassPartition part = enumerate_classes(n, S);
    const DeviationFunction phi{{1, 2, 0}};
    DeviationMatrix a, b;
    const double ts =
        best_of(3, [&] { a = oracle::brute_force_deviation_matrix_serial(phi, part, n, 2); });
    const double tp =
        best_of(3, [&] { b = oracle::brute_force_deviation_matrix(phi, part, n, 2); });
    const bool eq = a.block.data() == b.block.data();
    row("deviation counting (3^11)", ts, tp, eq);
  }

  // batch of full-feedback runs fanned out over seeds
  {
    const GameInstance g = gen_random_instance(11, 3, 2, 2, 2);
    const GroundTruth truth = compute_ground_truth(g, DeviationKind::interim_reduced);
    RunOptions opts;
    opts.keep_records = false;
    const int seeds = 8;
    const std::int64_t horizon = 2000;
    std::vector<double> serial_regret(seeds), omp_regret(seeds);
    const double ts = time_once([&] {
      for (int i = 0; i < seeds; ++i)
        serial_regret[i] = run_full_feedback(truth, horizon, 0.05, 100 + i, opts).regret_cum;
    });
    const double tp = time_once([&] {
#pragma omp parallel for schedule(dynamic, 1)
      for (int i = 0; i < seeds; ++i)
        omp_regret[i] = run_full_feedback(truth, horizon, 0.05, 100 + i, opts).regret_cum;
    });
    row("learning runs (8 seeds x 2000)", ts, tp, serial_regret == omp_regret);
  }

  return 0;
}
