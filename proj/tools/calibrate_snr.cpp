// Sweeps synthetic-subject nuisance parameters and reports LOTO accuracy for
// the three evaluated class pairs. Used to pick the default trial jitter.
#include "mindsculpt/classifier.hpp"
#include "mindsculpt/pipeline.hpp"
#include "mindsculpt/synth.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <utility>
#include <vector>

int main(int argc, char** argv) {
  CLI::App app{"Report LOTO accuracy of synthetic subjects across nuisance settings"};
  std::vector<double> jitters;
  std::vector<double> snrs{1.0};
  std::vector<double> spreads;
  std::size_t seeds = 3;
  std::size_t k = 23;
  double artifacts = 0.0;
  bool sweep = false;
  app.add_option("--jitter", jitters, "trial jitter values (default: built-in)");
  app.add_option("--snr", snrs, "snr values");
  app.add_option("--spread", spreads, "disengaged trial fractions (default: built-in)");
  app.add_option("--seeds", seeds, "number of subjects");
  app.add_option("--k", k, "selected feature count");
  app.add_option("--artifacts", artifacts, "artifact bursts per minute");
  app.add_flag("--sweep", sweep, "also run the k = 4..60 sweep");
  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::warn);

  const std::array<std::pair<int, int>, 3> pairs{{{0, 1}, {3, 2}, {1, 3}}};
  if (jitters.empty()) jitters.push_back(mindsculpt::default_profile(1).trial_jitter);
  if (spreads.empty()) spreads.push_back(mindsculpt::default_profile(1).disengaged_fraction);

  for (double snr : snrs) {
    for (double spread : spreads) {
      for (double jitter : jitters) {
        const auto t0 = std::chrono::steady_clock::now();
        double acc_sum = 0.0;
        double resub_sum = 0.0;
        std::vector<double> sweep_sum;
        std::size_t n = 0;
        for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
          auto profile = mindsculpt::default_profile(seed, snr);
          profile.trial_jitter = jitter;
          profile.disengaged_fraction = spread;
          auto session = mindsculpt::generate_session({}, profile);
          if (artifacts > 0.0) session.recording = mindsculpt::inject_artifacts(session.recording, artifacts, seed).recording;
          const auto sf = mindsculpt::session_features(session, {}, {});
          for (const auto& [a, b] : pairs) {
            const std::array<int, 2> cls{a, b};
            mindsculpt::TrainOptions opts;
            opts.k = k;
            const auto rep = mindsculpt::cross_validate(sf.features, cls, opts);
            std::printf("snr %.2f jitter %.3f seed %llu pair %dv%d loto %.3f resub %.3f\n", snr, jitter,
                        static_cast<unsigned long long>(seed), a, b, rep.mean_accuracy, rep.resubstitution_accuracy);
            acc_sum += rep.mean_accuracy;
            resub_sum += rep.resubstitution_accuracy;
            ++n;
            if (sweep) {
              const auto pts = mindsculpt::accuracy_vs_k(sf.features, cls, 4, 60, opts);
              sweep_sum.resize(pts.size(), 0.0);
              for (std::size_t i = 0; i < pts.size(); ++i) sweep_sum[i] += pts[i].mean_accuracy;
            }
          }
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("== snr %.2f disengaged %.3f jitter %.3f mean loto %.3f mean resub %.3f (%.1f s)\n", snr, spread, jitter,
                    acc_sum / static_cast<double>(n), resub_sum / static_cast<double>(n), secs);
        if (sweep) {
          for (std::size_t i = 0; i < sweep_sum.size(); ++i) {
            std::printf("   k %zu  %.4f\n", i + 4, sweep_sum[i] / static_cast<double>(n));
          }
        }
      }
    }
  }
  return 0;
}
