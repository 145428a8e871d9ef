// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "sig2d/commands.hpp"
#include "sig2d/parallel.hpp"
#include "sig2d/pipeline.hpp"
#include "sig2d/symmetry.hpp"
#include "test_util.hpp"

using namespace sig2d;
using namespace sig2d::testing;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %-26s %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Test accuracy of the replication setup: 8 classes, 64 px, 10/100 split,
// 100 trees; dataset and forest share the seed.
double replication_accuracy(std::uint64_t seed, bool symmetrize, std::size_t n_pcs) {
  std::vector<ImageField> sheets;
  std::vector<std::string> names;
  for (auto& s : synth_textures(8, 256, seed)) {
    names.push_back(s.name);
    sheets.push_back(std::move(s.sheet));
  }
  const DatasetManifest m = build_manifest(sheets, names, 10, 100, 64, seed);
  RunConfig c;
  c.symmetrize = symmetrize;
  c.n_pcs = n_pcs;
  const Extraction ex = extract_features(m, sheets, c);
  ForestParams p;
  p.n_trees = 100;
  p.seed = seed;
  return evaluate(train_on_table(ex.table, p).model, ex.table).accuracy;
}

// Smallest k with P(X <= k) >= q for X ~ Binomial(n, p).
std::size_t binomial_quantile(std::size_t n, double p, double q) {
  double cdf = 0.0;
  for (std::size_t k = 0; k <= n; ++k) {
    const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                           k * std::log(p) + (n - k) * std::log1p(-p);
    cdf += std::exp(log_pmf);
    if (cdf >= q) return k;
  }
  return n;
}

void oracle_equivalence() {
  const auto t0 = Clock::now();
  double worst = 0.0, worst_indep = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const ImageField x = random_image(8, 8, seed);
    const DifferenceScheme scheme = seed % 2 ? DifferenceScheme::Central : DifferenceScheme::Forward;
    const Window w = full_window(x, scheme);
    const bool central = scheme == DifferenceScheme::Central;
    for (SignatureKind kind : kSecondOrderKinds) {
      for (std::size_t i1 = 0; i1 < 3; ++i1) {
        for (std::size_t i2 = 0; i2 < 3; ++i2) {
          const double fast = sig_second(x, kind, i1, i2, w, scheme);
          const double brute = brute_force_second(x, kind, i1, i2, w, scheme);
          const double indep = oracle_second(x, kind, i1, i2, w, central);
          worst = std::max(worst, std::abs(fast - brute) / (1 + std::abs(brute)));
          worst_indep = std::max(worst_indep, std::abs(fast - indep) / (1 + std::abs(indep)));
        }
      }
    }
  }
  const double t = seconds_since(t0);
  report(worst <= 1e-9 && worst_indep <= 1e-9 && t < 30, "oracle-equivalence",
         fmt("max rel dev %.2e (brute force) %.2e (independent), %.2f s (limit 1e-9, 30 s)", worst,
             worst_indep, t));
}

void telescoping() {
  const auto t0 = Clock::now();
  Rng rng(77);
  double worst = 0.0;
  for (std::uint64_t j = 0; j < 1000; ++j) {
    const std::size_t h = 2 + uniform_index(rng, 31), w = 2 + uniform_index(rng, 31);
    const ImageField x = random_image(h, w, 10'000 + j);
    std::size_t a = uniform_index(rng, h), b = uniform_index(rng, h - 1);
    if (b >= a) ++b; else std::swap(a, b);
    std::size_t c = uniform_index(rng, w), d = uniform_index(rng, w - 1);
    if (d >= c) ++d; else std::swap(c, d);
    const Window win{a, b, c, d};
    for (std::size_t i = 0; i < 3; ++i) {
      const double corner = x(b, d, i) - x(a, d, i) - x(b, c, i) + x(a, c, i);
      worst = std::max(worst, std::abs(sig_first_12(x, i, win) - corner));
    }
  }
  const double t = seconds_since(t0);
  report(worst <= 1e-12 && t < 5, "telescoping",
         fmt("max abs dev %.2e over 1000 pairs, %.2f s (limit 1e-12, 5 s)", worst, t));
}

void d4_invariance() {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::size_t n = 6 + seed % 11;
    const ImageField x = random_image(n, n, 500 + seed);
    for (DifferenceScheme scheme : {DifferenceScheme::Forward, DifferenceScheme::Central}) {
      const SignatureVector base = symmetrized_signature(x, scheme);
      for (D4Element g : kD4Elements) {
        const SignatureVector moved = symmetrized_signature(apply_d4(x, g), scheme);
        for (std::size_t j = 0; j < base.entries.size(); ++j) {
          worst = std::max(worst, std::abs(moved.entries[j] - base.entries[j]));
        }
      }
    }
  }
  report(worst <= 1e-9, "d4-invariance",
         fmt("max per-entry dev %.2e over 50 images x 8 elements (limit 1e-9)", worst));
}

void scaling() {
  const ScalingSlopes s = scaling_slopes();
  const bool ok = std::abs(s.first - 2) <= 0.5 && std::abs(s.second - 4) <= 0.5;
  report(ok, "scaling-exponents",
         fmt("first-order slope %.3f (2 +- 0.5), second-order slope %.3f (4 +- 0.5)", s.first,
             s.second));
}

void replication() {
  set_num_threads(1);
  const auto t0 = Clock::now();
  double sum = 0.0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const double acc = replication_accuracy(seed, true, 3);
    sum += acc;
    per_seed += fmt("%.3f ", acc);
  }
  const double t = seconds_since(t0);
  set_num_threads(0);
  const double mean = sum / 3;
  report(mean >= 0.90 && t < 300, "synthetic-replication",
         fmt("mean test accuracy %.4f over seeds 1-3 [ %s], %.1f s single-threaded (>= 0.90, < 300 s)",
             mean, per_seed.c_str(), t));
}

void chance_baseline() {
  const std::size_t classes = 8, n_test = 100, n = classes * n_test;
  std::vector<ImageField> sheets;
  std::vector<std::string> names;
  for (auto& s : synth_textures(classes, 256, 1)) {
    names.push_back(s.name);
    sheets.push_back(std::move(s.sheet));
  }
  const DatasetManifest m = build_manifest(sheets, names, 10, n_test, 64, 1);
  RunConfig c;
  c.signatures = false;
  c.baseline = true;
  const Extraction ex = extract_features(m, sheets, c);
  ForestParams p;
  p.seed = 1;
  const EvalReport r = evaluate(train_on_table(ex.table, p).model, ex.table);
  const double p0 = 1.0 / classes;
  const double lo = static_cast<double>(binomial_quantile(n, p0, 0.005)) / n;
  const double hi = static_cast<double>(binomial_quantile(n, p0, 0.995)) / n;
  report(r.n == n && ex.table.header.empty() && r.accuracy >= lo && r.accuracy <= hi,
         "chance-baseline",
         fmt("accuracy %.4f with 0 features, 99%% binomial band [%.4f, %.4f] around 1/%zu", r.accuracy,
             lo, hi, classes));
}

void symmetrization_benefit() {
  double on = 0.0, off = 0.0;
  std::string detail;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const double a = replication_accuracy(seed, true, 3), b = replication_accuracy(seed, false, 3);
    on += a / 5;
    off += b / 5;
    detail += fmt("%.3f/%.3f ", a, b);
  }
  report(on >= off, "symmetrization-benefit",
         fmt("mean accuracy on %.4f vs off %.4f over seeds 1-5 [ %s]", on, off, detail.c_str()));
}

void determinism() {
  const fs::path root = fs::temp_directory_path() / "sig2d_acceptance_determinism";
  fs::remove_all(root);
  std::ostringstream log;
  const std::size_t many = std::max<std::size_t>(4, std::thread::hardware_concurrency());

  struct Run {
    std::string csv, model;
    double accuracy;
  };
  auto run = [&](const std::string& tag, std::size_t threads) {
    set_num_threads(threads);
    const fs::path dir = root / tag;
    cli::SynthOptions so;
    so.data_dir = (dir / "data").string();
    const std::string manifest = cli::cmd_synth(so, log);
    RunConfig rc;
    rc.n_pcs = 3;
    cli::cmd_extract(manifest, rc, (dir / "features.csv").string(), std::nullopt, log);
    ForestParams p;
    p.seed = 1;
    cli::cmd_train((dir / "features.csv").string(), p, (dir / "model.json").string(), log);
    const EvalReport r =
        cli::cmd_eval((dir / "model.json").string(), (dir / "features.csv").string(), Split::Test,
                      std::nullopt, log);
    return Run{slurp(dir / "features.csv"), slurp(dir / "model.json"), r.accuracy};
  };
  const Run a = run("t1a", 1), b = run("t1b", 1), c = run("tNa", many), d = run("tNb", many);
  set_num_threads(0);
  fs::remove_all(root);

  auto same = [](const Run& x, const Run& y) {
    return x.csv == y.csv && x.model == y.model && x.accuracy == y.accuracy;
  };
  const bool ok = !a.csv.empty() && !a.model.empty() && same(a, b) && same(c, d) && same(a, c);
  report(ok, "determinism",
         fmt("CSV %zu bytes, model %zu bytes, accuracy %.4f identical across 2 runs at 1 and %zu threads",
             a.csv.size(), a.model.size(), a.accuracy, many));
}

void performance() {
  const std::vector<std::size_t> sizes = {64, 128};
  const auto rows = run_bench(sizes, 2024, 5, 64);
  const double ratio = rows[1].fast_seconds / rows[0].fast_seconds;
  const double oracle_ratio = rows[0].oracle_seconds.value_or(0.0) / rows[0].fast_seconds;
  report(ratio < 6 && oracle_ratio >= 20 && rows[0].max_deviation <= 1e-9, "performance",
         fmt("fast 128/64 time ratio %.2f (< 6), oracle/fast at 64 = %.0fx (>= 20)", ratio,
             oracle_ratio));
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void()>>> checks = {
      {"oracle-equivalence", oracle_equivalence},
      {"telescoping", telescoping},
      {"d4-invariance", d4_invariance},
      {"scaling-exponents", scaling},
      {"synthetic-replication", replication},
      {"chance-baseline", chance_baseline},
      {"symmetrization-benefit", symmetrization_benefit},
      {"determinism", determinism},
      {"performance", performance},
  };
  for (const auto& [name, check] : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      report(false, name, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, checks.size());
  return failures == 0 ? 0 : 1;
}
