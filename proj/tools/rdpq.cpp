#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "rdpq/bessel.hpp"
#include "rdpq/errors.hpp"
#include "rdpq/gains.hpp"
#include "rdpq/harness/acceptance.hpp"
#include "rdpq/harness/presets.hpp"
#include "rdpq/harness/scenario.hpp"
#include "rdpq/quantizers.hpp"
#include "rdpq/simd.hpp"

namespace {

using namespace rdpq;

ScenarioConfig loadScenario(const std::string& source) {
  if (presetText(source)) return presetConfig(source);
  return loadConfig(source);
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  out << text;
}

int cmdConstants(const std::string& source, const std::string& outPath) {
  auto cfg = loadScenario(source);
  const auto tables = buildTables(Grid(cfg.plant.intervals), cfg.plant.params, cfg.truncation);
  auto c = computeDesignConstants(tables, cfg.tuning);
  int code = kExitOk;
  std::string certText;
  for (const auto mode : {QuantMode::State, QuantMode::Input}) {
    const auto cert = validateBudget(cfg.budget, c, mode);
    certText += cert.message + "\n";
  }
  try {
    c = withBudget(c, cfg.budget);
  } catch (const InfeasibleError& e) {
    certText += std::string(e.what()) + "\n";
    code = kExitInfeasible;
  }
  std::cout << formatLedger(c) << certText;
  if (!outPath.empty()) writeFile(outPath, formatFlat(c));
  return code;
}

int cmdSimulate(const std::string& source, const std::string& outPath, const std::uint64_t* seed,
                const std::size_t* stride) {
  auto cfg = loadScenario(source);
  if (seed) cfg.seed = *seed;
  if (stride) cfg.stride = *stride;
  const auto r = runScenario(cfg, outPath);
  if (r.certificate) std::cout << r.certificate->message << "\n";
  if (r.detectionTime) std::printf("detection time t0 = %.6f\n", *r.detectionTime);
  if (r.bound) {
    std::printf("trajectory bound: coefficient %.6g, exponent %.6g, rate %.6g, min relative slack %.6g\n",
                r.bound->coefficient, r.bound->exponent, r.bound->rate, r.bound->minRelativeSlack);
  }
  if (!r.trajectory.records.empty()) {
    const auto& last = r.trajectory.records.back();
    std::printf("final t = %.6g, ||u||_2 = %.6g, ||v||_inf = %.6g\n", last.t, last.l2u, last.supv);
  }
  std::cout << r.message << "\n";
  return r.exitCode;
}

int cmdVerifyKernels(double lambda, double delay, std::size_t nx, std::size_t modes) {
  std::printf("besselI1(1) = %.12f\nbesselJ1(1) = %.12f\n", besselI1(1.0), besselJ1(1.0));
  std::printf("k(1,0.5) = %.9f\nl(1,0.5) = %.9f\n", kernelK(1.0, 0.5, lambda), kernelL(1.0, 0.5, lambda));
  const PlantParams params{lambda, delay};
  const Grid grid(nx);
  for (std::size_t n : {modes, 2 * modes}) {
    SeriesTruncation tr;
    tr.modeCount = n;
    tr.quadraturePoints = std::max<std::size_t>(tr.quadraturePoints, 20 * n + 1) | 1;
    const auto t = buildTables(grid, params, tr);
    const auto last = grid.size() - 1;
    std::vector<double> dk(grid.size()), dl(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      dk[j] = t.gammaGrid(0, j) - t.kGrid(last, j);
      dl[j] = t.deltaGrid(0, j) - t.lGrid(last, j);
    }
    std::printf("N = %zu: c1 = %.9f, |gamma(0,.)-k(1,.)|_2 = %.6g, |delta(0,.)-l(1,.)|_2 = %.6g, g(1,1) = %.6g, M3 = %.6g\n",
                n, t.sineCoeffsK[0], l2Norm(grid, dk), l2Norm(grid, dl), t.g1.back(), computeM3(t));
  }
  return 0;
}

int cmdVerifyQuantizer(double m, double delta, double mHat, double saturation, std::size_t samples,
                       std::uint64_t seed) {
  const auto spec = QuantizerSpec::fromBudget({m, delta, mHat}, saturation);
  const auto rep = verifyProperties(spec, samples, seed);
  std::cout << rep.text() << rep.summaryLine() << "\n";
  return rep.passed() ? 0 : 1;
}

int cmdVerifyOpenLoop(std::size_t count, std::uint64_t seed, double horizon) {
  auto base = presetConfig("openloop-eigen");
  const auto tables = buildTables(Grid(base.plant.intervals), base.plant.params, base.truncation);
  const auto spectral = computeSpectralConstants(base.plant.params);
  bool ok = true;
  for (std::size_t k = 0; k < count; ++k) {
    auto cfg = base;
    cfg.u0 = "random 5";
    cfg.v0 = "random 5";
    cfg.seed = seed + k;
    PlantState state(cfg.plant, makeInitialU(cfg), makeInitialV(cfg, nullptr, nullptr));
    const auto rep = openLoopBoundCheck(state, horizon, 10, spectral.overshoot, spectral.sigma1);
    std::printf("seed %llu: worst ratio %.6g at t = %.4f %s\n", static_cast<unsigned long long>(cfg.seed),
                rep.worstRatio, rep.worstTime, rep.passed ? "ok" : "VIOLATED");
    ok = ok && rep.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Switched predictor-feedback control of a delayed reaction-diffusion plant under quantization"};
  app.require_subcommand(1);

  std::string outPath;
  std::string source = "state-quant-ref";
  auto* constants = app.add_subcommand("constants", "Print the design-constant ledger");
  constants->add_option("config", source, "Config file or preset name")->capture_default_str();
  constants->add_option("--out", outPath, "Write name=value flat file");

  std::string simSource;
  std::uint64_t seed = 0;
  std::size_t stride = 0;
  auto* sim = app.add_subcommand("simulate", "Run a scenario and write the trajectory CSV");
  sim->add_option("config", simSource, "Config file or preset name")->required();
  sim->add_option("--out", outPath, "CSV output path");
  auto* seedOpt = sim->add_option("--seed", seed, "Override the config seed");
  auto* strideOpt = sim->add_option("--stride", stride, "Override the output stride")->check(CLI::PositiveNumber);

  double lambda = 11.0, delay = 0.1;
  std::size_t nx = 200, modes = 60;
  auto* vk = app.add_subcommand("verify-kernels", "Kernel oracles and truncation study");
  vk->add_option("--lambda", lambda)->capture_default_str();
  vk->add_option("--delay", delay)->capture_default_str();
  vk->add_option("--nx", nx)->capture_default_str();
  vk->add_option("--modes", modes)->capture_default_str();

  double qm = 1.0, qd = 0.1, qmh = 0.025, qsat = 10.0;
  std::size_t samples = 10000;
  auto* vq = app.add_subcommand("verify-quantizer", "Randomized check of the quantizer properties");
  vq->add_option("--M", qm)->capture_default_str();
  vq->add_option("--Delta", qd)->capture_default_str();
  vq->add_option("--M-hat", qmh)->capture_default_str();
  vq->add_option("--saturation", qsat)->capture_default_str();
  vq->add_option("--samples", samples)->capture_default_str();
  vq->add_option("--seed", seed)->capture_default_str();

  std::size_t count = 20;
  double horizon = 1.0;
  auto* vo = app.add_subcommand("verify-openloop", "Open-loop growth bound on random initial data");
  vo->add_option("--count", count)->capture_default_str();
  vo->add_option("--seed", seed)->capture_default_str();
  vo->add_option("--horizon", horizon)->capture_default_str();

  AcceptanceOptions acc;
  auto* accept = app.add_subcommand("acceptance", "Run the acceptance suite");
  accept->add_option("--only", acc.only, "Criterion ids to run");
  accept->add_option("--tolerance-scale", acc.toleranceScale)->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*constants) return cmdConstants(source, outPath);
    if (*sim) return cmdSimulate(simSource, outPath, *seedOpt ? &seed : nullptr, *strideOpt ? &stride : nullptr);
    if (*vk) return cmdVerifyKernels(lambda, delay, nx, modes);
    if (*vq) return cmdVerifyQuantizer(qm, qd, qmh, qsat, samples, seed);
    if (*vo) return cmdVerifyOpenLoop(count, seed, horizon);
    if (*accept) {
      std::cout << "simd backend: " << simd::backendName(simd::activeBackend()) << "\n";
      return runAcceptance(acc, std::cout).allPassed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
