// panoview command-line driver: generate, extract, evaluate, heatmap, score.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "panoview/panoview.hpp"

namespace fs = std::filesystem;
using namespace panoview;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitIo = 3;

std::mutex g_logMutex;

void logLine(const std::string& line) {
  std::lock_guard lock(g_logMutex);
  std::cerr << line << '\n';
}

int exitCodeFor(const Error& e) { return e.kind() == ErrorKind::IoError ? kExitIo : kExitInput; }

struct Options {
  std::vector<std::string> inputs;
  std::string out = ".";
  std::uint64_t seed = 0;
  int n = 3;
  int m = 5;
  std::vector<double> fov{110.0};
  int size = 224;
  double gamma = 0.7;
  double beta = 100.0;
  double sigma = 0.2;
  std::vector<double> step{24.0};
  std::vector<double> start{0.0, 0.0};
  std::string gt;
  double recThreshold = kDefaultRecThreshold;
  std::size_t gtSubsample = 0;
  std::string scorer = "entropy";
  bool csv = false;
  bool viewports = false;
  bool perPair = false;
  std::vector<double> center{0.0, 0.0};
};

RpsConfig rpsConfig(const Options& o) {
  RpsConfig cfg;
  cfg.numSequences = o.n;
  cfg.seqLength = o.m;
  cfg.fov = {o.fov.at(0), o.fov.size() > 1 ? o.fov[1] : o.fov[0]};
  cfg.viewportSize = o.size;
  cfg.gamma = o.gamma;
  cfg.beta = o.beta;
  cfg.equatorStd = o.sigma;
  cfg.step = {o.step.at(0), o.step.size() > 1 ? o.step[1] : o.step[0]};
  cfg.seed = o.seed;
  cfg.validate();
  return cfg;
}

std::string stemOf(const fs::path& p) {
  std::string stem = p.stem().string();
  for (const std::string suffix : {".sequences", ".metrics", ".report"}) {
    if (stem.size() > suffix.size() && stem.ends_with(suffix)) stem.resize(stem.size() - suffix.size());
  }
  return stem;
}

fs::path ensureOutDir(const std::string& out) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (!fs::is_directory(out)) throw Error(ErrorKind::IoError, "cannot create output directory " + out);
  return fs::path(out);
}

unsigned workerCap() {
  if (const char* env = std::getenv("PANOVIEW_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    logLine("warning: ignoring invalid PANOVIEW_THREADS='" + std::string(env) + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `job` for every input on a bounded pool; returns the worst exit code.
template <typename Job>
int forEachInput(const std::vector<std::string>& inputs, Job job) {
  std::atomic<std::size_t> next{0};
  std::atomic<int> worst{kExitOk};
  auto worker = [&] {
    for (std::size_t i = next++; i < inputs.size(); i = next++) {
      int code = kExitOk;
      try {
        job(fs::path(inputs[i]));
      } catch (const Error& e) {
        logLine("error: " + inputs[i] + ": " + e.what());
        code = exitCodeFor(e);
      } catch (const std::exception& e) {
        logLine("error: " + inputs[i] + ": " + e.what());
        code = kExitInput;
      }
      int cur = worst.load();
      while (code > cur && !worst.compare_exchange_weak(cur, code)) {
      }
    }
  };
  const unsigned threads = std::min<unsigned>(workerCap(), static_cast<unsigned>(inputs.size()));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }
  return worst.load();
}

std::vector<SphereCoord> startsFor(const Options& o, int n) {
  if (o.start.size() != 2) throw Error(ErrorKind::InvalidConfig, "--start expects lat lon");
  return std::vector<SphereCoord>(static_cast<std::size_t>(n), SphereCoord(o.start[0], o.start[1]));
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void writeSequences(const fs::path& outDir, const std::string& stem, const RpsConfig& cfg,
                    const std::vector<ViewportSequence>& seqs) {
  writeText(outDir / (stem + ".sequences.json"), dump(sequencesToJson(cfg, seqs)));
}

int cmdGenerate(const Options& o) {
  const RpsConfig cfg = rpsConfig(o);
  const fs::path outDir = ensureOutDir(o.out);
  return forEachInput(o.inputs, [&](const fs::path& input) {
    const ErpImage img = loadErp(input);
    const auto seqs = generateAll(img, startsFor(o, cfg.numSequences), cfg);
    const std::string stem = stemOf(input);
    writeSequences(outDir, stem, cfg, seqs);
    if (o.csv) writeText(outDir / (stem + ".sequences.csv"), sequencesToCsv(seqs));
    if (o.viewports) {
      const fs::path dir = outDir / (stem + "_viewports");
      std::error_code ec;
      fs::create_directories(dir, ec);
      const ViewportProjector projector(cfg.fov, cfg.viewportSize, cfg.viewportSize);
      for (std::size_t i = 0; i < seqs.size(); ++i) {
        for (std::size_t t = 0; t < seqs[i].centers.size(); ++t) {
          savePng(projector.extract(img, seqs[i].centers[t]).pixels,
                  dir / ("s" + std::to_string(i) + "_t" + std::to_string(t) + ".png"));
        }
      }
    }
  });
}

int cmdExtract(const Options& o) {
  if (o.center.size() != 2) throw Error(ErrorKind::InvalidConfig, "--center expects lat lon");
  const FieldOfView fov{o.fov.at(0), o.fov.size() > 1 ? o.fov[1] : o.fov[0]};
  fov.validate();
  const SphereCoord center(o.center[0], o.center[1]);
  const fs::path outDir = ensureOutDir(o.out);
  return forEachInput(o.inputs, [&](const fs::path& input) {
    const ErpImage img = loadErp(input);
    savePng(extractViewport(img, center, fov, o.size).pixels, outDir / (stemOf(input) + ".viewport.png"));
  });
}

int cmdEvaluate(const Options& o) {
  if (o.gt.empty()) throw Error(ErrorKind::InvalidConfig, "evaluate needs --gt");
  if (!(o.recThreshold > 0.0)) throw Error(ErrorKind::InvalidThreshold, "--rec-threshold must be positive");
  std::optional<std::size_t> sub;
  if (o.gtSubsample > 0) sub = o.gtSubsample;
  const auto gt = loadScanpaths(o.gt, sub);
  const fs::path outDir = ensureOutDir(o.out);
  return forEachInput(o.inputs, [&](const fs::path& input) {
    const auto pseudo = loadScanpaths(input);
    const MetricReport method = compareSets(pseudo, gt, o.recThreshold, o.perPair);

    std::size_t length = 0;
    for (const auto& p : pseudo) length = std::max(length, p.points.size());
    const auto random = randomBaseline(pseudo.size(), length, o.seed);
    const MetricReport randomRow = compareSets(random, gt, o.recThreshold);

    Json root;
    root["image"] = stemOf(input);
    root["pseudoCount"] = pseudo.size();
    root["gtCount"] = gt.size();
    root["pairCount"] = method.pairCount;
    root["recThreshold"] = o.recThreshold;
    Json rows = Json::array();
    rows.push_back(metricRowToJson("Random Baseline", randomRow.mean));
    rows.push_back(metricRowToJson("RPS", method.mean));
    if (gt.size() >= 2) {
      const MetricValues human{humanBaseline(gt, Metric::Lev), humanBaseline(gt, Metric::Dtw),
                               humanBaseline(gt, Metric::Rec, o.recThreshold)};
      rows.push_back(metricRowToJson("Human Baseline", human));
    } else {
      logLine("warning: " + o.gt + ": TooFewPaths, human baseline omitted (needs at least two GT paths)");
    }
    root["rows"] = rows;
    if (o.perPair) {
      Json per = Json::array();
      for (const auto& v : method.perPair) per.push_back(Json{{"lev", v.lev}, {"dtw", v.dtw}, {"rec", v.rec}});
      root["perPair"] = std::move(per);
    }
    writeText(outDir / (stemOf(input) + ".metrics.json"), dump(root));

    std::ostringstream table;
    table << std::fixed << std::setprecision(2);
    table << std::left << std::setw(18) << "method" << std::right << std::setw(10) << "LEV" << std::setw(12) << "DTW"
          << std::setw(10) << "REC" << '\n';
    for (const auto& row : rows) {
      table << std::left << std::setw(18) << row["method"].get<std::string>() << std::right << std::setw(10)
            << row["lev"].get<double>() << std::setw(12) << row["dtw"].get<double>() << std::setw(10)
            << row["rec"].get<double>() << '\n';
    }
    std::lock_guard lock(g_logMutex);
    std::cout << table.str();
  });
}

int cmdHeatmap(const Options& o) {
  const fs::path outDir = ensureOutDir(o.out);
  return forEachInput(o.inputs, [&](const fs::path& input) {
    const SequenceFile file = loadSequences(input);
    const DensityGrid grid = accumulateDensity(file.sequences);
    if (grid.total == 0) logLine("warning: " + input.string() + ": no viewport centers, heatmap is black");
    const std::string stem = stemOf(input);
    writeHeatmap(grid, outDir / (stem + ".heatmap.png"));
    writeText(outDir / (stem + ".density.json"), dump(densityToJson(stem, grid)));
  });
}

int cmdScore(const Options& o) {
  const RpsConfig cfg = rpsConfig(o);
  if (o.scorer != "entropy") throw Error(ErrorKind::InvalidConfig, "unknown scorer '" + o.scorer + "'");
  const fs::path outDir = ensureOutDir(o.out);
  return forEachInput(o.inputs, [&](const fs::path& input) {
    const ErpImage img = loadErp(input);
    const auto seqs = generateAll(img, startsFor(o, cfg.numSequences), cfg);
    const EntropyScorer scorer(cfg);
    const auto scores = scoreSequences(img, seqs, scorer);
    const double finalScore = aggregateQuality(scores);
    const DensityGrid grid = accumulateDensity(seqs);
    const std::string stem = stemOf(input);
    writeSequences(outDir, stem, cfg, seqs);
    writeHeatmap(grid, outDir / (stem + ".heatmap.png"));
    writeText(outDir / (stem + ".report.json"), dump(scoreReportToJson(stem, finalScore, scores, grid)));
  });
}

void addInputs(CLI::App* cmd, Options& o, const std::string& what) {
  cmd->add_option("--input,-i", o.inputs, what)->required()->expected(1, -1);
  cmd->add_option("--out,-o", o.out, "Output directory")->capture_default_str();
}

void addRps(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Master RNG seed")->capture_default_str();
  cmd->add_option("--n", o.n, "Number of sequences")->capture_default_str();
  cmd->add_option("--m", o.m, "Viewports per sequence")->capture_default_str();
  cmd->add_option("--fov", o.fov, "Field of view in degrees (h [v])")->expected(1, 2)->capture_default_str();
  cmd->add_option("--size", o.size, "Viewport size in pixels")->capture_default_str();
  cmd->add_option("--gamma", o.gamma, "Inhibition-of-return factor")->capture_default_str();
  cmd->add_option("--beta", o.beta, "Scale factor of the combined probability")->capture_default_str();
  cmd->add_option("--sigma", o.sigma, "Equator-bias std in normalized latitude")->capture_default_str();
  cmd->add_option("--step", o.step, "Transition distance in degrees (dlat [dlon])")
      ->expected(1, 2)
      ->capture_default_str();
  cmd->add_option("--start", o.start, "Starting point lat lon")->expected(2)->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viewport sequence generation and scanpath evaluation for equirectangular panoramas"};
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "Generate viewport sequences");
  addInputs(gen, o, "ERP panorama(s), PNG or JPEG");
  addRps(gen, o);
  gen->add_flag("--csv", o.csv, "Also write the sequences as CSV");
  gen->add_flag("--viewports", o.viewports, "Also write every viewport as PNG");

  auto* ext = app.add_subcommand("extract", "Render a single viewport");
  addInputs(ext, o, "ERP panorama(s), PNG or JPEG");
  ext->add_option("--center", o.center, "Viewport center lat lon")->expected(2)->capture_default_str();
  ext->add_option("--fov", o.fov, "Field of view in degrees (h [v])")->expected(1, 2)->capture_default_str();
  ext->add_option("--size", o.size, "Viewport size in pixels")->capture_default_str();

  auto* eval = app.add_subcommand("evaluate", "Compare generated sequences with ground-truth scanpaths");
  addInputs(eval, o, "Sequence or scanpath file(s)");
  eval->add_option("--gt", o.gt, "Ground-truth scanpaths (JSON or CSV)")->required();
  eval->add_option("--rec-threshold", o.recThreshold, "REC threshold in degrees")->capture_default_str();
  eval->add_option("--gt-subsample", o.gtSubsample, "Subsample each GT path to this many points (0 = off)")
      ->capture_default_str();
  eval->add_option("--seed", o.seed, "Seed of the random baseline")->capture_default_str();
  eval->add_flag("--per-pair", o.perPair, "Include per-pair values");

  auto* heat = app.add_subcommand("heatmap", "Render the density of viewport centers");
  addInputs(heat, o, "Sequence file(s)");

  auto* score = app.add_subcommand("score", "Generate, score and aggregate");
  addInputs(score, o, "ERP panorama(s), PNG or JPEG");
  addRps(score, o);
  score->add_option("--scorer", o.scorer, "Per-sequence scorer")->check(CLI::IsMember({"entropy"}))->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*gen) return cmdGenerate(o);
    if (*ext) return cmdExtract(o);
    if (*eval) return cmdEvaluate(o);
    if (*heat) return cmdHeatmap(o);
    if (*score) return cmdScore(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exitCodeFor(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitInput;
}
