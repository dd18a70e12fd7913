#include "ia/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include <json.hpp>

#include "ia/errors.hpp"
#include "ia/instances.hpp"
#include "ia/rng.hpp"

namespace ia {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr std::uint64_t kBootstrapSeed = 0x51073;
constexpr int kBootstrapDraws = 1000;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

DeviationKind kind_from_string(const std::string& s) {
  if (s == "ex-ante") return DeviationKind::ex_ante;
  if (s == "interim") return DeviationKind::interim_reduced;
  throw ConfigError("deviations must be 'ex-ante' or 'interim', got '" + s + "'");
}

std::string kind_to_string(DeviationKind k) {
  return k == DeviationKind::ex_ante ? "ex-ante" : "interim";
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double lsq_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string sanitize_cell(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

void write_run_csv(const std::string& path, const RunResult& run) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw ConfigError("cannot write " + path);
  std::fputs("t,nu,action,theta,class,u_r,u_s,regret_inst,regret_cum,viol_raw_inst,viol_raw_cum,viol_clip_cum\n", f);
  for (const RoundRecord& r : run.records) {
    std::fprintf(f, "%lld,%.17g,%d,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                 static_cast<long long>(r.t), r.nu, r.action, r.theta, r.klass, r.u_receiver,
                 r.u_sender, r.regret_inst, r.regret_cum, r.viol_raw_inst, r.viol_raw_cum,
                 r.viol_clip_cum);
  }
  std::fclose(f);
}

struct ChartPoint {
  double t = 0, regret = 0, viol = 0;
};

std::vector<ChartPoint> chart_samples(const RunResult& run) {
  std::vector<ChartPoint> pts;
  const std::size_t n = run.records.size();
  if (n == 0) return pts;
  const std::size_t step = std::max<std::size_t>(1, n / 500);
  for (std::size_t i = 0; i < n; i += step)
    pts.push_back({static_cast<double>(run.records[i].t), run.records[i].regret_cum,
                   run.records[i].viol_raw_cum});
  if ((n - 1) % step != 0)
    pts.push_back({static_cast<double>(run.records[n - 1].t), run.records[n - 1].regret_cum,
                   run.records[n - 1].viol_raw_cum});
  return pts;
}

void write_chart_svg(const std::string& path, const std::vector<std::vector<ChartPoint>>& curves,
                     const std::string& title) {
  // median across seeds at each shared checkpoint
  std::vector<ChartPoint> med;
  if (!curves.empty()) {
    const std::size_t len = curves.front().size();
    for (std::size_t i = 0; i < len; ++i) {
      std::vector<double> rs, vs;
      for (const auto& c : curves) {
        if (i < c.size()) {
          rs.push_back(c[i].regret);
          vs.push_back(c[i].viol);
        }
      }
      if (rs.empty()) break;
      med.push_back({curves.front()[i].t, median_of(rs), median_of(vs)});
    }
  }

  const double W = 960, H = 540, ml = 70, mr = 20, mt = 40, mb = 50;
  double tmax = 1, ymin = 0, ymax = 1;
  for (const auto& p : med) {
    tmax = std::max(tmax, p.t);
    ymin = std::min({ymin, p.regret, p.viol});
    ymax = std::max({ymax, p.regret, p.viol});
  }
  if (ymax <= ymin) ymax = ymin + 1;
  auto X = [&](double t) { return ml + (W - ml - mr) * (t / tmax); };
  auto Y = [&](double y) { return H - mb - (H - mt - mb) * ((y - ymin) / (ymax - ymin)); };

  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << " " << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        "font-size=\"16\">" << title << "</text>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\""
     << H - mb << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb
     << "\" stroke=\"black\"/>\n";
  if (ymin < 0)
    os << "<line x1=\"" << ml << "\" y1=\"" << Y(0) << "\" x2=\"" << W - mr << "\" y2=\"" << Y(0)
       << "\" stroke=\"#cccccc\" stroke-dasharray=\"4 4\"/>\n";
  auto polyline = [&](auto get, const char* color) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& p : med) os << X(p.t) << "," << Y(get(p)) << " ";
    os << "\"/>\n";
  };
  polyline([](const ChartPoint& p) { return p.regret; }, "#1f6fb4");
  polyline([](const ChartPoint& p) { return p.viol; }, "#c43b3b");
  os << "<text x=\"" << W - mr - 240 << "\" y=\"" << mt + 12
     << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#1f6fb4\">median cumulative "
        "regret</text>\n";
  os << "<text x=\"" << W - mr - 240 << "\" y=\"" << mt + 28
     << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#c43b3b\">median cumulative "
        "violation (raw)</text>\n";
  os << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 12
     << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">round t (1 to "
     << static_cast<long long>(tmax) << ")</text>\n";
  os << "<text x=\"16\" y=\"" << (mt + H - mb) / 2
     << "\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 16 "
     << (mt + H - mb) / 2 << ")\">cumulative value (" << fmt17(ymin).substr(0, 8) << " to "
     << fmt17(ymax).substr(0, 8) << ")</text>\n";
  os << "</svg>\n";
}

GameInstance resolve_instance(const ExperimentConfig& cfg) {
  const int sources = (!cfg.instance_file.empty() ? 1 : 0) + (cfg.random.set ? 1 : 0) +
                      (cfg.fixture.set ? 1 : 0);
  if (sources != 1) throw ConfigError("exactly one instance source must be given");
  if (!cfg.instance_file.empty()) return load_instance(cfg.instance_file);
  if (cfg.random.set)
    return gen_random_instance(cfg.random.seed, cfg.random.num_senders, cfg.random.states,
                               cfg.random.signals, cfg.random.actions);
  return gen_fixture_instance(cfg.fixture.name, cfg.fixture.eps);
}

void write_mechanism_csv(const std::string& path, const GroundTruth& truth,
                         const SymmetricMechanism& xi, double value) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << "class";
  for (const auto& a : truth.game.actions) os << "," << a;
  os << "\n";
  for (int c = 0; c < truth.partition.num_classes(); ++c) {
    const auto& cnt = truth.partition.counts[c];
    std::string label;
    for (std::size_t s = 0; s < cnt.size(); ++s)
      label += (s ? ":" : "") + std::to_string(cnt[s]);
    os << label;
    for (int a = 0; a < xi.probs.cols(); ++a) os << "," << fmt17(xi.probs(c, a));
    os << "\n";
  }
  os << "# value," << fmt17(value) << "\n";
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config JSON parse failure: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    const json& inst = j.at("instance");
    if (inst.contains("file")) cfg.instance_file = inst["file"].get<std::string>();
    if (inst.contains("random")) {
      const json& r = inst["random"];
      cfg.random.set = true;
      cfg.random.seed = r.value("seed", std::uint64_t{1});
      cfg.random.num_senders = r.at("n").get<int>();
      cfg.random.states = r.at("states").get<int>();
      cfg.random.signals = r.at("signals").get<int>();
      cfg.random.actions = r.at("actions").get<int>();
    }
    if (inst.contains("fixture")) {
      cfg.fixture.set = true;
      cfg.fixture.name = inst["fixture"].at("name").get<std::string>();
      cfg.fixture.eps = inst["fixture"].at("eps").get<double>();
    }
    cfg.algorithm = j.at("algorithm").get<std::string>();
    cfg.deviations = kind_from_string(j.value("deviations", std::string("interim")));
    cfg.horizon = j.value("T", std::int64_t{0});
    if (j.contains("epsilon")) {
      if (j["epsilon"].is_string())
        cfg.epsilon = std::numeric_limits<double>::infinity();
      else
        cfg.epsilon = j["epsilon"].get<double>();
    }
    cfg.explore = j.value("explore", std::int64_t{0});
    cfg.alpha = j.value("alpha", 0.0);
    cfg.delta = j.value("delta", 0.05);
    if (j.contains("seeds")) cfg.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
    cfg.out_dir = j.value("out_dir", std::string("."));
    cfg.threads = j.value("threads", 0);
    cfg.record_stride = j.value("record_stride", std::int64_t{0});
    cfg.dump_lp = j.value("dump_lp", false);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config JSON missing field: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
  json j;
  json inst;
  if (!cfg.instance_file.empty()) inst["file"] = cfg.instance_file;
  if (cfg.random.set)
    inst["random"] = {{"seed", cfg.random.seed},
                      {"n", cfg.random.num_senders},
                      {"states", cfg.random.states},
                      {"signals", cfg.random.signals},
                      {"actions", cfg.random.actions}};
  if (cfg.fixture.set) inst["fixture"] = {{"name", cfg.fixture.name}, {"eps", cfg.fixture.eps}};
  j["instance"] = inst;
  j["algorithm"] = cfg.algorithm;
  j["deviations"] = kind_to_string(cfg.deviations);
  j["T"] = cfg.horizon;
  if (std::isinf(cfg.epsilon))
    j["epsilon"] = "inf";
  else
    j["epsilon"] = cfg.epsilon;
  j["explore"] = cfg.explore;
  j["alpha"] = cfg.alpha;
  j["delta"] = cfg.delta;
  j["seeds"] = cfg.seeds;
  j["out_dir"] = cfg.out_dir;
  j["threads"] = cfg.threads;
  j["record_stride"] = cfg.record_stride;
  j["dump_lp"] = cfg.dump_lp;
  return j.dump(2);
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.algorithm != "offline" && cfg.algorithm != "full_feedback" && cfg.algorithm != "bandit")
    throw ConfigError("algorithm must be offline, full_feedback or bandit");
  if (cfg.algorithm != "offline") {
    if (cfg.horizon < 1) throw ConfigError("simulation needs T >= 1");
    if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
    if (cfg.seeds.empty()) throw ConfigError("simulation needs at least one seed");
  }
  if (cfg.algorithm == "bandit") {
    if (cfg.explore == 0) {
      if (!(cfg.alpha >= 0.5 && cfg.alpha <= 1.0))
        throw ConfigError("alpha must lie in [1/2, 1]");
    } else if (cfg.explore < 0) {
      throw ConfigError("explore must be positive");
    }
  }
  if (cfg.algorithm == "offline" && !std::isinf(cfg.epsilon) && cfg.epsilon < 0.0)
    throw ConfigError("epsilon must be >= 0 or inf");
  const int sources = (!cfg.instance_file.empty() ? 1 : 0) + (cfg.random.set ? 1 : 0) +
                      (cfg.fixture.set ? 1 : 0);
  if (sources != 1) throw ConfigError("exactly one instance source must be given");
}

std::int64_t resolve_explore(const ExperimentConfig& cfg) {
  if (cfg.explore > 0) return cfg.explore;
  return static_cast<std::int64_t>(
      std::floor(std::pow(static_cast<double>(cfg.horizon), cfg.alpha)));
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  ExperimentOutcome out;
  fs::create_directories(cfg.out_dir);
  auto path_of = [&](const std::string& name) { return (fs::path(cfg.out_dir) / name).string(); };

  const GameInstance game = resolve_instance(cfg);
  const GroundTruth truth = compute_ground_truth(game, cfg.deviations);
  out.opt_value = truth.opt_value;

  {
    std::ofstream os(path_of("config.json"));
    os << config_to_json_text(cfg) << "\n";
    out.files_written.push_back(path_of("config.json"));
    save_instance(game, path_of("instance.json"));
    out.files_written.push_back(path_of("instance.json"));
  }

  if (cfg.algorithm == "offline") {
    LpSolution sol;
    MechanismLP lp = build_lp(cfg.epsilon, truth.r_receiver, truth.r_sender, truth.matrices);
    if (cfg.dump_lp) {
      std::ofstream os(path_of("program.lp"));
      write_lp_text(lp, os);
      out.files_written.push_back(path_of("program.lp"));
    }
    sol = solve_lp(lp);
    write_mechanism_csv(path_of("mechanism.csv"), truth, sol.mechanism, sol.value);
    out.files_written.push_back(path_of("mechanism.csv"));
    SeedOutcome row;
    row.ok = true;
    row.opt_value = sol.value;
    out.rows.push_back(row);
    std::ofstream os(path_of("summary.csv"));
    os << "algorithm,epsilon,deviations,opt_value\n";
    os << "offline," << fmt17(cfg.epsilon) << "," << kind_to_string(cfg.deviations) << ","
       << fmt17(sol.value) << "\n";
    out.files_written.push_back(path_of("summary.csv"));
    return out;
  }

  const std::int64_t explore = cfg.algorithm == "bandit" ? resolve_explore(cfg) : 0;
  const int num_runs = static_cast<int>(cfg.seeds.size());
  out.rows.assign(num_runs, {});
  std::vector<std::vector<ChartPoint>> curves(num_runs);

  RunOptions ropts;
  ropts.record_stride = cfg.record_stride;

  auto one_run = [&](int i) {
    SeedOutcome& row = out.rows[i];
    row.seed = cfg.seeds[i];
    const auto start = std::chrono::steady_clock::now();
    try {
      RunResult run = cfg.algorithm == "bandit"
                          ? run_bandit(truth, cfg.horizon, explore, cfg.delta, cfg.seeds[i], ropts)
                          : run_full_feedback(truth, cfg.horizon, cfg.delta, cfg.seeds[i], ropts);
      write_run_csv(path_of("run_seed" + std::to_string(cfg.seeds[i]) + ".csv"), run);
      curves[i] = chart_samples(run);
      row.ok = true;
      row.opt_value = run.opt_value;
      row.regret_cum = run.regret_cum;
      row.viol_raw_cum = run.viol_raw_cum;
      row.viol_clip_cum = run.viol_clip_cum;
      row.event_held = run.event_held;
      row.max_self_ic_residual = run.max_self_ic_residual;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  if (cfg.threads == 1) {
    for (int i = 0; i < num_runs; ++i) one_run(i);
  } else {
    const int nt = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(nt)
    for (int i = 0; i < num_runs; ++i) one_run(i);
  }

  for (int i = 0; i < num_runs; ++i)
    if (out.rows[i].ok)
      out.files_written.push_back(path_of("run_seed" + std::to_string(cfg.seeds[i]) + ".csv"));

  {
    std::ofstream os(path_of("summary.csv"));
    os << "algorithm,T,E,delta,deviations,seed,status,opt_value,regret_cum,viol_raw_cum,"
          "viol_clip_cum,event_held,max_self_ic_residual,runtime_s\n";
    for (const SeedOutcome& row : out.rows) {
      os << cfg.algorithm << "," << cfg.horizon << "," << explore << "," << fmt17(cfg.delta)
         << "," << kind_to_string(cfg.deviations) << "," << row.seed << ","
         << (row.ok ? "ok" : "error: " + sanitize_cell(row.error)) << ","
         << fmt17(row.opt_value) << "," << fmt17(row.regret_cum) << ","
         << fmt17(row.viol_raw_cum) << "," << fmt17(row.viol_clip_cum) << ","
         << (row.event_held ? 1 : 0) << "," << fmt17(row.max_self_ic_residual) << ","
         << row.runtime_s << "\n";
    }
    out.files_written.push_back(path_of("summary.csv"));
  }

  std::vector<std::vector<ChartPoint>> ok_curves;
  for (int i = 0; i < num_runs; ++i)
    if (out.rows[i].ok) ok_curves.push_back(std::move(curves[i]));
  write_chart_svg(path_of("chart.svg"), ok_curves,
                  cfg.algorithm + ", T=" + std::to_string(cfg.horizon) + ", " +
                      std::to_string(ok_curves.size()) + " seeds");
  out.files_written.push_back(path_of("chart.svg"));
  return out;
}

SlopeFit fit_slope(std::span<const SlopeSample> samples) {
  std::vector<double> horizons;
  for (const SlopeSample& s : samples) horizons.push_back(s.horizon);
  std::sort(horizons.begin(), horizons.end());
  horizons.erase(std::unique(horizons.begin(), horizons.end()), horizons.end());
  if (horizons.size() < 3)
    throw InsufficientData("need at least 3 distinct horizons, got " +
                           std::to_string(horizons.size()));

  std::vector<std::vector<double>> groups(horizons.size());
  for (const SlopeSample& s : samples) {
    const auto it = std::lower_bound(horizons.begin(), horizons.end(), s.horizon);
    groups[it - horizons.begin()].push_back(s.value);
  }
  for (std::size_t i = 0; i < groups.size(); ++i)
    if (groups[i].size() < 5)
      throw InsufficientData("need at least 5 samples per horizon, horizon " +
                             std::to_string(horizons[i]) + " has " +
                             std::to_string(groups[i].size()));

  auto slope_of = [&](const std::vector<std::vector<double>>& gs) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < gs.size(); ++i) {
      const double med = median_of(gs[i]);
      if (med <= 0.0)
        throw InsufficientData("median metric is not positive at horizon " +
                               std::to_string(horizons[i]));
      xs.push_back(std::log(horizons[i]));
      ys.push_back(std::log(med));
    }
    return lsq_slope(xs, ys);
  };

  SlopeFit fit;
  fit.num_horizons = static_cast<int>(horizons.size());
  fit.slope = slope_of(groups);

  std::mt19937_64 rng(kBootstrapSeed);
  std::vector<double> boot;
  boot.reserve(kBootstrapDraws);
  std::vector<std::vector<double>> resampled(groups.size());
  for (int b = 0; b < kBootstrapDraws; ++b) {
    for (std::size_t i = 0; i < groups.size(); ++i) {
      resampled[i].clear();
      for (std::size_t k = 0; k < groups[i].size(); ++k) {
        const std::size_t j = static_cast<std::size_t>(uniform01(rng) * groups[i].size());
        resampled[i].push_back(groups[i][std::min(j, groups[i].size() - 1)]);
      }
    }
    try {
      boot.push_back(slope_of(resampled));
    } catch (const InsufficientData&) {
      // a resample with non-positive median contributes no draw
    }
  }
  if (boot.size() < 100) throw InsufficientData("bootstrap produced too few valid resamples");
  std::sort(boot.begin(), boot.end());
  fit.lo = boot[static_cast<std::size_t>(0.025 * (boot.size() - 1))];
  fit.hi = boot[static_cast<std::size_t>(std::ceil(0.975 * (boot.size() - 1)))];
  return fit;
}

std::vector<SlopeSample> slope_samples_from_summaries(const std::vector<std::string>& paths,
                                                      const std::string& metric) {
  std::vector<SlopeSample> samples;
  for (const std::string& path : paths) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open summary " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty summary " + path);
    std::vector<std::string> cols;
    {
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cols.push_back(cell);
    }
    auto col_index = [&](const std::string& name) {
      const auto it = std::find(cols.begin(), cols.end(), name);
      if (it == cols.end()) throw ConfigError(path + " lacks column " + name);
      return static_cast<std::size_t>(it - cols.begin());
    };
    const std::size_t t_col = col_index("T"), m_col = col_index(metric),
                      status_col = col_index("status");
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      if (cells.size() <= std::max({t_col, m_col, status_col})) continue;
      if (cells[status_col] != "ok") continue;
      samples.push_back({std::stod(cells[t_col]), std::stod(cells[m_col])});
    }
  }
  return samples;
}

}  // namespace ia
