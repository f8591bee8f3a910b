// Copyright 2026 The xxgadget Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Experiment harness. Every run writes one output file plus a JSON manifest
// next to it (<file>.manifest.json). Options come from flags, optionally
// preloaded from a JSON config file (--config) whose keys are the long flag
// names with dashes replaced by underscores; flags override the file.
//
// Exit codes: 0 ok, 2 invalid configuration, 3 numerical failure, 4 I/O.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "xxgadget.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace xxgadget;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Config {
  std::string experiment;
  // Instance.
  std::string variant = "tf";
  unsigned n0 = 3;
  double cp = 100.0;
  double jzz = 5.33;
  double delta_w = 0.1;
  // Spectral.
  std::size_t grid = 201;
  std::size_t coarse_grid = 101;
  std::vector<unsigned> n0_list{2, 3, 4, 5};
  std::vector<std::string> variants;  // empty: per-experiment default
  bool scale_by_cp = false;
  std::vector<double> cp_list{25, 50, 100, 200, 400};
  // Dynamics.
  std::vector<double> ta_list{5};
  double tolerance = 1e-8;
  std::string profile = "linear";
  // Effective check.
  std::string gadget = "one-hot";
  unsigned trials = 100;
  std::uint64_t seed = 7;
  bool drives_only = false;
  // Preparation.
  std::string z = "0001";
  std::vector<double> prep_times{200};
  // Run.
  unsigned threads = 1;
  std::string out = ".";
  std::string name;
  bool keep_going = false;
  bool allow_large = false;
};

json to_json(const Config& c) {
  return json{{"experiment", c.experiment},   {"variant", c.variant},
              {"n0", c.n0},                   {"cp", c.cp},
              {"jzz", c.jzz},                 {"delta_w", c.delta_w},
              {"grid", c.grid},               {"coarse_grid", c.coarse_grid},
              {"n0_list", c.n0_list},         {"variants", c.variants},
              {"scale_by_cp", c.scale_by_cp}, {"cp_list", c.cp_list},
              {"ta_list", c.ta_list},         {"tolerance", c.tolerance},
              {"profile", c.profile},         {"gadget", c.gadget},
              {"trials", c.trials},           {"seed", c.seed},
              {"drives_only", c.drives_only}, {"z", c.z},
              {"prep_times", c.prep_times},   {"threads", c.threads},
              {"out", c.out},                 {"name", c.name},
              {"keep_going", c.keep_going},   {"allow_large", c.allow_large}};
}

template <typename T>
void take(const json& j, const char* key, T& field) {
  if (j.contains(key)) field = j.at(key).get<T>();
}

void load_config_file(const std::string& path, Config& c) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");
  const json known = to_json(c);
  for (const auto& [key, value] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown config key '" + key + "'");
  try {
    take(j, "experiment", c.experiment);
    take(j, "variant", c.variant);
    take(j, "n0", c.n0);
    take(j, "cp", c.cp);
    take(j, "jzz", c.jzz);
    take(j, "delta_w", c.delta_w);
    take(j, "grid", c.grid);
    take(j, "coarse_grid", c.coarse_grid);
    take(j, "n0_list", c.n0_list);
    take(j, "variants", c.variants);
    take(j, "scale_by_cp", c.scale_by_cp);
    take(j, "cp_list", c.cp_list);
    take(j, "ta_list", c.ta_list);
    take(j, "tolerance", c.tolerance);
    take(j, "profile", c.profile);
    take(j, "gadget", c.gadget);
    take(j, "trials", c.trials);
    take(j, "seed", c.seed);
    take(j, "drives_only", c.drives_only);
    take(j, "z", c.z);
    take(j, "prep_times", c.prep_times);
    take(j, "threads", c.threads);
    take(j, "out", c.out);
    take(j, "name", c.name);
    take(j, "keep_going", c.keep_going);
    take(j, "allow_large", c.allow_large);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
}

// ------------------------------------------------------------- validation

const std::vector<std::string> kExperiments{"gap-curve", "gap-scaling",     "cp-error", "pgs",
                                            "effective-check", "prep", "dump-hamiltonian"};

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

Variant variant_of(const std::string& s) {
  try {
    return parse_variant(s);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::vector<Variant> variants_of(const Config& c, std::vector<Variant> fallback) {
  if (c.variants.empty()) return fallback;
  std::vector<Variant> out;
  for (const auto& s : c.variants) out.push_back(variant_of(s));
  return out;
}

SweepProfile profile_of(const std::string& s) {
  if (s == "linear") return SweepProfile::Linear;
  if (s == "smooth") return SweepProfile::Smooth;
  throw ConfigError("profile must be 'linear' or 'smooth'");
}

unsigned max_qubits(const Config& c) { return c.allow_large ? 30u : 18u; }

void check_instance_size(Variant v, unsigned n0, const Config& c) {
  ToyInstance inst;
  inst.n0 = n0;
  inst.variant = v;
  try {
    check_size(inst, max_qubits(c));
  } catch (const std::length_error& e) {
    throw ConfigError(std::string(e.what()) + " (pass --allow-large to run it)");
  }
}

ToyInstance instance_of(const Config& c, Variant v, unsigned n0, double cp) {
  ToyInstance inst;
  inst.n0 = n0;
  inst.jzz = c.jzz;
  inst.delta_w = c.delta_w;
  inst.cp = cp;
  inst.variant = v;
  try {
    inst.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return inst;
}

void validate(const Config& c) {
  require(std::find(kExperiments.begin(), kExperiments.end(), c.experiment) != kExperiments.end(),
          "unknown or missing experiment '" + c.experiment + "'");
  require(c.threads >= 1, "threads must be at least 1");
  require(finite_positive(c.cp), "cp must be positive and finite");
  require(std::isfinite(c.jzz) && std::isfinite(c.delta_w), "jzz and delta_w must be finite");
  const auto& e = c.experiment;
  if (e == "gap-curve" || e == "dump-hamiltonian") {
    const Variant v = variant_of(c.variant);
    instance_of(c, v, c.n0, c.cp);
    check_instance_size(v, c.n0, c);
    if (e == "gap-curve") require(c.grid >= 2, "grid needs at least 2 points");
  } else if (e == "gap-scaling") {
    require(!c.n0_list.empty(), "n0_list is empty");
    require(c.coarse_grid >= 11, "coarse_grid needs at least 11 points");
    for (Variant v : variants_of(c, {Variant::TF, Variant::XX, Variant::OneHot}))
      for (unsigned n0 : c.n0_list) {
        instance_of(c, v, n0, c.cp);
        check_instance_size(v, n0, c);
      }
  } else if (e == "cp-error") {
    require(!c.cp_list.empty(), "cp_list is empty");
    require(c.coarse_grid >= 11, "coarse_grid needs at least 11 points");
    for (double cp : c.cp_list) {
      require(finite_positive(cp), "cp_list values must be positive and finite");
      instance_of(c, Variant::OneHot, c.n0, cp);
    }
    check_instance_size(Variant::OneHot, c.n0, c);
  } else if (e == "pgs") {
    require(!c.ta_list.empty(), "ta_list is empty");
    for (double ta : c.ta_list) require(finite_positive(ta), "ta_list values must be positive");
    require(finite_positive(c.tolerance) && c.tolerance < 1.0, "tolerance must lie in (0, 1)");
    profile_of(c.profile);
    for (Variant v : variants_of(c, {Variant::XX, Variant::OneHot})) {
      instance_of(c, v, c.n0, c.cp);
      check_instance_size(v, c.n0, c);
    }
  } else if (e == "effective-check") {
    require(c.gadget == "three-body" || c.gadget == "one-hot" || c.gadget == "chain",
            "gadget must be three-body, one-hot or chain");
    require(c.trials >= 1, "trials must be at least 1");
  } else if (e == "prep") {
    require(c.z.size() == 4 && c.z.find_first_not_of("01") == std::string::npos,
            "z must be a 4-character bitstring");
    require(!c.prep_times.empty(), "prep_times is empty");
    for (double t : c.prep_times)
      require(std::isfinite(t) && t >= 0.0, "prep_times must be non-negative");
    require(finite_positive(c.tolerance) && c.tolerance < 1.0, "tolerance must lie in (0, 1)");
    profile_of(c.profile);
    PrepSpec p;
    p.n_qubits = 4;
    p.z = parse_bitstring(c.z);
    p.constraint = one_hot_penalty(c.cp, 4);
    try {
      validate_prep(p);
    } catch (const std::exception& ex) {
      throw ConfigError(ex.what());
    }
  }
}

// ---------------------------------------------------------------- running

struct Cell {
  std::string id;
  double seconds = 0.0;
  std::string error;
  json diagnostics = json::object();
};

template <typename Fn>
void run_cell(Cell& cell, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    fn(cell.diagnostics);
  } catch (const std::exception& e) {
    cell.error = e.what();
  }
  cell.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

json min_gap_diagnostics(const MinGapResult& r) {
  return {{"refinement_iterations", r.refinement_iterations},
          {"evaluations", r.evaluations},
          {"max_residual", r.max_residual},
          {"boundary_minimum", r.boundary_minimum},
          {"rescanned", r.rescanned}};
}

json evolution_diagnostics(const EvolutionResult& r) {
  return {{"norm_drift", r.norm_drift}, {"leakage", r.leakage},
          {"peak_leakage", r.peak_leakage}, {"steps", r.steps},
          {"rejected", r.rejected},     {"matvecs", r.matvecs}};
}

double nan() { return std::numeric_limits<double>::quiet_NaN(); }

void run_gap_curve(const Config& c, std::ostream& os, std::vector<Cell>& cells) {
  const Variant v = variant_of(c.variant);
  const ToyInstance inst = instance_of(c, v, c.n0, c.cp);
  cells.push_back({std::string(to_string(v)) + "/n0=" + std::to_string(c.n0)});
  GapCurve curve;
  run_cell(cells.back(), [&](json& d) {
    const CompiledSchedule sched(build_anneal(inst).schedule);
    curve = gap_curve(sched, uniform_grid(c.grid));
    const bool gadget = v == Variant::OneHot || v == Variant::OneHotHom;
    const double factor = c.scale_by_cp && gadget ? 2.0 * c.cp : 1.0;
    for (auto& g : curve.gaps) g *= factor;
    for (auto& e : curve.energies) e *= factor;
    std::size_t degenerate = 0;
    for (bool b : curve.degenerate) degenerate += b ? 1 : 0;
    d["scale_factor"] = factor;
    d["degenerate_points"] = degenerate;
  });
  write_gap_curve_csv(os, curve);
}

void run_gap_scaling(const Config& c, std::ostream& os, std::vector<Cell>& cells) {
  std::vector<GapScalingRecord> records;
  for (unsigned n0 : c.n0_list)
    for (Variant v : variants_of(c, {Variant::TF, Variant::XX, Variant::OneHot})) {
      GapScalingRecord r;
      r.n0 = n0;
      r.variant = v;
      r.cp = c.cp;
      records.push_back(r);
      cells.push_back({std::string(to_string(v)) + "/n0=" + std::to_string(n0)});
    }
  SweepOptions o;
  o.coarse_grid = c.coarse_grid;
  o.max_qubits = max_qubits(c);
  const ToyInstance base = instance_of(c, Variant::TF, 2, c.cp);
  parallel_for(records.size(), c.threads, [&](std::size_t i) {
    run_cell(cells[i], [&](json& d) {
      auto r = gap_scaling_sweep({records[i].n0}, {records[i].variant}, c.cp, c.scale_by_cp, o,
                                 base)
                   .front();
      if (!r.error.empty()) throw std::runtime_error(r.error);
      records[i] = r;
      d = min_gap_diagnostics(r.raw);
    });
    if (!cells[i].error.empty()) records[i].delta_min = records[i].s_star = nan();
  });
  write_gap_scaling_csv(os, records);
}

void run_cp_error(const Config& c, std::ostream& os, std::vector<Cell>& cells) {
  SweepOptions o;
  o.coarse_grid = c.coarse_grid;
  o.max_qubits = max_qubits(c);
  cells.push_back({"xx/n0=" + std::to_string(c.n0)});
  for (double cp : c.cp_list) cells.push_back({"onehot/cp=" + format_real(cp)});
  double dxx = nan();
  run_cell(cells[0], [&](json& d) {
    const auto r = min_gap(instance_of(c, Variant::XX, c.n0, c.cp), o.coarse_grid, o.eigen);
    dxx = r.delta_min;
    d = min_gap_diagnostics(r);
  });
  std::vector<CpErrorRecord> records(c.cp_list.size());
  parallel_for(records.size(), c.threads, [&](std::size_t i) {
    auto& r = records[i];
    r.cp = c.cp_list[i];
    r.delta_min_xx = dxx;
    run_cell(cells[i + 1], [&](json& d) {
      r.oh = min_gap(instance_of(c, Variant::OneHot, c.n0, r.cp), o.coarse_grid, o.eigen);
      r.delta_min_oh_scaled = 2.0 * r.cp * r.oh.delta_min;
      r.normalized_error = std::abs(dxx - r.delta_min_oh_scaled) / dxx;
      d = min_gap_diagnostics(r.oh);
    });
    if (!cells[i + 1].error.empty()) r.delta_min_oh_scaled = r.normalized_error = nan();
  });
  write_cp_error_csv(os, records);
}

void run_pgs(const Config& c, std::ostream& os, std::vector<Cell>& cells) {
  std::vector<PgsRecord> records;
  for (Variant v : variants_of(c, {Variant::XX, Variant::OneHot}))
    for (double ta : c.ta_list) {
      PgsRecord r;
      r.ta = ta;
      r.variant = v;
      r.n0 = c.n0;
      r.cp = c.cp;
      records.push_back(r);
      cells.push_back({std::string(to_string(v)) + "/ta=" + format_real(ta)});
    }
  const SweepProfile profile = profile_of(c.profile);
  parallel_for(records.size(), c.threads, [&](std::size_t i) {
    auto& r = records[i];
    run_cell(cells[i], [&](json& d) {
      const auto res = anneal_toy(instance_of(c, r.variant, c.n0, c.cp), r.ta, c.tolerance,
                                  profile);
      r.pgs = res.p_gs;
      r.leakage = res.leakage;
      r.norm_drift = res.norm_drift;
      d = evolution_diagnostics(res);
    });
    if (!cells[i].error.empty()) r.pgs = r.leakage = r.norm_drift = nan();
  });
  write_pgs_csv(os, records);
}

DenseMatrix stripped(const Observable& o) { return strip_identity(assemble(o).to_dense()); }

void run_effective_check(const Config& c, std::ostream& os, std::vector<Cell>& cells) {
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), penalty(10.0, 1000.0);
  auto field = [&] { return c.drives_only ? 0.0 : unit(rng); };
  os << "trial,gadget,cp,max_deviation\n";
  double worst = 0.0;
  cells.push_back({c.gadget});
  run_cell(cells.back(), [&](json& d) {
    for (unsigned t = 0; t < c.trials; ++t) {
      DenseMatrix schur, closed;
      double cp = 0.0;
      if (c.gadget == "three-body") {
        ThreeBodySpec s;
        s.d1 = unit(rng), s.d2 = unit(rng), s.d12 = unit(rng);
        s.h1 = field(), s.h2 = field(), s.j12 = field();
        s.cp = cp = penalty(rng);
        schur = schur_effective(assemble(three_body_physical(s)), three_body_partition(), -cp)
                    .matrix;
        closed = stripped(three_body_effective_closed(s));
      } else if (c.gadget == "one-hot") {
        OneHotSpec s;
        for (auto& x : s.d) x = unit(rng);
        s.h1 = field(), s.h2 = field(), s.j12 = field();
        s.cp = cp = penalty(rng);
        schur = schur_effective(assemble(one_hot_physical(s)), one_hot_partition(), 0.0).matrix;
        closed = stripped(one_hot_effective_closed(s));
      } else {
        ChainSpec s;
        s.d1 = unit(rng), s.d2 = unit(rng);
        s.cp = cp = penalty(rng);
        schur = schur_effective(assemble(chain_physical(s)), chain_partition(), -2.0 * cp).matrix;
        closed = stripped(chain_effective_closed(s));
      }
      const double dev = (strip_identity(schur) - closed).cwiseAbs().maxCoeff();
      worst = std::max(worst, dev);
      os << t << ',' << c.gadget << ',' << format_real(cp) << ',' << format_real(dev) << '\n';
    }
    d["max_deviation"] = worst;
    d["trials"] = c.trials;
  });
  std::cout << c.gadget << ": max deviation closed form vs Schur complement "
            << format_real(worst) << " over " << c.trials << " trials\n";
}

void run_prep(const Config& c, std::ostream& os, std::vector<Cell>& cells) {
  PrepSpec p;
  p.n_qubits = 4;
  p.z = parse_bitstring(c.z);
  p.constraint = one_hot_penalty(c.cp, 4);
  p.profile = profile_of(c.profile);
  p.tolerance = c.tolerance;
  const auto target = assemble(constrained_driver(p.constraint));
  const auto feasible = partition_hamming(4, 1);
  struct Row {
    double fidelity = nan(), leakage = nan(), drift = nan();
  };
  std::vector<Row> rows(c.prep_times.size());
  for (double t : c.prep_times) cells.push_back({"prep_time=" + format_real(t)});
  parallel_for(rows.size(), c.threads, [&](std::size_t i) {
    run_cell(cells[i], [&](json& d) {
      PrepSpec q = p;
      q.prep_time = c.prep_times[i];
      EvolutionResult diag;
      const auto psi = prepare_initial(q, &diag);
      rows[i].fidelity = ground_state_probability(psi, target);
      rows[i].leakage = leakage(psi, feasible);
      rows[i].drift = std::abs(psi.norm() - 1.0);
      d = evolution_diagnostics(diag);
    });
  });
  os << "prep_time,z,profile,fidelity,leakage,norm_drift\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    os << format_real(c.prep_times[i]) << ',' << c.z << ',' << c.profile << ','
       << format_real(rows[i].fidelity) << ',' << format_real(rows[i].leakage) << ','
       << format_real(rows[i].drift) << '\n';
}

void run_dump(const Config& c, std::ostream& os, std::vector<Cell>& cells) {
  const Variant v = variant_of(c.variant);
  const auto model = build_anneal(instance_of(c, v, c.n0, c.cp));
  cells.push_back({std::string(to_string(v)) + "/n0=" + std::to_string(c.n0)});
  run_cell(cells.back(), [&](json& d) {
    os << "# variant " << to_string(v) << " n0 " << c.n0 << " cp " << format_real(c.cp)
       << " qubits " << model.schedule.n_qubits << '\n';
    for (const auto& [kind, obs] : model.schedule.groups)
      os << "\n[" << to_string(kind) << "]\n" << to_text(obs);
    d["groups"] = model.schedule.groups.size();
    d["qubits"] = model.schedule.n_qubits;
  });
}

std::string default_name(const std::string& experiment) {
  if (experiment == "dump-hamiltonian") return "hamiltonian.txt";
  std::string s = experiment;
  std::replace(s.begin(), s.end(), '-', '_');
  return s + ".csv";
}

int run(const Config& c) {
  validate(c);
  // Library warnings repeat per cell; keep each distinct message once.
  std::mutex warn_mutex;
  std::vector<std::string> warnings;
  ScopedWarningHandler sink([&](const std::string& msg) {
    std::lock_guard lock(warn_mutex);
    if (std::find(warnings.begin(), warnings.end(), msg) != warnings.end()) return;
    warnings.push_back(msg);
    std::cerr << "warning: " << msg << '\n';
  });
  std::error_code ec;
  fs::create_directories(c.out, ec);
  const fs::path file = fs::path(c.out) / (c.name.empty() ? default_name(c.experiment) : c.name);
  const fs::path manifest_path = file.string() + ".manifest.json";
  std::ofstream os(file, std::ios::binary);
  if (!os) throw IoError("cannot write " + file.string());
  std::ofstream ms(manifest_path, std::ios::binary);
  if (!ms) throw IoError("cannot write " + manifest_path.string());

  std::vector<Cell> cells;
  const auto t0 = std::chrono::steady_clock::now();
  const auto& e = c.experiment;
  if (e == "gap-curve") run_gap_curve(c, os, cells);
  else if (e == "gap-scaling") run_gap_scaling(c, os, cells);
  else if (e == "cp-error") run_cp_error(c, os, cells);
  else if (e == "pgs") run_pgs(c, os, cells);
  else if (e == "effective-check") run_effective_check(c, os, cells);
  else if (e == "prep") run_prep(c, os, cells);
  else run_dump(c, os, cells);
  os.flush();

  std::size_t failed = 0;
  json jc = json::array();
  for (const auto& cell : cells) {
    json j{{"id", cell.id}, {"wall_seconds", cell.seconds},
           {"status", cell.error.empty() ? "ok" : "failed"}};
    if (!cell.error.empty()) {
      j["error"] = cell.error;
      ++failed;
      std::cerr << "cell " << cell.id << " failed: " << cell.error << '\n';
    }
    j["diagnostics"] = cell.diagnostics;
    jc.push_back(std::move(j));
  }
  const int status = failed > 0 && !c.keep_going ? kExitNumeric : 0;
  json m{{"software", "xxgadget"},
         {"version", XXGADGET_VERSION},
         {"experiment", e},
         {"output", file.filename().string()},
         {"config", to_json(c)},
         {"wall_seconds",
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()},
         {"failed_cells", failed},
         {"warnings", warnings},
         {"exit_status", status},
         {"cells", jc}};
  ms << m.dump(2) << '\n';
  if (!os || !ms) throw IoError("write to " + c.out + " failed");
  return status;
}

std::optional<std::string> config_path(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) return argv[i + 1];
    if (a.rfind("--config=", 0) == 0) return a.substr(9);
  }
  return std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  Config c;
  try {
    if (auto path = config_path(argc, argv)) load_config_file(*path, c);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }

  CLI::App app{"xxgadget experiment harness"};
  app.require_subcommand(0, 1);
  std::string config_file;
  app.add_option("--config", config_file, "JSON config file; flags override its values");
  app.add_option("--out", c.out, "Output directory");
  app.add_option("--name", c.name, "Output file name (default per experiment)");
  app.add_option("--threads", c.threads, "Worker threads over sweep cells");
  app.add_flag("--keep-going", c.keep_going, "Exit 0 even when some cells fail");
  app.add_flag("--allow-large", c.allow_large, "Allow registers above 18 qubits");
  app.add_option("--variant", c.variant, "tf | xx | onehot | onehot-hom");
  app.add_option("--n0", c.n0, "Size of the first group");
  app.add_option("--cp", c.cp, "Penalty strength C_p");
  app.add_option("--jzz", c.jzz, "Inter-group coupling");
  app.add_option("--delta-w", c.delta_w, "Weight advantage of the first group");

  auto* gc = app.add_subcommand("gap-curve", "Lowest three levels and gap on a uniform s grid");
  gc->add_option("--grid", c.grid, "Grid points");
  gc->add_flag("--scale-by-cp", c.scale_by_cp, "Multiply gadget-variant energies by 2 C_p");

  auto* gs = app.add_subcommand("gap-scaling", "Minimum gap per (n0, variant)");
  gs->add_option("--n0-list", c.n0_list, "n0 values")->delimiter(',');
  gs->add_option("--variants", c.variants, "Variants")->delimiter(',');
  gs->add_option("--coarse-grid", c.coarse_grid, "Coarse scan points");
  gs->add_flag("--scale-by-cp", c.scale_by_cp, "Multiply TF and XX minimum gaps by C_p");

  auto* ce = app.add_subcommand("cp-error", "Normalised XX vs 2 C_p one-hot gap error per C_p");
  ce->add_option("--cp-list", c.cp_list, "C_p values")->delimiter(',');
  ce->add_option("--coarse-grid", c.coarse_grid, "Coarse scan points");

  auto* pg = app.add_subcommand("pgs", "Ground-state probability after an anneal of length t_a");
  pg->add_option("--ta-list", c.ta_list, "Anneal times t_a")->delimiter(',');
  pg->add_option("--variants", c.variants, "Variants")->delimiter(',');
  pg->add_option("--tolerance", c.tolerance, "Integrator error target");
  pg->add_option("--profile", c.profile, "linear | smooth");

  auto* ec = app.add_subcommand("effective-check",
                                "Closed-form gadget Hamiltonians vs the Schur complement");
  ec->add_option("--gadget", c.gadget, "three-body | one-hot | chain");
  ec->add_option("--trials", c.trials, "Random trials");
  ec->add_option("--seed", c.seed, "RNG seed");
  ec->add_flag("--drives-only", c.drives_only, "Draw only the X drives; fields and J are zero");

  auto* pr = app.add_subcommand("prep", "Prepare the constrained driver ground state from |z>");
  pr->add_option("--z", c.z, "Starting one-hot configuration, 4 bits");
  pr->add_option("--prep-times", c.prep_times, "Preparation times")->delimiter(',');
  pr->add_option("--tolerance", c.tolerance, "Integrator error target");
  pr->add_option("--profile", c.profile, "linear | smooth");

  app.add_subcommand("dump-hamiltonian", "Schedule groups of an instance in Pauli text form");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }
  if (auto subs = app.get_subcommands(); !subs.empty()) c.experiment = subs.front()->get_name();

  try {
    return run(c);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}
