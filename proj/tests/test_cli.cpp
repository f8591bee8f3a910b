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

#include <catch_amalgamated.hpp>
#include <json.hpp>
#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "xxgadget/pauli.hpp"

namespace fs = std::filesystem;
using namespace xxgadget;

namespace {

const fs::path kScratch = fs::temp_directory_path() / "xxgadget_cli_test";

int cli(const std::string& args) {
  const std::string cmd = std::string(XXG_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string dir(const std::string& name) { return (kScratch / name).string(); }

/** Dump sections keyed by schedule label, parsed back as observables. */
std::multimap<std::string, Observable> read_dump(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::multimap<std::string, Observable> out;
  std::string line, label, body;
  auto flush = [&] {
    if (!label.empty()) out.emplace(label, parse_observable(body));
    body.clear();
  };
  while (std::getline(in, line)) {
    if (!line.empty() && line.front() == '[') {
      flush();
      label = line.substr(1, line.size() - 2);
    } else if (!label.empty()) {
      body += line + "\n";
    }
  }
  flush();
  return out;
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n' ? 1 : 0;
  return n;
}

struct Scratch {
  Scratch() {
    fs::remove_all(kScratch);
    fs::create_directories(kScratch);
  }
};

}  // namespace

TEST_CASE("dump: one-hot n0=4 has six 2C_p penalty couplings") {
  Scratch s;
  REQUIRE(cli("dump-hamiltonian --variant onehot --n0 4 --cp 100 --out " + dir("d1")) == 0);
  const auto groups = read_dump(kScratch / "d1" / "hamiltonian.txt");
  REQUIRE(groups.count("constant") == 1);
  const auto& pen = groups.find("constant")->second;
  int zz = 0;
  for (const auto& t : pen.terms()) {
    if (t.factors.size() != 2) continue;
    ++zz;
    CHECK(std::abs(t.coefficient) == 200.0);
    for (const auto& [q, a] : t.factors) {
      CHECK(a == PauliAxis::Z);
      CHECK(q <= 4);
    }
  }
  CHECK(zz == 6);
  CHECK(fs::exists(kScratch / "d1" / "hamiltonian.txt.manifest.json"));
}

TEST_CASE("dump: TF n0=2 has six problem couplings") {
  Scratch s;
  REQUIRE(cli("dump-hamiltonian --variant tf --n0 2 --out " + dir("d2")) == 0);
  int zz = 0;
  for (const auto& [label, obs] : read_dump(kScratch / "d2" / "hamiltonian.txt"))
    for (const auto& t : obs.terms()) zz += t.factors.size() == 2 ? 1 : 0;
  CHECK(zz == 6);
}

TEST_CASE("dump: homogeneous one-hot drives every qubit once") {
  Scratch s;
  REQUIRE(cli("dump-hamiltonian --variant onehot-hom --n0 4 --out " + dir("d3")) == 0);
  std::map<unsigned, int> drives;
  unsigned n = 0;
  for (const auto& [label, obs] : read_dump(kScratch / "d3" / "hamiltonian.txt")) {
    n = obs.n_qubits();
    for (const auto& t : obs.terms())
      if (t.factors.size() == 1 && t.factors.begin()->second == PauliAxis::X) {
        CHECK(t.coefficient == -1.0);
        ++drives[t.factors.begin()->first];
      }
  }
  REQUIRE(n > 0);
  CHECK(drives.size() == n);
  for (const auto& [q, k] : drives) CHECK(k == 1);
}

TEST_CASE("effective-check reports the closed-form agreement") {
  Scratch s;
  REQUIRE(cli("effective-check --gadget one-hot --trials 100 --seed 7 --drives-only --out " +
              dir("e")) == 0);
  const auto m = nlohmann::json::parse(slurp(kScratch / "e" / "effective_check.csv.manifest.json"));
  CHECK(m["cells"][0]["diagnostics"]["max_deviation"].get<double>() < 1e-12);
  CHECK(count_lines(slurp(kScratch / "e" / "effective_check.csv")) == 101);
  for (const char* g : {"three-body", "chain"})
    CHECK(cli(std::string("effective-check --drives-only --trials 20 --gadget ") + g +
              " --out " + dir("e")) == 0);
}

TEST_CASE("gap-curve output and manifest") {
  Scratch s;
  REQUIRE(cli("gap-curve --variant xx --n0 2 --grid 11 --out " + dir("g")) == 0);
  const std::string csv = slurp(kScratch / "g" / "gap_curve.csv");
  CHECK(csv.rfind("s,e0,e1,e2,gap\n", 0) == 0);
  CHECK(count_lines(csv) == 12);
  const auto m = nlohmann::json::parse(slurp(kScratch / "g" / "gap_curve.csv.manifest.json"));
  CHECK(m["experiment"] == "gap-curve");
  CHECK(m["config"]["n0"] == 2);
  CHECK(m["cells"].size() == 1);
  CHECK(m["cells"][0]["status"] == "ok");
  CHECK(m["cells"][0].contains("wall_seconds"));
  CHECK(m.contains("version"));
}

TEST_CASE("gap-curve --scale-by-cp multiplies gadget curves by 2 C_p") {
  Scratch s;
  REQUIRE(cli("gap-curve --variant onehot --n0 2 --grid 5 --out " + dir("a")) == 0);
  REQUIRE(cli("gap-curve --variant onehot --n0 2 --grid 5 --scale-by-cp --out " + dir("b")) == 0);
  std::istringstream a(slurp(kScratch / "a" / "gap_curve.csv"));
  std::istringstream b(slurp(kScratch / "b" / "gap_curve.csv"));
  std::string la, lb;
  std::getline(a, la);
  std::getline(b, lb);
  while (std::getline(a, la) && std::getline(b, lb)) {
    const double ga = std::stod(la.substr(la.rfind(',') + 1));
    const double gb = std::stod(lb.substr(lb.rfind(',') + 1));
    CHECK(gb == Catch::Approx(200.0 * ga).epsilon(1e-14));
  }
}

TEST_CASE("outputs are reproducible and independent of the thread count") {
  Scratch s;
  const std::string args = "gap-scaling --n0-list 2,3 --variants tf,xx --coarse-grid 21 --out ";
  REQUIRE(cli(args + dir("r1") + " --threads 1") == 0);
  REQUIRE(cli(args + dir("r2") + " --threads 1") == 0);
  REQUIRE(cli(args + dir("r3") + " --threads 3") == 0);
  const auto one = slurp(kScratch / "r1" / "gap_scaling.csv");
  CHECK(one == slurp(kScratch / "r2" / "gap_scaling.csv"));
  CHECK(one == slurp(kScratch / "r3" / "gap_scaling.csv"));
  CHECK(count_lines(one) == 5);
}

TEST_CASE("config file is read and flags override it") {
  Scratch s;
  {
    std::ofstream c(kScratch / "c.json");
    c << R"({"experiment": "gap-curve", "variant": "xx", "n0": 2, "grid": 7})";
  }
  const std::string cfg = (kScratch / "c.json").string();
  REQUIRE(cli("--config " + cfg + " --out " + dir("c1")) == 0);
  CHECK(count_lines(slurp(kScratch / "c1" / "gap_curve.csv")) == 8);
  REQUIRE(cli("--config " + cfg + " gap-curve --grid 4 --out " + dir("c2")) == 0);
  CHECK(count_lines(slurp(kScratch / "c2" / "gap_curve.csv")) == 5);
  const auto m = nlohmann::json::parse(slurp(kScratch / "c2" / "gap_curve.csv.manifest.json"));
  CHECK(m["config"]["variant"] == "xx");
  CHECK(m["config"]["grid"] == 4);
}

TEST_CASE("pgs and prep write their tables") {
  Scratch s;
  REQUIRE(cli("pgs --variants xx --n0 2 --ta-list 1,2 --tolerance 1e-6 --out " + dir("p")) == 0);
  const auto pgs = slurp(kScratch / "p" / "pgs.csv");
  CHECK(pgs.rfind("ta,variant,n0,cp,pgs,leakage,norm_drift\n", 0) == 0);
  CHECK(count_lines(pgs) == 3);
  REQUIRE(cli("prep --prep-times 0 --out " + dir("q")) == 0);
  const auto prep = slurp(kScratch / "q" / "prep.csv");
  CHECK(prep.find("0,0001,linear,") != std::string::npos);
}

TEST_CASE("exit codes") {
  Scratch s;
  // Invalid configuration, rejected before any computation.
  CHECK(cli("gap-curve --n0 1") == 2);
  CHECK(cli("gap-curve --cp -5") == 2);
  CHECK(cli("gap-curve --variant nope") == 2);
  CHECK(cli("gap-curve --grid 1") == 2);
  CHECK(cli("pgs --ta-list 0") == 2);
  CHECK(cli("pgs --profile cubic") == 2);
  CHECK(cli("prep --z 0011") == 2);
  CHECK(cli("effective-check --gadget five-body") == 2);
  CHECK(cli("--threads 0 gap-curve") == 2);
  CHECK(cli("--no-such-flag") == 2);
  CHECK(cli("") == 2);
  {
    std::ofstream c(kScratch / "bad.json");
    c << R"({"experiment": "gap-curve", "n00": 3})";
  }
  CHECK(cli("--config " + (kScratch / "bad.json").string()) == 2);
  // Registers above 18 qubits need --allow-large.
  CHECK(cli("gap-curve --variant onehot --n0 8 --out " + dir("big")) == 2);
  // I/O.
  CHECK(cli("gap-curve --out /proc/xxgadget-no-such-dir") == 4);
  CHECK(cli("--config " + (kScratch / "missing.json").string()) == 4);
}
