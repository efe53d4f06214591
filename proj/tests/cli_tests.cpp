// End-to-end tests for the beliefzones CLI binary. Each case shells out to
// the real executable (path injected as CLI_BIN), checks the exit code and
// pokes at the files it writes. Exit 0 on success, 1 with a summary of the
// failed checks otherwise.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "beliefzones/generators.hpp"
#include "beliefzones/protocols.hpp"

namespace fs = std::filesystem;

static int g_failures = 0;
static fs::path g_dir;

static void expect(bool ok, const std::string& what) {
  if (ok) return;
  ++g_failures;
  std::cerr << "FAILED: " << what << "\n";
}

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

static std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

static void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

static RunResult run_cli(const std::string& args) {
  fs::path so = g_dir / "stdout.txt", se = g_dir / "stderr.txt";
  std::string cmd = std::string(CLI_BIN) + " " + args + " >" + so.string() +
                    " 2>" + se.string();
  int rc = std::system(cmd.c_str());
  RunResult r;
  if (rc == -1)
    r.code = -1;
  else if (WIFEXITED(rc))
    r.code = WEXITSTATUS(rc);
  r.out = slurp(so);
  r.err = slurp(se);
  return r;
}

static std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

// results CSVs are deterministic except the wall_clock_ms column
static std::string mask_wall_clock(const std::string& csv) {
  std::vector<std::string> rows = lines_of(csv);
  std::string out;
  for (const std::string& row : rows) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(row);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (cells.size() > 11) cells[11] = "X";
    for (size_t i = 0; i < cells.size(); ++i)
      out += (i ? "," : "") + cells[i];
    out += '\n';
  }
  return out;
}

static void test_help_and_usage_errors() {
  RunResult help = run_cli("--help");
  expect(help.code == 0, "--help exits 0");
  expect(help.out.find("generate") != std::string::npos &&
             help.out.find("propagate") != std::string::npos,
         "--help lists subcommands");

  expect(run_cli("").code == 2, "missing subcommand exits 2");
  expect(run_cli("propagate --no-such-flag").code == 2,
         "unknown flag exits 2");
  expect(run_cli("frobnicate").code == 2, "unknown subcommand exits 2");
}

static void test_generate() {
  fs::path graph = g_dir / "g2.json", truth = g_dir / "g2_truth.json";
  RunResult r = run_cli(
      "generate --family g2 --n 120 --k-zones 2 --zone-size 20 --seed 5 "
      "--out " + graph.string() + " --truth-out " + truth.string());
  expect(r.code == 0, "generate g2 exits 0");
  expect(fs::exists(graph) && fs::exists(truth), "generate writes both files");

  bz::BeliefGraph g = bz::load_graph(graph.string());
  expect(g.n() == 120, "generated graph has the requested node count");
  bz::GroundTruth t = bz::load_truth(truth.string(), g);
  expect(t.zones.size() == 2, "truth carries the planted blocks");

  std::string first = slurp(graph);
  run_cli("generate --family g2 --n 120 --k-zones 2 --zone-size 20 --seed 5 "
          "--out " + graph.string() + " --truth-out " + truth.string());
  expect(slurp(graph) == first, "same seed regenerates byte-identical file");

  expect(run_cli("generate --family g3 --n 10 --cycles 100 --out " +
                 (g_dir / "bad.json").string())
                 .code == 2,
         "infeasible cycle count exits 2");
  expect(!fs::exists(g_dir / "bad.json"),
         "failed generate leaves no partial file");
}

static void test_propagate() {
  fs::path graph = g_dir / "g1.json", conf = g_dir / "conf.csv";
  run_cli("generate --family g1 --n 60 --d 4 --seed 3 --out " +
          graph.string());
  RunResult r = run_cli("propagate --graph " + graph.string() + " --out " +
                        conf.string() + " --alpha 0.5");
  expect(r.code == 0, "propagate exits 0");
  expect(r.out.find("r ") != std::string::npos &&
             r.out.find("t_star") != std::string::npos,
         "propagate reports r and t_star");
  std::vector<std::string> rows = lines_of(slurp(conf));
  expect(!rows.empty() && rows[0] == "node_id,phi,converged,t_star,r",
         "confidence CSV header is pinned");
  expect(rows.size() == 61, "one confidence row per node");

  // empty graph: header-only CSV, still exit 0
  fs::path empty = g_dir / "empty.json";
  spit(empty, bz::serialize_graph(bz::BeliefGraph{}));
  RunResult re = run_cli("propagate --graph " + empty.string() + " --out " +
                         (g_dir / "empty.csv").string());
  expect(re.code == 0, "propagate on an empty graph exits 0");
  std::vector<std::string> erows = lines_of(slurp(g_dir / "empty.csv"));
  expect(erows.size() == 1 && erows[0] == "node_id,phi,converged,t_star,r",
         "empty graph yields a header-only CSV");

  expect(run_cli("propagate --graph " + graph.string() + " --out " +
                 conf.string() + " --alpha 1.5")
                 .code == 2,
         "alpha out of range exits 2");
  expect(run_cli("propagate --graph " + (g_dir / "nope.json").string() +
                 " --out " + conf.string())
                 .code == 2,
         "missing graph file exits 2");
  fs::path mangled = g_dir / "mangled.json";
  spit(mangled, "{\"nodes\": [");
  expect(run_cli("propagate --graph " + mangled.string() + " --out " +
                 conf.string())
                 .code == 2,
         "malformed JSON exits 2");
}

static void test_zones_and_atlas() {
  fs::path graph = g_dir / "zg.json";
  run_cli("generate --family g2 --n 120 --k-zones 2 --zone-size 20 --seed 5 "
          "--p-out-pos 0 --p-out-neg 0 --out " + graph.string() +
          " --truth-out " + (g_dir / "zt.json").string());
  fs::path zones = g_dir / "zones.csv";
  RunResult r = run_cli("zones --graph " + graph.string() + " --out " +
                        zones.string() + " --q 0.5");
  expect(r.code == 0, "zones exits 0");
  expect(r.out.find("theta ") != std::string::npos &&
             r.out.find("zones ") != std::string::npos,
         "zones reports theta and count");
  expect(fs::exists(zones), "zones CSV written");

  fs::path atlas = g_dir / "atlas.csv";
  RunResult ra = run_cli("atlas --graph " + graph.string() + " --out " +
                         atlas.string() + " --q 0.5 --k 2");
  expect(ra.code == 0, "atlas exits 0");
  std::vector<std::string> arows = lines_of(slurp(atlas));
  expect(!arows.empty() &&
             arows[0] == "zone_id,size,score,scoring_mode,mean_phi,min_phi,"
                         "cut_minus,loss_plus,nn_jaccard",
         "atlas report header is pinned");
  expect(arows.size() >= 2, "atlas keeps at least one zone");

  expect(run_cli("zones --graph " + graph.string() + " --out " +
                 zones.string() + " --q 1.5")
                 .code == 2,
         "quantile out of range exits 2");
  expect(run_cli("zones --graph " + graph.string() + " --out " +
                 zones.string() + " --q 0.5 --theta 0.2")
                 .code == 2,
         "--q with --theta exits 2");
}

static void test_shock() {
  fs::path graph = g_dir / "sg.json";
  run_cli("generate --family g1 --n 40 --d 3 --seed 9 --out " +
          graph.string());
  bz::BeliefGraph g = bz::load_graph(graph.string());

  fs::path spec = g_dir / "spec.json";
  spit(spec, "{\"targets\":{\"" + g.ids[0] +
                 "\":0.5},\"kappa\":0.5,\"rho_shock\":1.0}");
  fs::path og = g_dir / "post.json", oc = g_dir / "post.csv",
           ol = g_dir / "post.log";
  RunResult r = run_cli("shock --graph " + graph.string() + " --spec " +
                        spec.string() + " --alpha 0.5 --eta 0.5 --out-graph " +
                        og.string() + " --out-confidence " + oc.string() +
                        " --out-log " + ol.string());
  expect(r.code == 0, "shock exits 0");
  expect(r.out.find("halvings") != std::string::npos, "shock reports halvings");
  std::string log = slurp(ol);
  expect(log.rfind("accepted 1", 0) == 0, "shock log starts with accepted 1");
  expect(log.find(g.ids[0]) != std::string::npos,
         "shock log names the target");
  bz::BeliefGraph post = bz::load_graph(og.string());
  expect(post.n() == g.n(), "shock preserves the node set");

  // zero-strength shock round-trips the graph byte for byte
  spit(spec, "{\"targets\":{\"" + g.ids[0] +
                 "\":0.0},\"kappa\":0.5,\"rho_shock\":1.0}");
  RunResult rz = run_cli("shock --graph " + graph.string() + " --spec " +
                         spec.string() + " --alpha 0.5 --out-graph " +
                         og.string() + " --out-confidence " + oc.string() +
                         " --out-log " + ol.string());
  expect(rz.code == 0, "zero shock exits 0");
  expect(slurp(og) == slurp(graph), "zero shock leaves the graph unchanged");

  spit(spec, "{\"targets\":{\"ghost\":0.5},\"kappa\":0.5,\"rho_shock\":1.0}");
  expect(run_cli("shock --graph " + graph.string() + " --spec " +
                 spec.string() + " --out-graph " + og.string() +
                 " --out-confidence " + oc.string() + " --out-log " +
                 ol.string())
                 .code == 2,
         "unknown shock target exits 2");
}

static void test_eval_and_plot() {
  fs::path out1 = g_dir / "ev1";
  RunResult r = run_cli("eval p1 --seeds 2 --n 100 --workers 2 --out-dir " +
                        out1.string());
  expect(r.code == 0, "eval p1 exits 0");
  expect(r.out.find("rows 24") != std::string::npos,
         "eval reports 2 seeds x 12 cells");
  fs::path results = out1 / "p1_results.csv",
           summary = out1 / "p1_summary.csv", runlog = out1 / "p1_run_log.txt";
  expect(fs::exists(results) && fs::exists(summary) && fs::exists(runlog),
         "eval writes results, summary and run log");
  std::vector<std::string> rows = lines_of(slurp(results));
  expect(rows.size() == 25, "results CSV has header plus 24 rows");
  expect(!rows.empty() && rows[0].rfind("protocol,seed,method,", 0) == 0,
         "results header leads with protocol,seed,method");
  expect(slurp(runlog).find("run_id") != std::string::npos,
         "run log records the config hash");

  // rerun into a second directory: summary byte-identical, results
  // identical once the timing column is masked
  fs::path out2 = g_dir / "ev2";
  run_cli("eval p1 --seeds 2 --n 100 --out-dir " + out2.string());
  expect(slurp(summary) == slurp(out2 / "p1_summary.csv"),
         "summary is deterministic");
  expect(mask_wall_clock(slurp(results)) ==
             mask_wall_clock(slurp(out2 / "p1_results.csv")),
         "results deterministic modulo wall clock");

  // config file path: protocol argument must agree
  fs::path cfg = g_dir / "cfg.json";
  bz::ProtocolConfig pc = bz::default_config("p1");
  pc.seeds = 1;
  pc.family.n = 80;
  spit(cfg, bz::serialize_protocol_config(pc));
  expect(run_cli("eval p2 --config " + cfg.string() + " --out-dir " +
                 (g_dir / "ev3").string())
                 .code == 2,
         "protocol/config mismatch exits 2");
  expect(run_cli("eval p1 --config " + cfg.string() + " --out-dir " +
                 (g_dir / "ev3").string())
                 .code == 0,
         "matching config runs");

  fs::path svg = g_dir / "p1.svg";
  RunResult rp = run_cli("plot --figure p1 --in " + summary.string() +
                         " --out " + svg.string());
  expect(rp.code == 0, "plot p1 exits 0");
  std::string body = slurp(svg);
  expect(body.rfind("<svg", 0) == 0, "plot writes an SVG");

  // schema mismatch: feeding the results CSV to a summary figure fails
  // before anything is written
  fs::path bad_svg = g_dir / "bad.svg";
  expect(run_cli("plot --figure p1 --in " + results.string() + " --out " +
                 bad_svg.string())
                 .code == 2,
         "plot with wrong schema exits 2");
  expect(!fs::exists(bad_svg), "failed plot leaves no output file");

  expect(run_cli("plot --figure nope --in " + summary.string() + " --out " +
                 bad_svg.string())
                 .code == 2,
         "unknown figure exits 2");
}

int main() {
  g_dir = fs::temp_directory_path() /
          ("bz_cli_" + std::to_string((unsigned)getpid()));
  fs::create_directories(g_dir);

  test_help_and_usage_errors();
  test_generate();
  test_propagate();
  test_zones_and_atlas();
  test_shock();
  test_eval_and_plot();

  fs::remove_all(g_dir);
  if (g_failures) {
    std::cerr << g_failures << " CLI check(s) failed\n";
    return 1;
  }
  std::cout << "all CLI checks passed\n";
  return 0;
}
