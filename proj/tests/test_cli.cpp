// End-to-end checks of the installed binary. The test runner exports
// RISKPDE_CLI with the path to the built executable; everything here shells
// out to it and inspects exit codes, stdout JSON and the files it writes.

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path& tmp_root() {
    static const fs::path root = [] {
        const fs::path p = fs::temp_directory_path() / "riskpde-cli-tests";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return root;
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    os << text;
}

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

// extra_env goes between `env -u RISKPDE_SEED` and the binary, so tests can
// re-set the variable after the scrub.
RunResult run_cli(const std::string& args, const std::string& extra_env = "") {
    static int counter = 0;
    const char* bin = std::getenv("RISKPDE_CLI");
    REQUIRE_MESSAGE(bin != nullptr, "RISKPDE_CLI must point at the built binary");
    const fs::path out = tmp_root() / ("stdout_" + std::to_string(counter) + ".txt");
    const fs::path err = tmp_root() / ("stderr_" + std::to_string(counter) + ".txt");
    ++counter;

    std::string cmd = "env -u RISKPDE_SEED ";
    if (!extra_env.empty()) cmd += extra_env + " ";
    cmd += std::string(bin) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());

    RunResult r;
    if (status != -1 && WIFEXITED(status)) r.code = WEXITSTATUS(status);
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

json parse_stdout(const RunResult& r) {
    json j = json::parse(r.out, nullptr, false);
    CHECK_MESSAGE(!j.is_discarded(), "stdout was not JSON: " << r.out);
    return j;
}

// Minimal field config shared by mc-field, fd-solve, analytic-field, predict
// and grad: 9 x 5 nodes on [-2,2] x [0,1].
const fs::path& field_cfg() {
    static const fs::path p = [] {
        const fs::path path = tmp_root() / "field.cfg";
        write_text(path,
                   "schema = 1\n"
                   "grid.x_lo = -2\n"
                   "grid.x_hi = 2\n"
                   "grid.dx = 0.5\n"
                   "grid.t_lo = 0\n"
                   "grid.t_hi = 1\n"
                   "grid.dt = 0.25\n"
                   "lambda = 1\n");
        return path;
    }();
    return p;
}

int count_lines(const std::string& text) {
    int n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
    CHECK(run_cli("").code == 2);
    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("frobnicate").code == 2);
    CHECK(run_cli("mc-field").code == 2); // missing --config/--out
    CHECK(run_cli("simulate --out " + (tmp_root() / "x.csv").string()).code == 2);
}

TEST_CASE("mc-field samples a grid and reports it") {
    const fs::path out = tmp_root() / "mc.csv";
    const RunResult r = run_cli("mc-field --config " + field_cfg().string() + " --out " +
                                out.string() + " --paths 40 --dt 0.05 --seed 3");
    CHECK(r.code == 0);
    REQUIRE(fs::exists(out));

    const json j = parse_stdout(r);
    CHECK(j["command"] == "mc-field");
    CHECK(j["seed"] == 3);
    CHECK(j["paths"] == 40);
    CHECK(j["kind"] == "N");
    CHECK(j["nodes"] == 45);

    const std::string csv = slurp(out);
    CHECK(csv.rfind("x,T,lambda,kind,provenance,value\n", 0) == 0);
    CHECK(csv.find("MC") != std::string::npos);
}

TEST_CASE("degenerate sampling requests are usage errors") {
    const fs::path out = tmp_root() / "none.csv";
    const RunResult r = run_cli("mc-field --config " + field_cfg().string() + " --out " +
                                out.string() + " --paths 0");
    CHECK(r.code == 2);
}

TEST_CASE("config files are validated") {
    const fs::path bad = tmp_root() / "bad.cfg";
    write_text(bad, "schema = 1\ngrid.x_lo = -2\ngrid.bogus = 3\n");
    const fs::path out = tmp_root() / "bad.csv";
    CHECK(run_cli("mc-field --config " + bad.string() + " --out " + out.string()).code == 2);

    const fs::path wrong_schema = tmp_root() / "schema.cfg";
    write_text(wrong_schema, "schema = 9\ngrid.x_lo = -2\n");
    CHECK(run_cli("mc-field --config " + wrong_schema.string() + " --out " + out.string())
              .code == 2);
}

TEST_CASE("seeded sampling is reproducible") {
    const fs::path a = tmp_root() / "seed_a.csv";
    const fs::path b = tmp_root() / "seed_b.csv";
    const fs::path c = tmp_root() / "seed_c.csv";
    const std::string base = "mc-field --config " + field_cfg().string() +
                             " --paths 40 --dt 0.05";
    CHECK(run_cli(base + " --seed 3 --out " + a.string()).code == 0);
    CHECK(run_cli(base + " --seed 3 --out " + b.string()).code == 0);
    CHECK(run_cli(base + " --seed 4 --out " + c.string()).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("seed resolution order") {
    const fs::path out = tmp_root() / "env_seed.csv";
    const std::string base = "mc-field --config " + field_cfg().string() +
                             " --paths 5 --dt 0.05 --out " + out.string();

    RunResult r = run_cli(base);
    CHECK(parse_stdout(r)["seed"] == 0);

    r = run_cli(base, "RISKPDE_SEED=77");
    CHECK(parse_stdout(r)["seed"] == 77);

    r = run_cli(base + " --seed 5", "RISKPDE_SEED=77");
    CHECK(parse_stdout(r)["seed"] == 5);

    CHECK(run_cli(base, "RISKPDE_SEED=abc").code == 2);
}

TEST_CASE("solver and exact fields flow into verify") {
    const fs::path fd = tmp_root() / "fd.csv";
    const fs::path an = tmp_root() / "an.csv";
    const fs::path an12 = tmp_root() / "an12.csv";
    CHECK(run_cli("fd-solve --config " + field_cfg().string() + " --out " + fd.string())
              .code == 0);
    CHECK(run_cli("analytic-field --config " + field_cfg().string() + " --out " +
                  an.string())
              .code == 0);
    CHECK(run_cli("analytic-field --config " + field_cfg().string() + " --lambda 1.2" +
                  " --out " + an12.string())
              .code == 0);

    // Identical inputs pass any tolerance.
    RunResult r = run_cli("verify --a " + an.string() + " --b " + an.string() +
                          " --tol 1e-12");
    CHECK(r.code == 0);
    json j = parse_stdout(r);
    CHECK(j["pass"] == true);
    CHECK(j["max_abs_diff"] == 0.0);

    // Different drifts differ by a visible but bounded amount.
    CHECK(run_cli("verify --a " + an.string() + " --b " + an12.string() + " --tol 0.5")
              .code == 0);
    r = run_cli("verify --a " + an.string() + " --b " + an12.string() + " --tol 0.01");
    CHECK(r.code == 1);
    CHECK(parse_stdout(r)["pass"] == false);

    // Mismatched grids are a data failure, not a usage failure.
    const fs::path other_cfg = tmp_root() / "other.cfg";
    write_text(other_cfg,
               "schema = 1\n"
               "grid.x_lo = -2\n"
               "grid.x_hi = 2\n"
               "grid.dx = 1\n"
               "grid.t_lo = 0\n"
               "grid.t_hi = 1\n"
               "grid.dt = 0.25\n"
               "lambda = 1\n");
    const fs::path coarse = tmp_root() / "coarse.csv";
    CHECK(run_cli("analytic-field --config " + other_cfg.string() + " --out " +
                  coarse.string())
              .code == 0);
    CHECK(run_cli("verify --a " + an.string() + " --b " + coarse.string() + " --tol 1")
              .code == 1);
}

TEST_CASE("training reproduces, predicts and differentiates") {
    const fs::path cfg = tmp_root() / "train.cfg";
    write_text(cfg,
               "schema = 1\n"
               "phys.x_lo = -2\n"
               "phys.x_hi = 2\n"
               "phys.dx = 1\n"
               "phys.t_lo = 0\n"
               "phys.t_hi = 1\n"
               "phys.dt = 0.5\n"
               "data.x_lo = -2\n"
               "data.x_hi = 0\n"
               "data.dx = 1\n"
               "data.t_lo = 0\n"
               "data.t_hi = 1\n"
               "data.dt = 0.5\n"
               "lambda_train = 1\n"
               "mc.paths = 30\n"
               "mc.dt = 0.1\n"
               "pipe.layers = 3, 8, 1\n"
               "pipe.epochs = 40\n"
               "pipe.history_every = 10\n"
               "pipe.checkpoint_every = 20\n");

    const fs::path dir1 = tmp_root() / "train1";
    const fs::path dir2 = tmp_root() / "train2";
    const std::string base = "train --config " + cfg.string() + " --seed 11 --out ";
    const RunResult r1 = run_cli(base + dir1.string());
    const RunResult r2 = run_cli(base + dir2.string());
    REQUIRE(r1.code == 0);
    REQUIRE(r2.code == 0);
    CHECK(r1.err.find("checkpoint at epoch") != std::string::npos);

    const json j = parse_stdout(r1);
    CHECK(j["phys_points"] == 15);
    CHECK(j["data_points"] == 16); // 9 sampled nodes + 2 barrier rows + 5 initial rows
    CHECK(j["epochs"] == 40);
    CHECK(j["final_loss"]["total"].get<double>() >= 0.0);

    CHECK(fs::exists(dir1 / "data_mc_lambda1.csv"));
    CHECK(slurp(dir1 / "checkpoint.json") == slurp(dir2 / "checkpoint.json"));
    CHECK(slurp(dir1 / "history.csv") == slurp(dir2 / "history.csv"));
    CHECK(slurp(dir1 / "history.csv").rfind("epoch,total,Lp,Ld\n", 0) == 0);

    // Score the checkpoint on the shared grid.
    const fs::path ckpt = dir1 / "checkpoint.json";
    const fs::path pred = tmp_root() / "pred.csv";
    const RunResult pr = run_cli("predict --config " + field_cfg().string() +
                                 " --checkpoint " + ckpt.string() + " --out " +
                                 pred.string());
    CHECK(pr.code == 0);
    const json pj = parse_stdout(pr);
    CHECK(pj["nodes"] == 45);
    CHECK(pj["clamped_nodes"].get<std::uint64_t>() <= 45);
    REQUIRE(fs::exists(pred));

    // All four gradient routes run; the field route needs no config.
    const std::string cfg_part = " --config " + field_cfg().string();
    const fs::path gout = tmp_root() / "grad.csv";
    CHECK(run_cli("grad --method ad --checkpoint " + ckpt.string() + cfg_part +
                  " --out " + gout.string())
              .code == 0);
    CHECK(run_cli("grad --method fd --checkpoint " + ckpt.string() + cfg_part +
                  " --out " + gout.string())
              .code == 0);
    CHECK(run_cli("grad --method analytic" + cfg_part + " --out " + gout.string()).code ==
          0);
    const RunResult gf = run_cli("grad --method field --field " + pred.string() +
                                 " --out " + gout.string());
    CHECK(gf.code == 0);
    CHECK(slurp(gout).find("grad_x") != std::string::npos);

    CHECK(run_cli("grad --method ad" + cfg_part + " --out " + gout.string()).code == 2);
    CHECK(run_cli("grad --method bogus --checkpoint " + ckpt.string() + cfg_part +
                  " --out " + gout.string())
              .code == 2);
}

TEST_CASE("simulate writes the path it reports") {
    const fs::path out = tmp_root() / "traj.csv";
    const RunResult r = run_cli("simulate --x0 0 --horizon 0.5 --dt 0.25 --lambda 1" +
                                std::string(" --seed 9 --out ") + out.string());
    CHECK(r.code == 0);
    const json j = parse_stdout(r);
    CHECK(j["steps"] == 2);
    REQUIRE(j["final"].is_array());
    CHECK(j["final"].size() == 1);

    const std::string csv = slurp(out);
    CHECK(csv.rfind("t,x1\n", 0) == 0);
    CHECK(count_lines(csv) == 4); // header + 3 states

    const fs::path aug = tmp_root() / "traj_aug.csv";
    const RunResult ra = run_cli("simulate --x0 0 --horizon 0.5 --dt 0.25 --lambda 1" +
                                 std::string(" --seed 9 --augmented --out ") +
                                 aug.string());
    CHECK(ra.code == 0);
    CHECK(parse_stdout(ra)["final"].size() == 2);
    CHECK(slurp(aug).rfind("t,x1,x2\n", 0) == 0);
}

TEST_CASE("a reduced experiment run lands in a hashed directory") {
    const fs::path cfg = tmp_root() / "bench.cfg";
    write_text(cfg,
               "schema = 1\n"
               "mc.paths = 50\n"
               "run_ablation = false\n"
               "pipe.layers = 3, 8, 1\n"
               "pipe.epochs = 30\n"
               "pipe.history_every = 10\n"
               "pipe.checkpoint_every = 30\n");
    const fs::path out = tmp_root() / "bench_out";
    const RunResult r = run_cli("bench generalization --config " + cfg.string() +
                                " --seed 2 --out " + out.string());
    REQUIRE(r.code == 0);
    const json j = parse_stdout(r);
    CHECK(j["name"] == "generalization");
    REQUIRE(j.contains("config_hash"));

    const fs::path dir =
        out / ("generalization-" + j["config_hash"].get<std::string>());
    REQUIRE(fs::exists(dir / "report.json"));
    const json report = json::parse(slurp(dir / "report.json"), nullptr, false);
    REQUIRE(!report.is_discarded());
    CHECK(report["schema"] == 1);
    CHECK(report.contains("elapsed_seconds"));
    CHECK(fs::exists(dir / "pipe_field.csv"));
    CHECK(fs::exists(dir / "history.csv"));

    CHECK(run_cli("bench frobnicate --out " + out.string()).code == 2);
}

} // TEST_SUITE("cli")
