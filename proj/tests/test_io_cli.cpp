#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "vlab/config.hpp"
#include "vlab/io.hpp"
#include "vlab/solver.hpp"
#include "vlab/vorticity.hpp"

using namespace vlab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag)
{
    static int counter = 0;
    const fs::path p = fs::temp_directory_path() /
                       ("vlab_io_test_" + std::to_string(::getpid()) + "_" + tag + "_" +
                        std::to_string(counter++));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text)
{
    std::ofstream out(p, std::ios::binary);
    out << text;
    REQUIRE(out.good());
}

// file content with every line whose prefix matches dropped (the timestamp
// line is explicitly excluded from byte comparisons)
std::string strip_lines(const std::string& text, const std::string& prefix)
{
    std::stringstream in(text), out;
    std::string line;
    while (std::getline(in, line))
        if (line.rfind(prefix, 0) != 0 && line.find("\"generated\"") == std::string::npos)
            out << line << "\n";
    return out.str();
}

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::string& args)
{
    const char* bin = std::getenv("VORTEXLAB_BIN");
    REQUIRE_MESSAGE(bin != nullptr, "VORTEXLAB_BIN must point at the tool binary");
    const fs::path dir = fresh_dir("run");
    const fs::path of = dir / "stdout", ef = dir / "stderr";
    const std::string cmd =
        std::string(bin) + " " + args + " >" + of.string() + " 2>" + ef.string();
    const int raw = std::system(cmd.c_str());
    CliResult res;
    res.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    res.out = slurp(of);
    res.err = slurp(ef);
    return res;
}

// value after "name = " on the line starting with name
double printed_value(const std::string& out, const std::string& name)
{
    std::stringstream in(out);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(name, 0) != 0)
            continue;
        const std::size_t eq = line.rfind('=');
        REQUIRE(eq != std::string::npos);
        return std::strtod(line.c_str() + eq + 1, nullptr);
    }
    FAIL("no line starts with '" << name << "' in:\n" << out);
    return 0.0;
}

std::uint64_t reference_fnv1a(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s)
        h = (h ^ c) * 0x100000001b3ull;
    return h;
}

} // namespace

TEST_CASE("config: text form parses dotted keys, sections, comments")
{
    const std::string text =
        "# run setup\n"
        "spec = patch   # trailing comment\n"
        "stability.p = 4\n"
        "\n"
        "[solver]\n"
        "dt = 1e-3\n"
        "t_end = 2\n"
        "[stability.inner]\n"
        "knob = yes\n";
    const Settings s = parse_config_text(text);
    CHECK(s.kv.size() == 5);
    CHECK(s.get("spec", "") == "patch");
    CHECK(s.get("solver.dt", "") == "1e-3");
    CHECK(s.get("solver.t_end", "") == "2");
    CHECK(s.get("stability.inner.knob", "") == "yes");
    CHECK(s.get_double("stability.p", 0.0) == 4.0);

    // later duplicates win
    const Settings d = parse_config_text("a = 1\na = 2\n");
    CHECK(d.get("a", "") == "2");

    CHECK_THROWS_AS(parse_config_text("just words\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("[open\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("bad key! = 1\n"), std::invalid_argument);
}

TEST_CASE("config: JSON form flattens to the same keys")
{
    const std::string text =
        R"({"spec": "patch", "solver": {"dt": 1e-3, "t_end": 2},
            "eps": [0.01, 0.001], "deep": {"a": {"b": true}}})";
    const Settings s = parse_config_json(text);
    CHECK(s.get("spec", "") == "patch");
    CHECK(s.get_double("solver.dt", 0.0) == 1e-3);
    CHECK(s.get("deep.a.b", "") == "true");
    const auto eps = s.get_list("eps", {});
    REQUIRE(eps.size() == 2);
    CHECK(eps[0] == 0.01);
    CHECK(eps[1] == 0.001);

    CHECK_THROWS_AS(parse_config_json("[1, 2]"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_json(R"({"a": [{"b": 1}]})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_json("{nope"), std::invalid_argument);
}

TEST_CASE("config: typed getters validate and default")
{
    Settings s;
    s.set("x", "2.5");
    s.set("n", "12");
    s.set("flag", "true");
    s.set("list", "1e-2, 1e-3 ,1e-4");
    s.set("junk", "twelve");

    CHECK(s.get_double("x", 0.0) == 2.5);
    CHECK(s.get_double("missing", 7.0) == 7.0);
    CHECK(s.get_int("n", 0) == 12);
    CHECK(s.get_bool("flag", false));
    CHECK(s.get_bool("missing", true));
    CHECK(s.get_list("list", {}).size() == 3);
    CHECK(s.get_list("missing", {1.0, 2.0}).size() == 2);

    CHECK_THROWS_AS(s.get_double("junk", 0.0), std::invalid_argument);
    CHECK_THROWS_AS(s.get_int("x", 0), std::invalid_argument); // 2.5 is not integral
    CHECK_THROWS_AS(s.get_bool("n", false), std::invalid_argument);
    CHECK_THROWS_AS(s.set("spaced key", "1"), std::invalid_argument);
}

TEST_CASE("config: overrides and the key registry")
{
    Settings s = parse_config_text("solver.dt = 1e-3\n");
    apply_override(s, "solver.dt=5e-4");
    apply_override(s, "spec = patch"); // spaces tolerated
    CHECK(s.get("solver.dt", "") == "5e-4");
    CHECK(s.get("spec", "") == "patch");
    CHECK_THROWS_AS(apply_override(s, "no-equals-here"), std::invalid_argument);

    CHECK_NOTHROW(require_known_keys(s, {"solver.dt", "spec"}, "test"));
    try {
        require_known_keys(s, {"spec"}, "command 'demo'");
        FAIL("unknown key accepted");
    } catch (const std::invalid_argument& e) {
        const std::string msg = e.what();
        CHECK(msg.find("solver.dt") != std::string::npos); // names the offender
        CHECK(msg.find("valid keys") != std::string::npos);
        CHECK(msg.find("spec") != std::string::npos); // lists what is accepted
        CHECK(msg.find("demo") != std::string::npos);
    }
}

TEST_CASE("config: canonical form and hash are order-free and collision-visible")
{
    Settings a, b;
    a.set("z.last", "3");
    a.set("a.first", "1");
    b.set("a.first", "1");
    b.set("z.last", "3");
    CHECK(a.canonical() == "a.first = 1\nz.last = 3\n");
    CHECK(a.hash() == b.hash());

    b.set("z.last", "4");
    CHECK(a.hash() != b.hash());

    // FNV-1a 64 against an independent byte-loop
    CHECK(Settings{}.hash() == 0xcbf29ce484222325ull);
    for (const std::string probe :
         {std::string("a"), std::string("a = 1\n"), a.canonical()})
        CHECK(fnv1a64(probe) == reference_fnv1a(probe));
}

TEST_CASE("io: shortest round-trip double formatting")
{
    for (const double v : {1e-4, 0.1, 1.0 / 3.0, 19.7392088021787, 6.90775527898214e-3,
                           1e300, 5e-324, 0.0, -2.5}) {
        const std::string s = format_double(v);
        CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(std::signbit(std::strtod(format_double(-0.0).c_str(), nullptr)));
}

TEST_CASE("io: artifact header carries tool, hash, seed, resolved config")
{
    ArtifactMeta meta;
    meta.config_hash = 0x0123456789abcdefull;
    meta.seed = 42;
    meta.config.set("solver.dt", "1e-3");
    meta.timestamp = false;

    const std::string h = csv_header(meta);
    CHECK(h.rfind("# tool: vortexlab 0.1.0\n", 0) == 0);
    CHECK(h.find("# config: 0123456789abcdef\n") != std::string::npos);
    CHECK(h.find("# seed: 42\n") != std::string::npos);
    CHECK(h.find("# cfg solver.dt = 1e-3\n") != std::string::npos);
    CHECK(h.find("generated") == std::string::npos);

    meta.timestamp = true;
    CHECK(csv_header(meta).find("# generated: ") != std::string::npos);
}

TEST_CASE("io: trajectory binary snapshot round-trips")
{
    SolverConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 0.05;
    const ParticleFlow flow = discretize(builtin_vorticity("three-vortex"), 4);
    const Trajectory traj = direct_solve(flow, cfg);

    const fs::path dir = fresh_dir("bin");
    const fs::path path = dir / "snap.bin";
    write_trajectory_binary(path.string(), traj);

    const TrajectorySnapshot snap = read_trajectory_binary(path.string());
    CHECK(snap.n == traj.n);
    CHECK(snap.steps == traj.steps);
    REQUIRE(snap.positions.size() == traj.data.size());
    for (std::size_t i = 0; i < snap.positions.size(); ++i) {
        CHECK(snap.positions[i].x == traj.data[i].x);
        CHECK(snap.positions[i].y == traj.data[i].y);
    }

    const std::string raw = slurp(path);
    CHECK(raw.compare(0, 5, "YUDO1") == 0);

    spit(dir / "bad.bin", "NOPE!" + raw.substr(5));
    CHECK_THROWS_AS(read_trajectory_binary((dir / "bad.bin").string()), std::runtime_error);
    spit(dir / "short.bin", raw.substr(0, raw.size() - 3));
    CHECK_THROWS_AS(read_trajectory_binary((dir / "short.bin").string()), std::runtime_error);
}

TEST_CASE("io: trajectory csv keeps strided frames plus the final one")
{
    SolverConfig cfg;
    cfg.dt = 1e-2;
    cfg.t_end = 0.05; // 5 steps, 6 frames
    const ParticleFlow flow = discretize(builtin_vorticity("three-vortex"), 4);
    const Trajectory traj = direct_solve(flow, cfg);
    REQUIRE(traj.steps == 5);

    ArtifactMeta meta;
    meta.timestamp = false;
    const fs::path dir = fresh_dir("csv");

    write_trajectory_csv((dir / "t.csv").string(), traj, meta, 2);
    const std::string text = slurp(dir / "t.csv");
    // frames 0, 2, 4 and the final 5 -> 4 frames x 3 labels
    std::size_t rows = 0, header_rows = 0;
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("#", 0) == 0 || line.rfind("time,", 0) == 0)
            ++header_rows;
        else
            ++rows;
    }
    CHECK(rows == 4 * traj.n);
    CHECK(text.find("time,label_id,label_x,label_y,pos_x,pos_y,weight,omega") !=
          std::string::npos);
    CHECK(text.find("\n0.05,") != std::string::npos); // final frame present

    // stride 0 picks a power of two keeping at most 257 frames; here that is 1
    write_trajectory_csv((dir / "t0.csv").string(), traj, meta, 0);
    std::size_t rows0 = 0;
    std::stringstream in0(slurp(dir / "t0.csv"));
    while (std::getline(in0, line))
        if (line.rfind("#", 0) != 0 && line.rfind("time,", 0) != 0)
            ++rows0;
    CHECK(rows0 == 6 * traj.n);
}

TEST_CASE("cli: modulus prints the induced modulus values")
{
    const CliResult res = run_cli("modulus --theta constant --r 1e-4");
    CHECK(res.code == 0);
    CHECK(printed_value(res.out, "mu(") == doctest::Approx(9.21034037197618e-4).epsilon(1e-9));
    CHECK(printed_value(res.out, "big_m(") == doctest::Approx(1.1429172451507).epsilon(1e-9));
    CHECK(printed_value(res.out, "nu(") == doctest::Approx(0.318887390884425).epsilon(1e-9));

    // the non-Osgood profile computes, but carries the warning tag
    const CliResult lin = run_cli("modulus --theta linear --r 1e-6");
    CHECK(lin.code == 0);
    CHECK(lin.out.find("not Osgood") != std::string::npos);
}

TEST_CASE("cli: picard on the zero field converges immediately")
{
    const fs::path dir = fresh_dir("picard0");
    const CliResult res = run_cli("picard --out " + dir.string());
    CHECK(res.code == 0);
    CHECK(res.out.find("spec 'zero'") != std::string::npos);
    CHECK(res.out.find("converged in 1 iteration") != std::string::npos);
    CHECK(fs::exists(dir / "trajectory.csv"));
    CHECK(fs::exists(dir / "residuals.csv"));
    CHECK(fs::exists(dir / "summary.json"));

    const nlohmann::json j = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(j["iterations"] == 1);
    CHECK(j["converged"] == true);
    CHECK(j["config"]["spec"] == "zero");
}

TEST_CASE("cli: list prints the catalog in lexicographic order")
{
    const CliResult res = run_cli("list");
    CHECK(res.code == 0);
    for (const std::string name : {"patch", "gaussian", "corotating-pair",
                                   "single-vortex-tracers", "logspike"})
        CHECK(res.out.find("  " + name + "\n") != std::string::npos);
    CHECK(res.out.find("linear  [non-Osgood]") != std::string::npos);

    // spec names appear sorted
    std::vector<std::string> specs;
    std::stringstream in(res.out);
    std::string line;
    bool in_specs = false;
    while (std::getline(in, line)) {
        if (line == "specs:") {
            in_specs = true;
            continue;
        }
        if (line.rfind("  ", 0) != 0)
            in_specs = false;
        if (in_specs)
            specs.push_back(line);
    }
    REQUIRE(specs.size() >= 5);
    CHECK(std::is_sorted(specs.begin(), specs.end()));

    const CliResult twice = run_cli("list");
    CHECK(twice.out == res.out);
}

TEST_CASE("cli: exit codes separate usage, science, and success")
{
    CHECK(run_cli("picard --set bogus.key=1").code == 1);        // unknown key
    CHECK(run_cli("picard --config /does/not/exist.cfg").code == 1);
    CHECK(run_cli("picard --spec no-such-builtin").code == 1);
    CHECK(run_cli("no-such-command").code == 1);
    CHECK(run_cli("--help").code == 0);

    const CliResult bad = run_cli("picard --set bogus.key=1");
    CHECK(bad.err.find("valid keys") != std::string::npos);
    CHECK(bad.err.find("solver.dt") != std::string::npos);

    // an honest non-convergence is a scientific failure, not a usage error
    const CliResult nc = run_cli(
        "picard --spec three-vortex --tend 0.5 --dt 0.05 --tol 1e-15 --max-iter 2");
    CHECK(nc.code == 2);
    CHECK(nc.out.find("NOT converged") != std::string::npos);
}

TEST_CASE("cli: same config and seed give byte-identical artifacts")
{
    const fs::path a = fresh_dir("rerun_a"), b = fresh_dir("rerun_b");
    const std::string args = "kernel-audit --domain disk --samples 500 --seed 7 --out ";
    REQUIRE(run_cli(args + a.string()).code == 0);
    REQUIRE(run_cli(args + b.string()).code == 0);

    CHECK(strip_lines(slurp(a / "kernel-audit.csv"), "# generated") ==
          strip_lines(slurp(b / "kernel-audit.csv"), "# generated"));
    CHECK(strip_lines(slurp(a / "summary.json"), "#") ==
          strip_lines(slurp(b / "summary.json"), "#"));

    const fs::path c = fresh_dir("rerun_c");
    REQUIRE(run_cli("kernel-audit --domain disk --samples 500 --seed 8 --out " +
                    c.string())
                .code == 0);
    CHECK(strip_lines(slurp(a / "kernel-audit.csv"), "#") !=
          strip_lines(slurp(c / "kernel-audit.csv"), "#"));

    // deterministic command without a seed: simulate twice, compare bytes
    const fs::path d = fresh_dir("rerun_d"), e = fresh_dir("rerun_e");
    const std::string sim = "simulate --tend 0.1 --out ";
    REQUIRE(run_cli(sim + d.string()).code == 0);
    REQUIRE(run_cli(sim + e.string()).code == 0);
    CHECK(strip_lines(slurp(d / "trajectory.csv"), "# generated") ==
          strip_lines(slurp(e / "trajectory.csv"), "# generated"));
    CHECK(slurp(d / "trajectory.bin") == slurp(e / "trajectory.bin"));
}

TEST_CASE("cli: file, override, and flag layers stack in that order")
{
    const fs::path dir = fresh_dir("layers");
    const fs::path cfg = dir / "run.cfg";
    spit(cfg, "spec = zero\n[solver]\ndt = 0.01\nt_end = 0.02\n");

    // file only
    const fs::path o1 = dir / "o1";
    REQUIRE(run_cli("picard --config " + cfg.string() + " --out " + o1.string()).code == 0);
    nlohmann::json j1 = nlohmann::json::parse(slurp(o1 / "summary.json"));
    CHECK(j1["config"]["solver.dt"] == "0.01");

    // --set beats the file
    const fs::path o2 = dir / "o2";
    REQUIRE(run_cli("picard --config " + cfg.string() + " --set solver.dt=0.005 --out " +
                    o2.string())
                .code == 0);
    nlohmann::json j2 = nlohmann::json::parse(slurp(o2 / "summary.json"));
    CHECK(j2["config"]["solver.dt"] == "0.005");

    // a dedicated flag beats --set
    const fs::path o3 = dir / "o3";
    REQUIRE(run_cli("picard --config " + cfg.string() +
                    " --set solver.dt=0.005 --dt 0.002 --out " + o3.string())
                .code == 0);
    nlohmann::json j3 = nlohmann::json::parse(slurp(o3 / "summary.json"));
    CHECK(j3["config"]["solver.dt"] == "0.002");

    // the JSON spelling of the same config resolves to the same hash
    const fs::path jcfg = dir / "run.json";
    spit(jcfg, R"({"spec": "zero", "solver": {"dt": "0.01", "t_end": "0.02"}})");
    const fs::path o4 = dir / "o4";
    REQUIRE(run_cli("picard --config " + jcfg.string() + " --out " + o4.string()).code == 0);
    nlohmann::json j4 = nlohmann::json::parse(slurp(o4 / "summary.json"));
    CHECK(j4["meta"]["config_hash"] == j1["meta"]["config_hash"]);

    // the stamped hash matches an independent recomputation of the canonical form
    Settings resolved;
    for (const auto& [k, v] : j1["config"].items())
        resolved.set(k, v.get<std::string>());
    CHECK(j1["meta"]["config_hash"] == hex64(resolved.hash()));
}

TEST_CASE("cli: seed is stamped on every artifact")
{
    const fs::path dir = fresh_dir("seed");
    REQUIRE(run_cli("kernel-audit --samples 200 --seed 11 --out " + dir.string()).code == 0);
    const std::string csv = slurp(dir / "kernel-audit.csv");
    CHECK(csv.find("# seed: 11\n") != std::string::npos);
    CHECK(csv.rfind("# tool: vortexlab", 0) == 0);
    const nlohmann::json j = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(j["meta"]["seed"] == 11);
    CHECK(j["config"]["seed"] == "11");
}
