#include <doctest.h>

#include "ricci/cli.hpp"
#include "ricci/geometry.hpp"

#include <cstdlib>
#include <filesystem>
#include <unistd.h>
#include <fstream>
#include <sstream>

#ifndef RICCI2D_BIN
#error "RICCI2D_BIN must point at the ricci2d binary"
#endif

namespace fs = std::filesystem;

namespace {

struct Shell {
    fs::path dir;
    Shell() {
        dir = fs::temp_directory_path() /
              ("ricci2d_test_" + std::to_string(static_cast<unsigned>(::getpid())));
        fs::create_directories(dir);
    }
    ~Shell() { std::error_code ec; fs::remove_all(dir, ec); }

    int run(const std::string& args, const std::string& out_name = "out.txt") const {
        const std::string cmd = std::string(RICCI2D_BIN) + " " + args + " > " +
                                (dir / out_name).string() + " 2> " +
                                (dir / (out_name + ".err")).string();
        const int rc = std::system(cmd.c_str());
        return WEXITSTATUS(rc);
    }
    std::string slurp(const std::string& name) const {
        std::ifstream is(dir / name);
        std::ostringstream os;
        os << is.rdbuf();
        return os.str();
    }
};

} // namespace

TEST_CASE("cli: invalid configurations exit 5 and create no output files") {
    Shell sh;
    const auto out = (sh.dir / "never.csv").string();
    CHECK(sh.run("flow --family nosuch --out " + out) == ricci::cli::kInvalidConfig);
    CHECK(sh.run("flow --n 100 --out " + out) == ricci::cli::kInvalidConfig);
    CHECK(sh.run("flow --family perturbed --eps 0.95 --out " + out) == ricci::cli::kInvalidConfig);
    CHECK(sh.run("flow --mode sideways --out " + out) == ricci::cli::kInvalidConfig);
    CHECK(sh.run("soliton-sweep --a-step -0.1 --out " + out) == ricci::cli::kInvalidConfig);
    CHECK(sh.run("solve --a-lo 1 --a-hi -1") == ricci::cli::kInvalidConfig);
    CHECK(sh.run("frobnicate") == ricci::cli::kInvalidConfig);
    CHECK(!fs::exists(out));
}

TEST_CASE("cli: missing input files exit 3") {
    Shell sh;
    CHECK(sh.run("diagnose " + (sh.dir / "absent.csv").string()) == ricci::cli::kIoFailure);
    CHECK(sh.run("flow --config " + (sh.dir / "absent.json").string()) == ricci::cli::kIoFailure);
}

TEST_CASE("cli: soliton sweep has one ordered row per a and is byte-stable") {
    Shell sh;
    const auto out1 = (sh.dir / "sweep1.csv").string();
    const auto out2 = (sh.dir / "sweep2.csv").string();
    // coarse integrator step keeps this test snappy
    CHECK(sh.run("soliton-sweep --step 1e-3 --out " + out1) == 0);
    CHECK(sh.run("soliton-sweep --step 1e-3 --out " + out2) == 0);
    const auto body = sh.slurp("sweep1.csv");
    CHECK(body == sh.slurp("sweep2.csv"));
    int rows = -1; // header
    std::istringstream is(body);
    std::string line, a0_line;
    double prev_a = -1e9;
    while (std::getline(is, line)) {
        if (rows >= 0 && !line.empty()) {
            const double a = std::stod(line.substr(0, line.find(',')));
            CHECK(a > prev_a);
            prev_a = a;
            if (line.rfind("0,", 0) == 0) a0_line = line;
        }
        ++rows;
    }
    CHECK(rows == 11);
    REQUIRE(!a0_line.empty());
    // row a = 0 closes to the integrator floor
    std::istringstream row(a0_line);
    std::string field;
    for (int i = 0; i < 4; ++i) std::getline(row, field, ',');
    CHECK(std::stod(field) < 1e-10);

    // a sweep restricted to one a produces exactly one (non-closing enough) row
    const auto single = (sh.dir / "single.csv").string();
    CHECK(sh.run("soliton-sweep --a-min 0.3 --a-max 0.3 --step 1e-3 --out " + single) == 0);
    const auto sbody = sh.slurp("single.csv");
    CHECK(std::count(sbody.begin(), sbody.end(), '\n') == 2);
    std::istringstream srow(sbody.substr(sbody.find('\n') + 1));
    for (int i = 0; i < 4; ++i) std::getline(srow, field, ',');
    CHECK(std::stod(field) > 0.01);
}

TEST_CASE("cli: identity-check writes two steps per a") {
    Shell sh;
    const auto out = (sh.dir / "id.csv").string();
    CHECK(sh.run("identity-check --a-min -0.1 --a-max 0.1 --a-step 0.1 --step 0.05 --out " + out) == 0);
    const auto body = sh.slurp("id.csv");
    CHECK(body.rfind("a,step,A,I,residual\n", 0) == 0);
    CHECK(std::count(body.begin(), body.end(), '\n') == 1 + 3 * 2);
}

TEST_CASE("cli: config file supplies values, flags win") {
    Shell sh;
    {
        std::ofstream cfg(sh.dir / "cfg.json");
        cfg << R"({"a_min": 0.0, "a_max": 0.2, "a_step": 0.1, "step": 1e-3, "out": ")"
            << (sh.dir / "from_cfg.csv").string() << R"("})";
    }
    CHECK(sh.run("soliton-sweep --config " + (sh.dir / "cfg.json").string()) == 0);
    CHECK(fs::exists(sh.dir / "from_cfg.csv"));
    // now override the output path on the command line
    CHECK(sh.run("soliton-sweep --config " + (sh.dir / "cfg.json").string() + " --out " +
                 (sh.dir / "flag_wins.csv").string()) == 0);
    CHECK(fs::exists(sh.dir / "flag_wins.csv"));
    const auto body = sh.slurp("flag_wins.csv");
    CHECK(std::count(body.begin(), body.end(), '\n') == 1 + 3);

    std::ofstream(sh.dir / "broken.json") << "{ not json";
    CHECK(sh.run("soliton-sweep --config " + (sh.dir / "broken.json").string()) ==
          ricci::cli::kInvalidConfig);
}

TEST_CASE("cli: diagnose round-trips a generated profile") {
    Shell sh;
    const auto m = ricci::geometry::make_profile({ricci::geometry::ProfileFamily::round, 0, 1}, 101);
    ricci::geometry::write_profile_csv(m, (sh.dir / "round.csv").string());
    CHECK(sh.run("diagnose " + (sh.dir / "round.csv").string(), "diag.json") == 0);
    const auto body = sh.slurp("diag.json");
    CHECK(body.find("\"k_min\"") != std::string::npos);
    CHECK(body.find("\"entropy\"") != std::string::npos);
    CHECK(body.find("\"einstein_defect\"") != std::string::npos);
}

TEST_CASE("cli: flow writes snapshots at the requested cadence") {
    Shell sh;
    const auto out = (sh.dir / "diag.csv").string();
    CHECK(sh.run("flow --family round --mode normalized --n 51 --out " + out +
                 " --snapshot-every 1 --snapshot-dir " + sh.dir.string()) == 0);
    int snaps = 0;
    for (const auto& e : fs::directory_iterator(sh.dir))
        if (e.path().filename().string().rfind("snapshot_t", 0) == 0) ++snaps;
    CHECK(snaps >= 1);
}

TEST_CASE("cli: coarse-grid verify passes with relaxed tolerances from config") {
    Shell sh;
    {
        std::ofstream cfg(sh.dir / "coarse.json");
        cfg << R"({"n": 51, "tol_scale": 1000.0, "fixed_point_steps": 500})";
    }
    CHECK(sh.run("verify --config " + (sh.dir / "coarse.json").string(), "verify.json") == 0);
    const auto body = sh.slurp("verify.json");
    CHECK(body.find("\"all_pass\": true") != std::string::npos);
}

TEST_CASE("cli: normalized flow from a perturbed profile exits 0 after converging") {
    Shell sh;
    const auto out = (sh.dir / "diag.csv").string();
    CHECK(sh.run("flow --family perturbed --eps 0.3 --k 1 --mode normalized --n 101 --out " +
                 out) == 0);
    const auto body = sh.slurp("diag.csv");
    // final record: ratio column (5th field) satisfies ratio - 1 < 1e-2
    const auto last = body.substr(body.rfind('\n', body.size() - 2) + 1);
    std::istringstream row(last);
    std::string f;
    for (int i = 0; i < 5; ++i) std::getline(row, f, ',');
    CHECK(std::stod(f) - 1.0 < 1e-2);
}

TEST_CASE("cli: solve writes profile and trajectory dumps") {
    Shell sh;
    const auto prof = (sh.dir / "closed.csv").string();
    const auto traj = (sh.dir / "traj.csv").string();
    // coarse shoot step keeps this quick; closure quality is tested elsewhere
    CHECK(sh.run("solve --step 1e-3 --tol 1e-6 --a-tolerance 1e-4 --n 101 --profile-out " +
                 prof + " --trajectory-out " + traj) == 0);
    CHECK(sh.slurp("closed.csv").rfind("s,phi,h\n", 0) == 0);
    const auto tbody = sh.slurp("traj.csv");
    CHECK(tbody.rfind("r,phi,h\n", 0) == 0);
    CHECK(tbody.find(",1,") != std::string::npos);
}

TEST_CASE("JsonWriter: ordered keys, 17-digit floats, nulls") {
    ricci::cli::JsonWriter w;
    w.begin_object()
        .field("b_first", 0.1)
        .field("a_second", std::string("x\"y"))
        .field_null("c_third")
        .field("d", true)
        .end_object();
    const auto s = w.str();
    CHECK(s.find("\"b_first\": 0.10000000000000001") != std::string::npos);
    CHECK(s.find("\"a_second\": \"x\\\"y\"") != std::string::npos);
    CHECK(s.find("\"c_third\": null") != std::string::npos);
    CHECK(s.find("b_first") < s.find("a_second")); // insertion order kept
}
