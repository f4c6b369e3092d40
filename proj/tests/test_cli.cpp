// End-to-end tests of the ovdbg binary: full flow, exit codes, artifact
// wiring, debug-time commands never touching compile-time artifacts.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ovdbg/artifacts.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Workspace
{
    fs::path dir;
    Workspace()
    {
        dir = fs::temp_directory_path() / ("ovdbg_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Workspace() { fs::remove_all(dir); }

    int run(const std::string &args) const
    {
        std::string cmd = std::string(OVDBG_BIN_PATH) + " --dir " + dir.string() + " " + args +
                          " >> " + (dir / "cli.log").string() + " 2>&1";
        int status = std::system(cmd.c_str());
        return WEXITSTATUS(status);
    }

    std::string slurp(const std::string &name) const
    {
        std::ifstream in(dir / name, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    }

    json load(const std::string &name) const { return json::parse(slurp(name)); }
};

} // namespace

TEST_CASE("full pipeline through the CLI")
{
    Workspace ws;

    REQUIRE(ws.run("gen-arch --width 5 --height 5 --w 8 --tb-period 2") == 0);
    REQUIRE(fs::exists(ws.dir / "arch.json"));

    REQUIRE(ws.run("synth-random --seed 5 --luts 30") == 0);
    REQUIRE(fs::exists(ws.dir / "netlist.blif"));

    REQUIRE(ws.run("pnr --seed 7") == 0);
    REQUIRE(fs::exists(ws.dir / "placement.json"));
    REQUIRE(fs::exists(ws.dir / "routing.json"));

    REQUIRE(ws.run("minw --seed 7 --w-hi 32") == 0);
    json minw = ws.load("minw.json");
    CHECK(minw.at("w_min").get<int>() >= 2);

    REQUIRE(ws.run("build-trace-overlay --fanout 1 --seed 7") == 0);
    REQUIRE(fs::exists(ws.dir / "overlay.json"));
    REQUIRE(fs::exists(ws.dir / "overlay_report.json"));

    REQUIRE(ws.run("build-trigger-fabric --link-budget 2 --seed 7") == 0);
    REQUIRE(fs::exists(ws.dir / "trigger_fabric.json"));

    // pick two connected signals straight from the overlay artifact
    json overlay = ws.load("overlay.json");
    std::vector<std::string> leaves;
    for (const auto &tree : overlay.at("trees"))
        for (const auto &[name, leaf] : tree.at("leaves").items())
            if (std::find(leaves.begin(), leaves.end(), name) == leaves.end())
                leaves.push_back(name);
    REQUIRE(leaves.size() >= 2);

    SUBCASE("select-signals is pure debug-time: reruns are byte-identical")
    {
        std::string placement_before = ovdbg::file_hash(ws.dir / "placement.json");
        std::string routing_before = ovdbg::file_hash(ws.dir / "routing.json");

        std::string want = leaves[0] + "," + leaves[1];
        int rc = ws.run("select-signals --want " + want);
        CHECK((rc == 0 || rc == 1));
        REQUIRE(fs::exists(ws.dir / "debug_config.json"));
        std::string first = ws.slurp("debug_config.json");

        CHECK(ws.run("select-signals --want " + want) == rc);
        CHECK(ws.slurp("debug_config.json") == first);

        CHECK(ovdbg::file_hash(ws.dir / "placement.json") == placement_before);
        CHECK(ovdbg::file_hash(ws.dir / "routing.json") == routing_before);
    }

    SUBCASE("unknown signals exit 2 and are named")
    {
        CHECK(ws.run("select-signals --want no_such_signal") == 2);
        std::string log = ws.slurp("cli.log");
        CHECK(log.find("no_such_signal") != std::string::npos);
    }

    SUBCASE("map-trigger over the fabric, then verify everything")
    {
        REQUIRE(ws.run("select-signals --want " + leaves[0]) == 0);

        std::ofstream trig(ws.dir / "t.blif");
        trig << ".model t\n.inputs " << leaves[0] << " " << leaves[1]
             << "\n.outputs fire\n.names " << leaves[0] << " " << leaves[1]
             << " fire\n11 1\n.end\n";
        trig.close();
        int rc = ws.run("map-trigger --trigger " + (ws.dir / "t.blif").string() + " --seed 3");
        CHECK(rc == 0);
        REQUIRE(fs::exists(ws.dir / "trigger_config.json"));
        json cfg = ws.load("trigger_config.json");
        CHECK(cfg.at("feasible").get<bool>());

        CHECK(ws.run("verify") == 0);
        CHECK(ws.run("stats") == 0);
        REQUIRE(fs::exists(ws.dir / "stats.json"));
    }

    SUBCASE("pnr rerun with the same seed is byte-identical")
    {
        std::string placement = ws.slurp("placement.json");
        std::string routing = ws.slurp("routing.json");
        REQUIRE(ws.run("pnr --seed 7") == 0);
        CHECK(ws.slurp("placement.json") == placement);
        CHECK(ws.slurp("routing.json") == routing);
    }

    SUBCASE("stale inputs are rejected")
    {
        // regenerating the netlist invalidates placement.json's recorded hash
        REQUIRE(ws.run("synth-random --seed 999 --luts 30") == 0);
        int rc = ws.run("minw --seed 7");
        CHECK(rc == 2);
        std::string log = ws.slurp("cli.log");
        CHECK(log.find("stale") != std::string::npos);
    }
}

TEST_CASE("validation errors exit 2")
{
    Workspace ws;
    CHECK(ws.run("gen-arch --width 0") == 2);
    CHECK(ws.run("gen-arch --w 7") == 2);
    CHECK(ws.run("gen-arch --fc-in 0") == 2);
}

TEST_CASE("unroutable pnr exits 3 and names congested nodes")
{
    Workspace ws;
    REQUIRE(ws.run("gen-arch --width 2 --height 2 --w 2 --bles 4 --clb-inputs 16") == 0);
    REQUIRE(ws.run("synth-random --seed 3 --luts 12") == 0);
    int rc = ws.run("pnr --seed 1 --max-iters 12");
    if (rc != 0) // a 12-LUT circuit on W=2 is expected to fail, but either
        CHECK(rc == 3); // way the exit code contract is what matters
}
