#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "ovdbg/artifacts.hpp"

using namespace ovdbg;
namespace fs = std::filesystem;

namespace {

struct TempDir
{
    fs::path path;
    TempDir()
    {
        path = fs::temp_directory_path() /
               ("ovdbg_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int &counter()
    {
        static int c = 0;
        return c;
    }
};

} // namespace

TEST_CASE("fnv1a is stable")
{
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") != fnv1a_hex("b"));
    CHECK(fnv1a_hex("hello") == fnv1a_hex("hello"));
}

TEST_CASE("artifact save/load round-trips payload and meta")
{
    TempDir dir;
    ArtifactMeta meta;
    meta.producer = "test --flag 1";
    save_artifact(dir.path / "x.json", {{"value", 42}}, meta);

    ArtifactMeta loaded;
    nlohmann::json j = load_artifact(dir.path / "x.json", &loaded);
    CHECK(j.at("value") == 42);
    CHECK(!j.contains("meta"));
    CHECK(loaded.producer == "test --flag 1");
}

TEST_CASE("stale inputs are detected by hash mismatch")
{
    TempDir dir;
    {
        std::ofstream f(dir.path / "input.txt");
        f << "original";
    }
    ArtifactMeta meta;
    meta.producer = "derive";
    meta.inputs["input.txt"] = file_hash(dir.path / "input.txt");
    save_artifact(dir.path / "derived.json", {{"ok", true}}, meta);

    CHECK(stale_inputs(dir.path, meta).empty());
    {
        std::ofstream f(dir.path / "input.txt");
        f << "changed";
    }
    auto stale = stale_inputs(dir.path, meta);
    REQUIRE(stale.size() == 1);
    CHECK(stale[0] == "input.txt");
}

TEST_CASE("volatile timing keys strip away, everything else survives")
{
    nlohmann::json j = {{"fraction", 0.5},
                        {"build_time_s", 1.25},
                        {"nested", {{"map_time_s", 2.0}, {"keep", 1}}},
                        {"list", {{{"route_time_s", 3.0}, {"w", 8}}}}};
    nlohmann::json s = strip_volatile(j);
    CHECK(s.contains("fraction"));
    CHECK(!s.contains("build_time_s"));
    CHECK(!s["nested"].contains("map_time_s"));
    CHECK(s["nested"].contains("keep"));
    CHECK(!s["list"][0].contains("route_time_s"));
    CHECK(s["list"][0]["w"] == 8);
}

TEST_CASE("normalized comparison ignores only the volatile fields")
{
    TempDir dir;
    ArtifactMeta meta;
    meta.producer = "x";
    save_artifact(dir.path / "a.json", {{"v", 1}, {"build_time_s", 0.5}}, meta);
    save_artifact(dir.path / "b.json", {{"v", 1}, {"build_time_s", 0.9}}, meta);
    save_artifact(dir.path / "c.json", {{"v", 2}, {"build_time_s", 0.5}}, meta);
    CHECK(artifacts_equal_normalized(dir.path / "a.json", dir.path / "b.json"));
    CHECK(!artifacts_equal_normalized(dir.path / "a.json", dir.path / "c.json"));
}
