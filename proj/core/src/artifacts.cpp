#include "ovdbg/artifacts.hpp"

#include <fstream>
#include <sstream>

namespace ovdbg {

std::string fnv1a_hex(std::string_view bytes)
{
    uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_hash(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    return fnv1a_hex(os.str());
}

void save_artifact(const std::filesystem::path &path, nlohmann::json payload,
                   const ArtifactMeta &meta)
{
    nlohmann::json m{{"producer", meta.producer}, {"inputs", meta.inputs}};
    payload["meta"] = std::move(m);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out << payload.dump(2) << "\n";
}

nlohmann::json load_artifact(const std::filesystem::path &path, ArtifactMeta *meta)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot read " + path.string());
    nlohmann::json j = nlohmann::json::parse(in);
    if (meta && j.contains("meta")) {
        meta->producer = j["meta"].value("producer", "");
        if (j["meta"].contains("inputs"))
            meta->inputs = j["meta"]["inputs"].get<std::map<std::string, std::string>>();
    }
    j.erase("meta");
    return j;
}

std::vector<std::string> stale_inputs(const std::filesystem::path &dir, const ArtifactMeta &meta)
{
    std::vector<std::string> stale;
    for (const auto &[name, hash] : meta.inputs) {
        std::filesystem::path p = dir / name;
        if (!std::filesystem::exists(p) || file_hash(p) != hash)
            stale.push_back(name);
    }
    return stale;
}

nlohmann::json strip_volatile(nlohmann::json j)
{
    static const char *volatile_suffixes[] = {"_time_s", "_seconds"};
    auto is_volatile = [](const std::string &key) {
        if (key == "seconds" || key == "build_time_s" || key == "map_time_s")
            return true;
        for (const char *suffix : volatile_suffixes) {
            size_t n = std::string_view(suffix).size();
            if (key.size() > n && key.compare(key.size() - n, n, suffix) == 0)
                return true;
        }
        return false;
    };
    if (j.is_object()) {
        nlohmann::json out = nlohmann::json::object();
        for (auto &[key, value] : j.items())
            if (!is_volatile(key))
                out[key] = strip_volatile(value);
        return out;
    }
    if (j.is_array()) {
        nlohmann::json out = nlohmann::json::array();
        for (auto &value : j)
            out.push_back(strip_volatile(value));
        return out;
    }
    return j;
}

bool artifacts_equal_normalized(const std::filesystem::path &a, const std::filesystem::path &b)
{
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb)
        return false;
    std::ostringstream sa, sb;
    sa << fa.rdbuf();
    sb << fb.rdbuf();
    if (sa.str() == sb.str())
        return true;
    // fall back to the normalized comparison for measurement-bearing files
    nlohmann::json ja = strip_volatile(nlohmann::json::parse(sa.str(), nullptr, false));
    nlohmann::json jb = strip_volatile(nlohmann::json::parse(sb.str(), nullptr, false));
    if (ja.is_discarded() || jb.is_discarded())
        return false;
    return ja == jb;
}

} // namespace ovdbg
