#include "ovdbg/arch.hpp"

#include <sstream>

namespace ovdbg {

ValidationError::ValidationError(std::vector<ValidationIssue> issues)
    : std::runtime_error(format(issues)), issues_(std::move(issues))
{
}

std::string ValidationError::format(const std::vector<ValidationIssue> &issues)
{
    std::ostringstream os;
    os << "invalid architecture:";
    for (const auto &i : issues)
        os << " [" << i.field << "] " << i.message << ";";
    return os.str();
}

std::vector<ValidationIssue> validate_arch(const ArchSpec &a)
{
    std::vector<ValidationIssue> out;
    auto bad = [&](const char *field, const std::string &msg) { out.push_back({field, msg}); };

    if (a.grid_width < 1)
        bad("grid_width", "must be >= 1");
    if (a.grid_height < 1)
        bad("grid_height", "must be >= 1");
    if (a.lut_size_k < 2)
        bad("lut_size_k", "must be >= 2");
    if (a.bles_per_clb < 1)
        bad("bles_per_clb", "must be >= 1");
    if (a.clb_inputs < a.lut_size_k)
        bad("clb_inputs", "must be >= lut_size_k");
    if (a.channel_width_w < 2)
        bad("channel_width_w", "must be >= 2");
    else if (a.channel_width_w % 2 != 0)
        bad("channel_width_w", "must be even");
    auto check_fc = [&](const char *field, double v) {
        if (!(v > 0.0) || v > 1.0)
            bad(field, "must be in (0, 1]");
    };
    check_fc("fc_in", a.fc_in);
    check_fc("fc_out", a.fc_out);
    check_fc("tb_fc", a.tb_fc);
    if (a.tb_column_period != 0 && a.tb_column_period < 2)
        bad("tb_column_period", "must be 0 (disabled) or >= 2");
    if (a.tb_column_period != 0 && a.tb_inputs_per_block < 1)
        bad("tb_inputs_per_block", "must be >= 1 when TB columns exist");
    return out;
}

void require_valid(const ArchSpec &arch)
{
    auto issues = validate_arch(arch);
    if (!issues.empty())
        throw ValidationError(std::move(issues));
}

nlohmann::json arch_to_json(const ArchSpec &a)
{
    return nlohmann::json{
        {"grid_width", a.grid_width},
        {"grid_height", a.grid_height},
        {"lut_size_k", a.lut_size_k},
        {"bles_per_clb", a.bles_per_clb},
        {"clb_inputs", a.clb_inputs},
        {"channel_width_w", a.channel_width_w},
        {"fc_in", a.fc_in},
        {"fc_out", a.fc_out},
        {"tb_column_period", a.tb_column_period},
        {"tb_inputs_per_block", a.tb_inputs_per_block},
        {"tb_fc", a.tb_fc},
    };
}

ArchSpec arch_from_json(const nlohmann::json &j)
{
    ArchSpec a;
    a.grid_width = j.at("grid_width").get<int>();
    a.grid_height = j.at("grid_height").get<int>();
    a.lut_size_k = j.at("lut_size_k").get<int>();
    a.bles_per_clb = j.at("bles_per_clb").get<int>();
    a.clb_inputs = j.at("clb_inputs").get<int>();
    a.channel_width_w = j.at("channel_width_w").get<int>();
    a.fc_in = j.at("fc_in").get<double>();
    a.fc_out = j.at("fc_out").get<double>();
    a.tb_column_period = j.at("tb_column_period").get<int>();
    a.tb_inputs_per_block = j.at("tb_inputs_per_block").get<int>();
    a.tb_fc = j.at("tb_fc").get<double>();
    return a;
}

DeviceGrid DeviceGrid::from_arch(const ArchSpec &arch)
{
    DeviceGrid g;
    g.height = arch.grid_height;
    g.column_kind.push_back(TileKind::Empty); // x = 0 is the I/O ring
    for (int c = 1; c <= arch.grid_width; ++c) {
        g.column_kind.push_back(TileKind::Clb);
        if (arch.tb_column_period > 0 && c % arch.tb_column_period == 0)
            g.column_kind.push_back(TileKind::TraceBuffer);
    }
    g.width = static_cast<int>(g.column_kind.size()) - 1;
    return g;
}

TileKind DeviceGrid::tile_at(int x, int y) const
{
    bool x_in = x >= 1 && x <= width;
    bool y_in = y >= 1 && y <= height;
    if (x_in && y_in)
        return column_kind[x];
    if (x_in != y_in && (x == 0 || x == width + 1 || y == 0 || y == height + 1)) {
        // border but not a corner
        if ((x_in && (y == 0 || y == height + 1)) || (y_in && (x == 0 || x == width + 1)))
            return TileKind::Io;
    }
    return TileKind::Empty;
}

int DeviceGrid::clb_count() const
{
    int cols = 0;
    for (int x = 1; x <= width; ++x)
        if (column_kind[x] == TileKind::Clb)
            ++cols;
    return cols * height;
}

int DeviceGrid::tb_block_count() const
{
    int cols = 0;
    for (int x = 1; x <= width; ++x)
        if (column_kind[x] == TileKind::TraceBuffer)
            ++cols;
    return cols * height;
}

} // namespace ovdbg
