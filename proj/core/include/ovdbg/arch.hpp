#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ovdbg {

// Parameterized island-style architecture. CLB columns are interleaved with
// trace-buffer columns: after every tb_column_period-th CLB column one TB
// column is inserted (tb_column_period = 0 disables trace buffers). An I/O
// ring surrounds the grid; each I/O tile carries bles_per_clb pads.
//
// The switch blocks are disjoint, so each track index forms an isolated
// routing plane. Pin-to-pin reachability needs a shared plane, which is
// guaranteed whenever fc_out + fc_in > 1 (and fc_out + tb_fc > 1 for trace
// taps); the defaults respect that.
struct ArchSpec
{
    int grid_width = 4;       // CLB columns
    int grid_height = 4;      // CLB rows
    int lut_size_k = 4;       // inputs per LUT
    int bles_per_clb = 4;     // logic elements per cluster
    int clb_inputs = 16;      // input pins per CLB
    int channel_width_w = 8;  // tracks per channel, even
    double fc_in = 0.6;       // fraction of tracks per input pin
    double fc_out = 0.55;     // fraction of tracks per output pin
    int tb_column_period = 4; // one TB column after every Nth CLB column, 0 = none
    int tb_inputs_per_block = 8;
    double tb_fc = 0.55;      // fraction of adjacent tracks per trace input

    bool operator==(const ArchSpec &) const = default;
};

struct ValidationIssue
{
    std::string field;
    std::string message;
};

class ValidationError : public std::runtime_error
{
  public:
    explicit ValidationError(std::vector<ValidationIssue> issues);
    const std::vector<ValidationIssue> &issues() const { return issues_; }

  private:
    static std::string format(const std::vector<ValidationIssue> &issues);
    std::vector<ValidationIssue> issues_;
};

// Empty result means the spec is valid.
std::vector<ValidationIssue> validate_arch(const ArchSpec &arch);
// Throws ValidationError when validate_arch() is non-empty.
void require_valid(const ArchSpec &arch);

nlohmann::json arch_to_json(const ArchSpec &arch);
ArchSpec arch_from_json(const nlohmann::json &j);

enum class TileKind : uint8_t { Empty, Clb, TraceBuffer, Io };

// Physical grid derived from an ArchSpec: CLB columns plus inserted TB
// columns, with the I/O ring at the border. Tile coordinates are
// x in [0, width+1], y in [0, height+1]; (0,0)-style corners are empty.
struct DeviceGrid
{
    int width = 0;  // fabric columns (CLB + TB), x in [1, width]
    int height = 0; // fabric rows, y in [1, height]
    std::vector<TileKind> column_kind; // size width+1, index by x (0 unused)

    static DeviceGrid from_arch(const ArchSpec &arch);

    TileKind tile_at(int x, int y) const;
    bool is_fabric(int x, int y) const { return x >= 1 && x <= width && y >= 1 && y <= height; }
    int clb_count() const;
    int tb_block_count() const;
    int io_tile_count() const { return 2 * width + 2 * height; }
};

} // namespace ovdbg
