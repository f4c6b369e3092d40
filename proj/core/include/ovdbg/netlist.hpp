#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ovdbg {

enum class BlockKind : uint8_t { Lut, Ff, Input, Output };

const char *block_kind_name(BlockKind k);

constexpr int kNoNet = -1;

// LUT, FF and INPUT blocks are named by the signal they drive; OUTPUT blocks
// are named "out:<signal>" and only consume.
struct Block
{
    std::string name;
    BlockKind kind = BlockKind::Lut;
    std::vector<int> inputs; // net ids, in pin order
    int output = kNoNet;
    std::vector<std::string> cubes; // LUT truth table rows, "<pattern> <bit>"
};

struct NetSink
{
    int block = -1;
    int pin = -1;
    bool operator==(const NetSink &) const = default;
};

struct Net
{
    std::string name;
    int driver = -1; // block id
    std::vector<NetSink> sinks;
};

struct Netlist
{
    std::string name;
    std::vector<Block> blocks;
    std::vector<Net> nets;

    int find_block(std::string_view name) const; // -1 when absent
    int find_net(std::string_view name) const;
    int count(BlockKind k) const;

    // Block ids whose output is observable: every LUT, FF and INPUT.
    std::vector<int> observable_blocks() const;
};

// Order-insensitive comparison on names, kinds, connectivity and truth tables.
bool structurally_equal(const Netlist &a, const Netlist &b);

class BlifError : public std::runtime_error
{
  public:
    BlifError(int line, const std::string &msg);
    int line() const { return line_; }

  private:
    int line_;
};

// BLIF subset: .model/.inputs/.outputs/.names/.latch/.end. Throws BlifError
// with the offending line on syntax errors, and with the offending net named
// on multiple drivers, undriven nets and combinational loops.
Netlist parse_netlist(std::string_view text);

std::string emit_netlist(const Netlist &n);

// A trigger netlist is an ordinary netlist whose primary inputs name user
// signals to tap and which drives exactly one output (the fire signal).
struct TriggerNetlist
{
    Netlist netlist;
    std::vector<std::string> taps; // user signal per primary input
    std::string fire_signal;

    int le_count() const
    {
        return netlist.count(BlockKind::Lut) + netlist.count(BlockKind::Ff);
    }
};

// Validates the single-output shape. Throws BlifError when violated.
TriggerNetlist make_trigger(Netlist n);

} // namespace ovdbg
