#include "ovdbg/netlist.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_map>

namespace ovdbg {

const char *block_kind_name(BlockKind k)
{
    switch (k) {
    case BlockKind::Lut: return "LUT";
    case BlockKind::Ff: return "FF";
    case BlockKind::Input: return "INPUT";
    case BlockKind::Output: return "OUTPUT";
    }
    return "?";
}

int Netlist::find_block(std::string_view name) const
{
    for (size_t i = 0; i < blocks.size(); ++i)
        if (blocks[i].name == name)
            return static_cast<int>(i);
    return -1;
}

int Netlist::find_net(std::string_view name) const
{
    for (size_t i = 0; i < nets.size(); ++i)
        if (nets[i].name == name)
            return static_cast<int>(i);
    return -1;
}

int Netlist::count(BlockKind k) const
{
    int n = 0;
    for (const Block &b : blocks)
        if (b.kind == k)
            ++n;
    return n;
}

std::vector<int> Netlist::observable_blocks() const
{
    std::vector<int> out;
    for (size_t i = 0; i < blocks.size(); ++i)
        if (blocks[i].kind != BlockKind::Output)
            out.push_back(static_cast<int>(i));
    return out;
}

bool structurally_equal(const Netlist &a, const Netlist &b)
{
    if (a.name != b.name || a.blocks.size() != b.blocks.size() || a.nets.size() != b.nets.size())
        return false;
    auto canon = [](const Netlist &n) {
        std::map<std::string, std::tuple<BlockKind, std::vector<std::string>, std::string,
                                         std::vector<std::string>>>
            m;
        for (const Block &blk : n.blocks) {
            std::vector<std::string> ins;
            for (int net : blk.inputs)
                ins.push_back(n.nets[net].name);
            std::string out = blk.output == kNoNet ? "" : n.nets[blk.output].name;
            m[blk.name] = {blk.kind, std::move(ins), std::move(out), blk.cubes};
        }
        return m;
    };
    return canon(a) == canon(b);
}

BlifError::BlifError(int line, const std::string &msg)
    : std::runtime_error("line " + std::to_string(line) + ": " + msg), line_(line)
{
}

namespace {

struct Line
{
    int number;
    std::vector<std::string> tokens;
};

std::vector<Line> tokenize(std::string_view text)
{
    std::vector<Line> lines;
    int number = 0;
    std::string pending;
    int pending_start = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string raw(text.substr(pos, eol - pos));
        pos = eol + 1;
        ++number;
        if (auto hash = raw.find('#'); hash != std::string::npos)
            raw.erase(hash);
        bool cont = false;
        while (!raw.empty() && (raw.back() == '\r' || raw.back() == ' ' || raw.back() == '\t'))
            raw.pop_back();
        if (!raw.empty() && raw.back() == '\\') {
            raw.pop_back();
            cont = true;
        }
        if (pending.empty())
            pending_start = number;
        pending += raw;
        pending += ' ';
        if (cont && pos <= text.size())
            continue;
        std::istringstream is(pending);
        Line line{pending_start, {}};
        std::string tok;
        while (is >> tok)
            line.tokens.push_back(tok);
        if (!line.tokens.empty())
            lines.push_back(std::move(line));
        pending.clear();
        if (pos > text.size())
            break;
    }
    return lines;
}

class Builder
{
  public:
    Netlist finish(std::string_view text)
    {
        for (const Line &line : tokenize(text))
            handle(line);
        if (!saw_end_ && saw_model_)
            throw BlifError(last_line_, ".end missing");
        check_drivers();
        check_loops();
        return std::move(n_);
    }

  private:
    Netlist n_;
    std::unordered_map<std::string, int> net_ids_;
    bool saw_model_ = false;
    bool saw_end_ = false;
    int last_line_ = 1;

    int net_id(const std::string &name)
    {
        auto [it, inserted] = net_ids_.try_emplace(name, static_cast<int>(n_.nets.size()));
        if (inserted)
            n_.nets.push_back(Net{name, -1, {}});
        return it->second;
    }

    void set_driver(int net, int block, int line)
    {
        if (n_.nets[net].driver >= 0)
            throw BlifError(line, "net '" + n_.nets[net].name + "' has multiple drivers");
        n_.nets[net].driver = block;
    }

    void add_sink(int net, int block, int pin)
    {
        n_.nets[net].sinks.push_back(NetSink{block, pin});
    }

    void handle(const Line &line)
    {
        last_line_ = line.number;
        const auto &t = line.tokens;
        const std::string &head = t[0];
        if (head[0] != '.') {
            handle_cube(line);
            return;
        }
        if (saw_end_)
            throw BlifError(line.number, "content after .end");
        if (head == ".model") {
            if (saw_model_)
                throw BlifError(line.number, "only one .model per file is supported");
            saw_model_ = true;
            n_.name = t.size() > 1 ? t[1] : "top";
        } else if (head == ".inputs") {
            require_model(line);
            for (size_t i = 1; i < t.size(); ++i) {
                int net = net_id(t[i]);
                int blk = add_block(Block{t[i], BlockKind::Input, {}, net, {}}, line);
                set_driver(net, blk, line.number);
            }
        } else if (head == ".outputs") {
            require_model(line);
            for (size_t i = 1; i < t.size(); ++i) {
                int net = net_id(t[i]);
                int blk = add_block(Block{"out:" + t[i], BlockKind::Output, {net}, kNoNet, {}},
                                    line);
                add_sink(net, blk, 0);
            }
        } else if (head == ".names") {
            require_model(line);
            if (t.size() < 2)
                throw BlifError(line.number, ".names needs at least an output");
            std::vector<int> ins;
            for (size_t i = 1; i + 1 < t.size(); ++i)
                ins.push_back(net_id(t[i]));
            int out = net_id(t.back());
            if (n_.nets[out].driver >= 0)
                throw BlifError(line.number,
                                "net '" + t.back() + "' has multiple drivers");
            int blk = add_block(Block{t.back(), BlockKind::Lut, ins, out, {}}, line);
            for (size_t pin = 0; pin < ins.size(); ++pin)
                add_sink(ins[pin], blk, static_cast<int>(pin));
            set_driver(out, blk, line.number);
            cur_lut_ = blk;
        } else if (head == ".latch") {
            require_model(line);
            if (t.size() < 3)
                throw BlifError(line.number, ".latch needs input and output");
            int in = net_id(t[1]);
            int out = net_id(t[2]);
            if (n_.nets[out].driver >= 0)
                throw BlifError(line.number, "net '" + t[2] + "' has multiple drivers");
            int blk = add_block(Block{t[2], BlockKind::Ff, {in}, out, {}}, line);
            add_sink(in, blk, 0);
            set_driver(out, blk, line.number);
            cur_lut_ = -1;
        } else if (head == ".end") {
            require_model(line);
            saw_end_ = true;
            cur_lut_ = -1;
        } else {
            throw BlifError(line.number, "unsupported directive '" + head + "'");
        }
        if (head != ".names")
            cur_lut_ = -1;
    }

    void require_model(const Line &line)
    {
        if (!saw_model_)
            throw BlifError(line.number, ".model must come first");
    }

    int add_block(Block b, const Line &line)
    {
        for (const Block &existing : n_.blocks)
            if (existing.name == b.name)
                throw BlifError(line.number, "block '" + b.name + "' defined twice");
        n_.blocks.push_back(std::move(b));
        return static_cast<int>(n_.blocks.size() - 1);
    }

    void handle_cube(const Line &line)
    {
        if (cur_lut_ < 0)
            throw BlifError(line.number, "truth table row outside .names");
        Block &lut = n_.blocks[cur_lut_];
        const auto &t = line.tokens;
        std::string pattern, bit;
        if (lut.inputs.empty()) {
            if (t.size() != 1)
                throw BlifError(line.number, "constant .names row must be a single bit");
            bit = t[0];
        } else {
            if (t.size() != 2)
                throw BlifError(line.number, "truth table row must be '<pattern> <bit>'");
            pattern = t[0];
            bit = t[1];
            if (pattern.size() != lut.inputs.size())
                throw BlifError(line.number, "pattern width does not match .names inputs");
            for (char c : pattern)
                if (c != '0' && c != '1' && c != '-')
                    throw BlifError(line.number, "pattern characters must be 0, 1 or -");
        }
        if (bit != "0" && bit != "1")
            throw BlifError(line.number, "output bit must be 0 or 1");
        lut.cubes.push_back(pattern.empty() ? bit : pattern + " " + bit);
    }

    void check_drivers()
    {
        for (const Net &net : n_.nets)
            if (net.driver < 0)
                throw BlifError(last_line_, "net '" + net.name + "' has no driver");
    }

    // Every cycle must pass through a latch: Kahn over the LUT-only subgraph.
    void check_loops()
    {
        std::vector<int> indeg(n_.blocks.size(), 0);
        for (const Block &b : n_.blocks) {
            if (b.kind != BlockKind::Lut)
                continue;
            for (int in : b.inputs)
                if (n_.blocks[n_.nets[in].driver].kind == BlockKind::Lut)
                    ++indeg[&b - n_.blocks.data()];
        }
        std::vector<int> queue;
        for (size_t i = 0; i < n_.blocks.size(); ++i)
            if (n_.blocks[i].kind == BlockKind::Lut && indeg[i] == 0)
                queue.push_back(static_cast<int>(i));
        size_t done = 0;
        size_t total = static_cast<size_t>(n_.count(BlockKind::Lut));
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            int blk = queue[qi];
            ++done;
            int out = n_.blocks[blk].output;
            for (const NetSink &s : n_.nets[out].sinks)
                if (n_.blocks[s.block].kind == BlockKind::Lut && --indeg[s.block] == 0)
                    queue.push_back(s.block);
        }
        if (done == total)
            return;
        for (size_t i = 0; i < n_.blocks.size(); ++i) {
            if (n_.blocks[i].kind == BlockKind::Lut && indeg[i] > 0) {
                throw BlifError(last_line_, "combinational loop through net '" +
                                                n_.nets[n_.blocks[i].output].name + "'");
            }
        }
    }

    int cur_lut_ = -1;
};

} // namespace

Netlist parse_netlist(std::string_view text)
{
    Builder b;
    return b.finish(text);
}

std::string emit_netlist(const Netlist &n)
{
    std::ostringstream os;
    os << ".model " << n.name << "\n";
    os << ".inputs";
    for (const Block &b : n.blocks)
        if (b.kind == BlockKind::Input)
            os << " " << b.name;
    os << "\n.outputs";
    for (const Block &b : n.blocks)
        if (b.kind == BlockKind::Output)
            os << " " << n.nets[b.inputs[0]].name;
    os << "\n";
    for (const Block &b : n.blocks)
        if (b.kind == BlockKind::Ff)
            os << ".latch " << n.nets[b.inputs[0]].name << " " << n.nets[b.output].name
               << " re clk 0\n";
    for (const Block &b : n.blocks) {
        if (b.kind != BlockKind::Lut)
            continue;
        os << ".names";
        for (int in : b.inputs)
            os << " " << n.nets[in].name;
        os << " " << n.nets[b.output].name << "\n";
        for (const std::string &cube : b.cubes)
            os << cube << "\n";
    }
    os << ".end\n";
    return os.str();
}

TriggerNetlist make_trigger(Netlist n)
{
    TriggerNetlist t;
    for (const Block &b : n.blocks) {
        if (b.kind == BlockKind::Input)
            t.taps.push_back(b.name);
        else if (b.kind == BlockKind::Output)
            t.fire_signal = n.nets[b.inputs[0]].name;
    }
    if (n.count(BlockKind::Output) != 1)
        throw BlifError(1, "trigger netlist must have exactly one output");
    if (t.taps.empty())
        throw BlifError(1, "trigger netlist must tap at least one user signal");
    t.netlist = std::move(n);
    return t;
}

} // namespace ovdbg
