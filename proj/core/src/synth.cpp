#include "ovdbg/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "ovdbg/rng.hpp"

namespace ovdbg {

namespace {

std::string random_cube(Rng &rng, int k)
{
    if (k == 0)
        return "1";
    std::string pattern(k, '0');
    for (char &c : pattern)
        c = rng.next_bool() ? '1' : '0';
    return pattern + " 1";
}

// Union-find over block ids.
struct Dsu
{
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) { return parent[a] == a ? a : parent[a] = find(parent[a]); }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

} // namespace

Netlist gen_synthetic(uint64_t seed, int n_luts, double rent_p, int max_k)
{
    if (n_luts < 1)
        throw std::invalid_argument("gen_synthetic: n_luts must be >= 1");
    if (!(rent_p > 0.0) || !(rent_p < 1.0))
        throw std::invalid_argument("gen_synthetic: rent_p must be in (0, 1)");
    if (max_k < 2)
        throw std::invalid_argument("gen_synthetic: max_k must be >= 2");

    Rng rng(seed);
    Netlist n;
    n.name = "synth_s" + std::to_string(seed) + "_l" + std::to_string(n_luts);

    auto new_net = [&](const std::string &name) {
        n.nets.push_back(Net{name, -1, {}});
        return static_cast<int>(n.nets.size() - 1);
    };
    auto add_block = [&](Block b) {
        n.blocks.push_back(std::move(b));
        return static_cast<int>(n.blocks.size() - 1);
    };
    auto drive = [&](int net, int blk) { n.nets[net].driver = blk; };
    auto sink = [&](int net, int blk, int pin) { n.nets[net].sinks.push_back({blk, pin}); };

    const int n_pi = std::max(2, static_cast<int>(std::lround(0.7 * std::pow(n_luts, rent_p))));
    const int n_ff = static_cast<int>(std::lround(0.25 * n_luts));

    std::vector<int> producers; // net ids available as inputs, in creation order
    for (int i = 0; i < n_pi; ++i) {
        int net = new_net("pi" + std::to_string(i));
        int blk = add_block(Block{n.nets[net].name, BlockKind::Input, {}, net, {}});
        drive(net, blk);
        producers.push_back(net);
    }

    // Interleave FFs among the LUTs at deterministic pseudo-random positions.
    const int n_logic = n_luts + n_ff;
    std::vector<uint8_t> is_ff(n_logic, 0);
    {
        std::vector<int> order(n_logic);
        std::iota(order.begin(), order.end(), 0);
        rng.shuffle(order);
        for (int i = 0; i < n_ff; ++i)
            is_ff[order[i]] = 1;
    }

    auto pick_producer = [&]() {
        // bias toward recent producers for depth and locality
        if (producers.size() > 4 && rng.next_bool(0.75)) {
            size_t window = std::min<size_t>(24, producers.size());
            return producers[producers.size() - 1 - rng.next_below(window)];
        }
        return producers[rng.next_below(producers.size())];
    };

    int lut_no = 0, ff_no = 0;
    for (int i = 0; i < n_logic; ++i) {
        if (is_ff[i]) {
            int in = pick_producer();
            int net = new_net("ff" + std::to_string(ff_no++));
            int blk = add_block(Block{n.nets[net].name, BlockKind::Ff, {in}, net, {}});
            sink(in, blk, 0);
            drive(net, blk);
            producers.push_back(net);
        } else {
            int k = rng.next_int(2, max_k);
            std::vector<int> ins;
            for (int tries = 0; static_cast<int>(ins.size()) < k && tries < 8 * k; ++tries) {
                int cand = pick_producer();
                if (std::find(ins.begin(), ins.end(), cand) == ins.end())
                    ins.push_back(cand);
            }
            int net = new_net("lut" + std::to_string(lut_no++));
            Block b{n.nets[net].name, BlockKind::Lut, ins, net, {}};
            b.cubes.push_back(random_cube(rng, static_cast<int>(ins.size())));
            int blk = add_block(std::move(b));
            for (size_t pin = 0; pin < ins.size(); ++pin)
                sink(ins[pin], blk, static_cast<int>(pin));
            drive(net, blk);
            producers.push_back(net);
        }
    }

    // Force every primary input into some LUT: replace an input whose net
    // keeps at least one other consumer.
    for (int pi = 0; pi < n_pi; ++pi) {
        int net = producers[pi];
        if (!n.nets[net].sinks.empty())
            continue;
        bool placed = false;
        for (int tries = 0; tries < 64 && !placed; ++tries) {
            int blk = n_pi + static_cast<int>(rng.next_below(n_logic));
            Block &b = n.blocks[blk];
            if (b.kind != BlockKind::Lut || b.inputs.empty())
                continue;
            int pin = static_cast<int>(rng.next_below(b.inputs.size()));
            int old = b.inputs[pin];
            if (n.nets[old].sinks.size() < 2 || old == net)
                continue;
            auto &sinks = n.nets[old].sinks;
            sinks.erase(std::find(sinks.begin(), sinks.end(), NetSink{blk, pin}));
            b.inputs[pin] = net;
            sink(net, blk, pin);
            placed = true;
        }
        if (!placed) {
            // grow some LUT below max_k by one pin instead
            for (int blk = n_pi; blk < n_pi + n_logic && !placed; ++blk) {
                Block &b = n.blocks[blk];
                if (b.kind != BlockKind::Lut || static_cast<int>(b.inputs.size()) >= max_k)
                    continue;
                if (std::find(b.inputs.begin(), b.inputs.end(), net) != b.inputs.end())
                    continue;
                int pin = static_cast<int>(b.inputs.size());
                b.inputs.push_back(net);
                for (std::string &cube : b.cubes)
                    cube.insert(cube.find(' '), 1, '-');
                sink(net, blk, pin);
                placed = true;
            }
        }
    }

    // Merge disconnected logic clusters by rewiring one input of the later
    // cluster's earliest block to an earlier producer (keeps the DAG order).
    {
        Dsu dsu(static_cast<int>(n.blocks.size()));
        for (const Net &net : n.nets)
            for (const NetSink &s : net.sinks)
                dsu.unite(net.driver, s.block);
        std::vector<int> earliest(n.blocks.size(), -1);
        for (int b = 0; b < static_cast<int>(n.blocks.size()); ++b) {
            int root = dsu.find(b);
            if (earliest[root] < 0)
                earliest[root] = b;
        }
        std::vector<int> roots;
        for (int b = 0; b < static_cast<int>(n.blocks.size()); ++b)
            if (dsu.find(b) == b)
                roots.push_back(b);
        std::sort(roots.begin(), roots.end(),
                  [&](int a, int b) { return earliest[a] < earliest[b]; });
        for (size_t r = 1; r < roots.size(); ++r) {
            // earliest LUT/FF of this cluster
            int rewire = -1;
            for (int b = 0; b < static_cast<int>(n.blocks.size()); ++b) {
                if (dsu.find(b) != dsu.find(roots[r]))
                    continue;
                if (n.blocks[b].kind == BlockKind::Lut || n.blocks[b].kind == BlockKind::Ff) {
                    rewire = b;
                    break;
                }
            }
            if (rewire < 0)
                continue; // pad-only cluster, handled by dangling outputs
            Block &b = n.blocks[rewire];
            // deterministic target: latest producer net driven by an earlier
            // block of an already-merged cluster
            int target = -1;
            for (int p = static_cast<int>(producers.size()) - 1; p >= 0; --p) {
                int net = producers[p];
                int drv = n.nets[net].driver;
                if (drv < rewire && dsu.find(drv) == dsu.find(roots[0])) {
                    target = net;
                    break;
                }
            }
            if (target < 0)
                continue;
            int pin = 0;
            int old = b.inputs[pin];
            auto &sinks = n.nets[old].sinks;
            sinks.erase(std::find(sinks.begin(), sinks.end(), NetSink{rewire, pin}));
            b.inputs[pin] = target;
            sink(target, rewire, pin);
            dsu.unite(rewire, n.nets[target].driver);
        }
    }

    // Dangling producers become primary outputs.
    int outs = 0;
    for (int net = 0; net < static_cast<int>(n.nets.size()); ++net) {
        if (!n.nets[net].sinks.empty())
            continue;
        int blk = add_block(Block{"out:" + n.nets[net].name, BlockKind::Output, {net}, kNoNet, {}});
        sink(net, blk, 0);
        ++outs;
    }
    if (outs == 0) {
        int net = producers.back();
        int blk = add_block(Block{"out:" + n.nets[net].name, BlockKind::Output, {net}, kNoNet, {}});
        sink(net, blk, 0);
    }
    return n;
}

TriggerNetlist gen_trigger(uint64_t seed, int n_les, const std::vector<std::string> &signals,
                           int max_k)
{
    if (n_les < 1)
        throw std::invalid_argument("gen_trigger: n_les must be >= 1");
    if (signals.empty())
        throw std::invalid_argument("gen_trigger: no signals to tap");

    Rng rng(seed);
    Netlist n;
    n.name = "trigger_s" + std::to_string(seed) + "_e" + std::to_string(n_les);

    int n_taps = std::clamp(2 + n_les / 3, 1, std::min<int>(8, static_cast<int>(signals.size())));
    std::vector<int> pick(signals.size());
    std::iota(pick.begin(), pick.end(), 0);
    rng.shuffle(pick);

    auto new_net = [&](const std::string &name) {
        n.nets.push_back(Net{name, -1, {}});
        return static_cast<int>(n.nets.size() - 1);
    };

    std::vector<int> pool;
    for (int i = 0; i < n_taps; ++i) {
        int net = new_net(signals[pick[i]]);
        n.blocks.push_back(Block{signals[pick[i]], BlockKind::Input, {}, net, {}});
        n.nets[net].driver = static_cast<int>(n.blocks.size() - 1);
        pool.push_back(net);
    }

    // Reduction chain: each LE consumes the previous stage plus fresh taps.
    int last = -1;
    for (int i = 0; i < n_les; ++i) {
        bool is_ff = (i % 5 == 4) && i + 1 < n_les;
        std::string name = (i + 1 == n_les) ? "fire" : "t" + std::to_string(i);
        int net = new_net(name);
        if (is_ff) {
            int in = last >= 0 ? last : pool[rng.next_below(pool.size())];
            n.blocks.push_back(Block{name, BlockKind::Ff, {in}, net, {}});
            int blk = static_cast<int>(n.blocks.size() - 1);
            n.nets[in].sinks.push_back({blk, 0});
            n.nets[net].driver = blk;
        } else {
            std::vector<int> ins;
            if (last >= 0)
                ins.push_back(last);
            int k = rng.next_int(2, max_k);
            for (int tries = 0; static_cast<int>(ins.size()) < k && tries < 16; ++tries) {
                int cand = pool[rng.next_below(pool.size())];
                if (std::find(ins.begin(), ins.end(), cand) == ins.end())
                    ins.push_back(cand);
            }
            Block b{name, BlockKind::Lut, ins, net, {}};
            b.cubes.push_back(std::string(ins.size(), '1') + " 1"); // AND
            n.blocks.push_back(std::move(b));
            int blk = static_cast<int>(n.blocks.size() - 1);
            for (size_t pin = 0; pin < ins.size(); ++pin)
                n.nets[ins[pin]].sinks.push_back({blk, static_cast<int>(pin)});
            n.nets[net].driver = blk;
        }
        pool.push_back(net);
        last = net;
    }

    n.blocks.push_back(Block{"out:fire", BlockKind::Output, {last}, kNoNet, {}});
    n.nets[last].sinks.push_back({static_cast<int>(n.blocks.size() - 1), 0});
    return make_trigger(std::move(n));
}

} // namespace ovdbg
