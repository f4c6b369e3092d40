#include "ovdbg/place.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>
#include <unordered_map>

#include "ovdbg/rng.hpp"

namespace ovdbg {

namespace {

SlotKind slot_kind_for(BlockKind k)
{
    return (k == BlockKind::Lut || k == BlockKind::Ff) ? SlotKind::Ble : SlotKind::Pad;
}

struct SlotPool
{
    std::vector<SlotRef> slots[2]; // by SlotKind

    static SlotPool build(const ArchSpec &arch, const DeviceGrid &grid)
    {
        SlotPool pool;
        for (int y = 0; y <= grid.height + 1; ++y) {
            for (int x = 0; x <= grid.width + 1; ++x) {
                TileKind t = grid.tile_at(x, y);
                if (t == TileKind::Clb)
                    for (int s = 0; s < arch.bles_per_clb; ++s)
                        pool.slots[0].push_back({static_cast<int16_t>(x), static_cast<int16_t>(y),
                                                 static_cast<int16_t>(s), SlotKind::Ble});
                else if (t == TileKind::Io)
                    for (int s = 0; s < arch.bles_per_clb; ++s)
                        pool.slots[1].push_back({static_cast<int16_t>(x), static_cast<int16_t>(y),
                                                 static_cast<int16_t>(s), SlotKind::Pad});
            }
        }
        return pool;
    }
};

struct NetBBox
{
    int xmin, xmax, ymin, ymax;
    double cost() const { return (xmax - xmin) + (ymax - ymin); }
};

class Annealer
{
  public:
    Annealer(const Netlist &nl, const ArchSpec &arch, uint64_t seed, const PlaceOptions &opts)
        : nl_(nl), opts_(opts), rng_(seed), grid_(DeviceGrid::from_arch(arch)),
          pool_(SlotPool::build(arch, grid_))
    {
        const int n_logic = nl.count(BlockKind::Lut) + nl.count(BlockKind::Ff);
        const int n_io = nl.count(BlockKind::Input) + nl.count(BlockKind::Output);
        if (n_logic > static_cast<int>(pool_.slots[0].size()))
            throw CapacityError("netlist needs " + std::to_string(n_logic) + " BLE slots, grid has " +
                                std::to_string(pool_.slots[0].size()));
        if (n_io > static_cast<int>(pool_.slots[1].size()))
            throw CapacityError("netlist needs " + std::to_string(n_io) + " pads, grid has " +
                                std::to_string(pool_.slots[1].size()));
        for (const Block &b : nl.blocks)
            if (b.kind == BlockKind::Lut && static_cast<int>(b.inputs.size()) > arch.lut_size_k)
                throw CapacityError("LUT '" + b.name + "' fan-in exceeds lut_size_k");

        blocks_of_net_.resize(nl.nets.size());
        for (size_t net = 0; net < nl.nets.size(); ++net) {
            auto &v = blocks_of_net_[net];
            v.push_back(nl.nets[net].driver);
            for (const NetSink &s : nl.nets[net].sinks)
                v.push_back(s.block);
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        }
        nets_of_block_.resize(nl.blocks.size());
        for (size_t net = 0; net < nl.nets.size(); ++net)
            for (int b : blocks_of_net_[net])
                nets_of_block_[b].push_back(static_cast<int>(net));
    }

    Placement run()
    {
        init_random();
        double cost = full_cost();
        best_ = place_;
        best_cost_ = cost;

        double t = initial_temperature(cost);
        double rlim = std::max(grid_.width, grid_.height);
        const int n_blocks = static_cast<int>(nl_.blocks.size());
        const int moves_per_t =
            std::max(16, static_cast<int>(opts_.inner_num * std::pow(n_blocks, 4.0 / 3.0)));

        for (int temp_no = 0; temp_no < opts_.max_temperatures; ++temp_no) {
            int accepted = 0;
            for (int m = 0; m < moves_per_t; ++m) {
                double delta = propose_and_maybe_apply(t, rlim, cost);
                if (!std::isnan(delta)) {
                    cost += delta;
                    ++accepted;
                    if (cost < best_cost_) {
                        best_cost_ = cost;
                        best_ = place_;
                    }
                }
            }
            double frac = static_cast<double>(accepted) / moves_per_t;
            rlim = std::clamp(rlim * (1.0 - opts_.target_accept + frac), 1.0,
                              static_cast<double>(std::max(grid_.width, grid_.height)));
            double alpha = frac > 0.96 ? 0.5 : frac > 0.8 ? 0.9 : frac > 0.15 ? 0.95 : 0.8;
            t *= alpha;
            if (t < opts_.exit_t_factor * (cost + 1.0) / std::max<size_t>(1, nl_.nets.size()))
                break;
        }
        return best_;
    }

  private:
    void init_random()
    {
        place_.block_slot.assign(nl_.blocks.size(), SlotRef{});
        std::vector<int> order[2];
        for (int kind = 0; kind < 2; ++kind) {
            order[kind].resize(pool_.slots[kind].size());
            for (size_t i = 0; i < order[kind].size(); ++i)
                order[kind][i] = static_cast<int>(i);
            rng_.shuffle(order[kind]);
        }
        int used[2] = {0, 0};
        for (size_t b = 0; b < nl_.blocks.size(); ++b) {
            int kind = slot_kind_for(nl_.blocks[b].kind) == SlotKind::Ble ? 0 : 1;
            place_.block_slot[b] = pool_.slots[kind][order[kind][used[kind]++]];
        }
        occupant_.clear();
        for (size_t b = 0; b < nl_.blocks.size(); ++b)
            occupant_[key(place_.block_slot[b])] = static_cast<int>(b);
    }

    static int64_t key(const SlotRef &s)
    {
        return (static_cast<int64_t>(s.x) << 32) | (static_cast<int64_t>(s.y) << 16) | s.slot |
               (s.kind == SlotKind::Pad ? (1LL << 48) : 0);
    }

    NetBBox net_bbox(int net) const
    {
        NetBBox bb{1 << 20, -(1 << 20), 1 << 20, -(1 << 20)};
        for (int b : blocks_of_net_[net]) {
            const SlotRef &s = place_.block_slot[b];
            bb.xmin = std::min(bb.xmin, static_cast<int>(s.x));
            bb.xmax = std::max(bb.xmax, static_cast<int>(s.x));
            bb.ymin = std::min(bb.ymin, static_cast<int>(s.y));
            bb.ymax = std::max(bb.ymax, static_cast<int>(s.y));
        }
        return bb;
    }

    double full_cost()
    {
        net_cost_.resize(nl_.nets.size());
        double total = 0;
        for (size_t net = 0; net < nl_.nets.size(); ++net) {
            net_cost_[net] = net_bbox(static_cast<int>(net)).cost();
            total += net_cost_[net];
        }
        return total;
    }

    double initial_temperature(double cost)
    {
        // 20 * stddev of move costs sampled from the initial placement
        const int samples = std::max<int>(32, static_cast<int>(nl_.blocks.size()));
        double sum = 0, sum2 = 0;
        int n = 0;
        for (int i = 0; i < samples; ++i) {
            double delta = propose_and_maybe_apply(-1.0, std::max(grid_.width, grid_.height),
                                                   cost, /*measure_only=*/true);
            if (std::isnan(delta))
                continue;
            sum += delta;
            sum2 += delta * delta;
            ++n;
        }
        if (n < 2)
            return 1.0;
        double var = (sum2 - sum * sum / n) / (n - 1);
        double sd = var > 0 ? std::sqrt(var) : 0.0;
        return sd > 0 ? 20.0 * sd : 1.0;
    }

    // Returns the applied cost delta, or NaN when the move was rejected.
    // With measure_only the move is evaluated and always rolled back; the
    // delta is still returned for temperature sampling.
    double propose_and_maybe_apply(double t, double rlim, double /*cost*/,
                                   bool measure_only = false)
    {
        int b = static_cast<int>(rng_.next_below(nl_.blocks.size()));
        int kind = slot_kind_for(nl_.blocks[b].kind) == SlotKind::Ble ? 0 : 1;
        const auto &slots = pool_.slots[kind];
        const SlotRef from = place_.block_slot[b];

        SlotRef to{};
        int r = std::max(1, static_cast<int>(rlim));
        for (int tries = 0; tries < 12; ++tries) {
            to = slots[rng_.next_below(slots.size())];
            if (std::abs(to.x - from.x) <= r && std::abs(to.y - from.y) <= r)
                break;
        }
        if (to == from)
            return nan_();

        auto occ = occupant_.find(key(to));
        int b2 = occ == occupant_.end() ? -1 : occ->second;

        // affected nets
        touched_.clear();
        for (int net : nets_of_block_[b])
            touched_.push_back(net);
        if (b2 >= 0)
            for (int net : nets_of_block_[b2])
                touched_.push_back(net);
        std::sort(touched_.begin(), touched_.end());
        touched_.erase(std::unique(touched_.begin(), touched_.end()), touched_.end());

        apply_move(b, b2, from, to);
        double delta = 0;
        for (int net : touched_)
            delta += net_bbox(net).cost() - net_cost_[net];

        bool accept = !measure_only &&
                      (delta <= 0 || (t > 0 && rng_.next_double() < std::exp(-delta / t)));
        if (!accept) {
            apply_move(b, b2, to, from); // undo
            return measure_only ? delta : nan_();
        }
        for (int net : touched_)
            net_cost_[net] = net_bbox(net).cost();
        return delta;
    }

    void apply_move(int b, int b2, const SlotRef &from, const SlotRef &to)
    {
        place_.block_slot[b] = to;
        occupant_.erase(key(from));
        if (b2 >= 0) {
            place_.block_slot[b2] = from;
            occupant_[key(from)] = b2;
        }
        occupant_[key(to)] = b;
    }

    static double nan_() { return std::numeric_limits<double>::quiet_NaN(); }

    const Netlist &nl_;
    PlaceOptions opts_;
    Rng rng_;
    DeviceGrid grid_;
    SlotPool pool_;
    Placement place_;
    Placement best_;
    double best_cost_ = 0;
    std::unordered_map<int64_t, int> occupant_;
    std::vector<std::vector<int>> blocks_of_net_;
    std::vector<std::vector<int>> nets_of_block_;
    std::vector<double> net_cost_;
    std::vector<int> touched_;
};

} // namespace

Placement place(const Netlist &netlist, const ArchSpec &arch, uint64_t seed,
                const PlaceOptions &opts)
{
    require_valid(arch);
    Annealer a(netlist, arch, seed, opts);
    return a.run();
}

double placement_cost(const Netlist &netlist, const Placement &p)
{
    double total = 0;
    for (const Net &net : netlist.nets) {
        int xmin = 1 << 20, xmax = -(1 << 20), ymin = 1 << 20, ymax = -(1 << 20);
        auto touch = [&](int blk) {
            const SlotRef &s = p.block_slot[blk];
            xmin = std::min(xmin, static_cast<int>(s.x));
            xmax = std::max(xmax, static_cast<int>(s.x));
            ymin = std::min(ymin, static_cast<int>(s.y));
            ymax = std::max(ymax, static_cast<int>(s.y));
        };
        touch(net.driver);
        for (const NetSink &s : net.sinks)
            touch(s.block);
        total += (xmax - xmin) + (ymax - ymin);
    }
    return total;
}

std::vector<std::string> verify_placement(const Netlist &netlist, const ArchSpec &arch,
                                          const Placement &p)
{
    std::vector<std::string> issues;
    DeviceGrid grid = DeviceGrid::from_arch(arch);
    if (p.block_slot.size() != netlist.blocks.size()) {
        issues.push_back("placement size does not match netlist");
        return issues;
    }
    std::map<std::tuple<int, int, int, int>, int> seen;
    for (size_t b = 0; b < netlist.blocks.size(); ++b) {
        const SlotRef &s = p.block_slot[b];
        const Block &blk = netlist.blocks[b];
        if (!s.valid()) {
            issues.push_back("block '" + blk.name + "' unplaced");
            continue;
        }
        TileKind t = grid.tile_at(s.x, s.y);
        SlotKind want = slot_kind_for(blk.kind);
        if (want == SlotKind::Ble && t != TileKind::Clb)
            issues.push_back("block '" + blk.name + "' not on a CLB tile");
        if (want == SlotKind::Pad && t != TileKind::Io)
            issues.push_back("block '" + blk.name + "' not on an I/O tile");
        if (s.kind != want)
            issues.push_back("block '" + blk.name + "' slot kind mismatch");
        int max_slot = arch.bles_per_clb;
        if (s.slot < 0 || s.slot >= max_slot)
            issues.push_back("block '" + blk.name + "' slot index out of range");
        auto [it, fresh] = seen.try_emplace({s.x, s.y, s.slot, static_cast<int>(s.kind)},
                                            static_cast<int>(b));
        if (!fresh)
            issues.push_back("slot collision between '" + blk.name + "' and '" +
                             netlist.blocks[it->second].name + "'");
    }
    // distinct input nets per CLB must fit the physical input pins
    std::map<std::pair<int, int>, std::vector<int>> clb_nets;
    for (size_t net = 0; net < netlist.nets.size(); ++net) {
        for (const NetSink &s : netlist.nets[net].sinks) {
            const SlotRef &loc = p.block_slot[s.block];
            if (loc.valid() && loc.kind == SlotKind::Ble) {
                auto &v = clb_nets[{loc.x, loc.y}];
                if (std::find(v.begin(), v.end(), static_cast<int>(net)) == v.end())
                    v.push_back(static_cast<int>(net));
            }
        }
    }
    for (const auto &[loc, nets] : clb_nets)
        if (static_cast<int>(nets.size()) > arch.clb_inputs)
            issues.push_back("CLB (" + std::to_string(loc.first) + "," + std::to_string(loc.second) +
                             ") needs " + std::to_string(nets.size()) + " input pins, has " +
                             std::to_string(arch.clb_inputs));
    return issues;
}

nlohmann::json placement_to_json(const Netlist &netlist, const Placement &p)
{
    nlohmann::json blocks = nlohmann::json::object();
    for (size_t b = 0; b < netlist.blocks.size(); ++b) {
        const SlotRef &s = p.block_slot[b];
        blocks[netlist.blocks[b].name] = {
            {"x", s.x}, {"y", s.y}, {"slot", s.slot}, {"pad", s.kind == SlotKind::Pad}};
    }
    return nlohmann::json{{"netlist", netlist.name}, {"blocks", blocks}};
}

Placement placement_from_json(const Netlist &netlist, const nlohmann::json &j)
{
    Placement p;
    p.block_slot.assign(netlist.blocks.size(), SlotRef{});
    const auto &blocks = j.at("blocks");
    for (size_t b = 0; b < netlist.blocks.size(); ++b) {
        const auto &e = blocks.at(netlist.blocks[b].name);
        p.block_slot[b] = SlotRef{static_cast<int16_t>(e.at("x").get<int>()),
                                  static_cast<int16_t>(e.at("y").get<int>()),
                                  static_cast<int16_t>(e.at("slot").get<int>()),
                                  e.at("pad").get<bool>() ? SlotKind::Pad : SlotKind::Ble};
    }
    return p;
}

} // namespace ovdbg
