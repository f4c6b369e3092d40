#include "ovdbg/propagate.hpp"

namespace ovdbg {

PropagationResult simulate_propagation(const RoutingResourceGraph &rrg,
                                       const std::map<std::string, NodeId> &signal_opins,
                                       const std::map<NodeId, NodeId> &mux_selects)
{
    PropagationResult result;

    std::map<NodeId, std::string> opin_signal;
    for (const auto &[name, opin] : signal_opins)
        opin_signal[opin] = name;

    // resolve with memoization; 0 = untouched, 1 = in progress, 2 = done
    std::map<NodeId, std::string> value;
    std::map<NodeId, int> state;

    auto resolve = [&](NodeId node, auto &&self) -> const std::string * {
        if (auto it = opin_signal.find(node); it != opin_signal.end())
            return &it->second;
        auto sel = mux_selects.find(node);
        if (sel == mux_selects.end())
            return nullptr; // unconfigured: forwards nothing
        int &st = state[node];
        if (st == 1) {
            result.violations.push_back("select cycle through node " + std::to_string(node));
            return nullptr;
        }
        if (st == 2) {
            auto it = value.find(node);
            return it == value.end() ? nullptr : &it->second;
        }
        st = 1;
        if (!rrg.has_edge(sel->second, node)) {
            result.violations.push_back("select at node " + std::to_string(node) +
                                        " names non-adjacent driver " +
                                        std::to_string(sel->second));
            state[node] = 2;
            return nullptr;
        }
        const std::string *v = self(sel->second, self);
        state[node] = 2;
        if (v) {
            value[node] = *v;
            return &value[node];
        }
        return nullptr;
    };

    for (const auto &[node, from] : mux_selects) {
        const std::string *v = resolve(node, resolve);
        if (rrg.nodes[node].kind == RrKind::TbIpin) {
            if (v)
                result.delivered[node] = *v;
            else
                result.violations.push_back("trace input " + std::to_string(node) +
                                            " is configured but receives nothing");
        }
    }
    return result;
}

} // namespace ovdbg
