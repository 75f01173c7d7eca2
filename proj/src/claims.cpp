#include "knd/claims.hpp"

#include <algorithm>

#include "knd/errors.hpp"

namespace knd {

std::vector<std::pair<std::string, std::string>> Allocation::devices() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& [request, names] : assignments) {
        for (const auto& d : names) {
            out.emplace_back(request, d);
        }
    }
    return out;
}

std::string Pending::to_string() const {
    if (reason == PendingReason::NoNodeFits) {
        return "NoNodeFits";
    }
    return "SelectorFault(" + detail + ")";
}

ClusterState ClusterState::create(std::vector<NodeInventory> nodes) {
    std::sort(nodes.begin(), nodes.end(),
              [](const NodeInventory& a, const NodeInventory& b) { return a.node_name < b.node_name; });
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (nodes[i - 1].node_name == nodes[i].node_name) {
            throw ValidationError("duplicate node name '" + nodes[i].node_name + "'");
        }
    }
    ClusterState state;
    state.nodes_ = std::move(nodes);
    return state;
}

const NodeInventory* ClusterState::find_node(const std::string& name) const {
    for (const auto& n : nodes_) {
        if (n.node_name == name) return &n;
    }
    return nullptr;
}

bool ClusterState::is_in_use(const std::string& node, const std::string& device) const {
    return in_use_.count({node, device}) != 0;
}

void validate_claims(const PodClaimSet& claims) {
    if (claims.pod_name.empty()) {
        throw ValidationError("pod_name must be non-empty");
    }
    std::set<std::string> names;
    for (const auto& r : claims.requests) {
        if (r.request_name.empty()) {
            throw ValidationError("request name must be non-empty");
        }
        if (!names.insert(r.request_name).second) {
            throw ValidationError("duplicate request name '" + r.request_name + "'");
        }
        if (r.count < 1) {
            throw ValidationError("request '" + r.request_name + "' count must be >= 1");
        }
        if (r.selector.empty()) {
            throw ValidationError("request '" + r.request_name + "' has no selector");
        }
    }
    for (const auto& c : claims.constraints) {
        if (c.attribute_key.empty()) {
            throw ValidationError("matchAttribute constraint needs an attribute key");
        }
        if (c.request_names.size() < 2) {
            throw ValidationError("matchAttribute('" + c.attribute_key +
                                  "') must name at least two requests");
        }
        for (const auto& rn : c.request_names) {
            if (names.count(rn) == 0) {
                throw ValidationError("matchAttribute('" + c.attribute_key +
                                      "') references unknown request '" + rn + "'");
            }
            const auto it = std::find_if(claims.requests.begin(), claims.requests.end(),
                                         [&](const DeviceRequest& r) { return r.request_name == rn; });
            if (it->count != 1) {
                throw ValidationError("matchAttribute('" + c.attribute_key + "') references request '" +
                                      rn + "' with count > 1; constraints require count == 1");
            }
        }
    }
    for (const auto& [rn, payload] : claims.config_payload) {
        (void)payload;
        if (names.count(rn) == 0) {
            throw ValidationError("config payload references unknown request '" + rn + "'");
        }
    }
}

namespace {

// Free devices of a node, sorted by name. Pointers stay valid while the
// state's inventories do.
std::vector<const DeviceDescriptor*> free_devices(const ClusterState& state, const NodeInventory& node) {
    std::vector<const DeviceDescriptor*> out;
    for (const auto& d : node.devices) {
        if (!state.is_in_use(node.node_name, d.name())) {
            out.push_back(&d);
        }
    }
    std::sort(out.begin(), out.end(), [](const DeviceDescriptor* a, const DeviceDescriptor* b) {
        return a->name() < b->name();
    });
    return out;
}

struct NodeSearch {
    const PodClaimSet& claims;
    const std::vector<const DeviceDescriptor*>& devices;
    const std::vector<std::vector<std::size_t>>& candidates; // per request, sorted device indices
    std::vector<char> used;
    std::vector<std::vector<std::size_t>> chosen; // per request

    bool constraint_ok(std::size_t req_idx, const DeviceDescriptor& dev) const {
        const std::string& rn = claims.requests[req_idx].request_name;
        for (const auto& c : claims.constraints) {
            if (c.request_names.count(rn) == 0) continue;
            const AttributeValue* mine = dev.find_attribute(c.attribute_key);
            if (mine == nullptr) return false;
            // Compare against members assigned earlier in request order.
            for (std::size_t other = 0; other < req_idx; ++other) {
                if (c.request_names.count(claims.requests[other].request_name) == 0) continue;
                if (chosen[other].empty()) continue;
                const DeviceDescriptor& theirs = *devices[chosen[other][0]];
                const AttributeValue* v = theirs.find_attribute(c.attribute_key);
                if (v == nullptr || !(*v == *mine)) return false;
            }
        }
        return true;
    }

    bool assign_from(std::size_t req_idx) {
        if (req_idx == claims.requests.size()) return true;
        return pick(req_idx, 0, static_cast<std::size_t>(claims.requests[req_idx].count));
    }

    bool pick(std::size_t req_idx, std::size_t cand_pos, std::size_t remaining) {
        if (remaining == 0) {
            return assign_from(req_idx + 1);
        }
        const auto& cands = candidates[req_idx];
        for (std::size_t p = cand_pos; p < cands.size(); ++p) {
            const std::size_t d = cands[p];
            if (used[d]) continue;
            if (!constraint_ok(req_idx, *devices[d])) continue;
            used[d] = 1;
            chosen[req_idx].push_back(d);
            if (pick(req_idx, p + 1, remaining - 1)) return true;
            chosen[req_idx].pop_back();
            used[d] = 0;
        }
        return false;
    }
};

} // namespace

AllocationResult allocate(const ClusterState& state, const PodClaimSet& claims,
                          const std::optional<std::string>& only_node) {
    validate_claims(claims);

    std::optional<std::string> first_fault;
    for (const auto& node : state.nodes()) {
        if (only_node && node.node_name != *only_node) {
            continue;
        }
        const auto devices = free_devices(state, node);

        std::vector<std::vector<std::size_t>> candidates(claims.requests.size());
        for (std::size_t r = 0; r < claims.requests.size(); ++r) {
            for (std::size_t d = 0; d < devices.size(); ++d) {
                const EvalOutcome out = evaluate(claims.requests[r].selector, *devices[d]);
                if (out.is_fault()) {
                    // One bad device must not fail the node; remember it for diagnostics.
                    if (!first_fault) {
                        first_fault = eval_outcome_to_string(out) + " @ " + node.node_name + "/" +
                                      devices[d]->name() + "/" + claims.requests[r].request_name;
                    }
                    continue;
                }
                if (out.value) {
                    candidates[r].push_back(d);
                }
            }
        }

        NodeSearch search{claims, devices, candidates, std::vector<char>(devices.size(), 0),
                          std::vector<std::vector<std::size_t>>(claims.requests.size())};
        if (search.assign_from(0)) {
            Allocation alloc;
            alloc.pod_name = claims.pod_name;
            alloc.node_name = node.node_name;
            for (std::size_t r = 0; r < claims.requests.size(); ++r) {
                std::vector<std::string> names;
                names.reserve(search.chosen[r].size());
                for (const std::size_t d : search.chosen[r]) {
                    names.push_back(devices[d]->name());
                }
                alloc.assignments.emplace(claims.requests[r].request_name, std::move(names));
            }
            return alloc;
        }
    }

    if (first_fault) {
        return Pending{PendingReason::SelectorFault, *first_fault};
    }
    return Pending{PendingReason::NoNodeFits, {}};
}

Allocation allocate_unaligned(const ClusterState& state, const PodClaimSet& claims,
                              const std::string& fixed_nic, Rng& rng) {
    validate_claims(claims);
    if (claims.requests.size() != 2 || claims.requests[0].count != 1 || claims.requests[1].count != 1) {
        throw ValidationError("unaligned allocation needs exactly two count-1 requests");
    }

    const NodeInventory* node = nullptr;
    const DeviceDescriptor* nic = nullptr;
    for (const auto& n : state.nodes()) {
        if (const DeviceDescriptor* d = n.find_device(fixed_nic)) {
            node = &n;
            nic = d;
            break;
        }
    }
    if (node == nullptr) {
        throw ValidationError("fixed NIC '" + fixed_nic + "' not found on any node");
    }
    if (state.is_in_use(node->node_name, fixed_nic)) {
        throw ValidationError("fixed NIC '" + fixed_nic + "' is already in use");
    }

    // The NIC request is the one whose selector accepts the pinned device.
    std::vector<std::size_t> matching;
    for (std::size_t r = 0; r < 2; ++r) {
        const EvalOutcome out = evaluate(claims.requests[r].selector, *nic);
        if (out.is_value() && out.value) matching.push_back(r);
    }
    if (matching.size() != 1) {
        throw ValidationError(matching.empty()
                                  ? "no request selector matches fixed NIC '" + fixed_nic + "'"
                                  : "both request selectors match fixed NIC '" + fixed_nic + "'");
    }
    const std::size_t nic_req = matching[0];
    const std::size_t gpu_req = 1 - nic_req;

    // Device-plugin emulation: a uniform draw over free GPUs, blind to the
    // claim's constraints.
    std::vector<const DeviceDescriptor*> gpus;
    for (const auto* d : free_devices(state, *node)) {
        if (d->kind() == DeviceKind::Gpu) gpus.push_back(d);
    }
    if (gpus.empty()) {
        throw ValidationError("no free GPU on node '" + node->node_name + "'");
    }
    const DeviceDescriptor* gpu = gpus[rng.uniform_index(gpus.size())];

    Allocation alloc;
    alloc.pod_name = claims.pod_name;
    alloc.node_name = node->node_name;
    alloc.assignments.emplace(claims.requests[gpu_req].request_name,
                              std::vector<std::string>{gpu->name()});
    alloc.assignments.emplace(claims.requests[nic_req].request_name,
                              std::vector<std::string>{fixed_nic});
    return alloc;
}

ClusterState commit(const ClusterState& state, const Allocation& alloc) {
    const NodeInventory* node = state.find_node(alloc.node_name);
    if (node == nullptr) {
        throw ValidationError("commit: unknown node '" + alloc.node_name + "'");
    }
    ClusterState next = state;
    for (const auto& [request, device] : alloc.devices()) {
        (void)request;
        if (node->find_device(device) == nullptr) {
            throw ValidationError("commit: device '" + device + "' does not exist on node '" +
                                  alloc.node_name + "'");
        }
        if (!next.in_use_.insert({alloc.node_name, device}).second) {
            throw ValidationError("commit: device '" + device + "' is already in use");
        }
    }
    return next;
}

ClusterState release(const ClusterState& state, const Allocation& alloc) {
    ClusterState next = state;
    for (const auto& [request, device] : alloc.devices()) {
        (void)request;
        if (next.in_use_.erase({alloc.node_name, device}) == 0) {
            throw ValidationError("release: device '" + device + "' is not in use");
        }
    }
    return next;
}

namespace {

// Slot-expansion enumeration, structurally unlike allocate()'s per-request
// combination search: every request contributes `count` slots, devices are
// tried per slot, constraints are checked only on complete assignments.
struct OracleSearch {
    const PodClaimSet& claims;
    const std::vector<const DeviceDescriptor*>& devices;
    std::vector<std::size_t> slot_request; // slot -> request index
    std::vector<std::size_t> slot_device;  // slot -> device index
    std::vector<char> used;

    bool matches(std::size_t req, std::size_t dev) const {
        const EvalOutcome out = evaluate(claims.requests[req].selector, *devices[dev]);
        return out.is_value() && out.value;
    }

    bool complete_ok() const {
        for (const auto& c : claims.constraints) {
            const AttributeValue* want = nullptr;
            for (std::size_t s = 0; s < slot_request.size(); ++s) {
                const auto& rn = claims.requests[slot_request[s]].request_name;
                if (c.request_names.count(rn) == 0) continue;
                const AttributeValue* v = devices[slot_device[s]]->find_attribute(c.attribute_key);
                if (v == nullptr) return false;
                if (want == nullptr) {
                    want = v;
                } else if (!(*want == *v)) {
                    return false;
                }
            }
        }
        return true;
    }

    bool fill(std::size_t slot) {
        if (slot == slot_request.size()) {
            return complete_ok();
        }
        const std::size_t req = slot_request[slot];
        for (std::size_t d = 0; d < devices.size(); ++d) {
            if (used[d]) continue;
            // Canonical ordering inside a request; device sets are unordered.
            if (slot > 0 && slot_request[slot - 1] == req && slot_device[slot - 1] >= d) continue;
            if (!matches(req, d)) continue;
            used[d] = 1;
            slot_device[slot] = d;
            if (fill(slot + 1)) return true;
            used[d] = 0;
        }
        return false;
    }
};

} // namespace

bool feasibility_oracle(const ClusterState& state, const PodClaimSet& claims) {
    validate_claims(claims);
    if (state.nodes().size() > 4 || claims.requests.size() > 4) {
        throw ValidationError("feasibility oracle: instance exceeds exhaustive bounds");
    }
    for (const auto& n : state.nodes()) {
        if (n.devices.size() > 8) {
            throw ValidationError("feasibility oracle: instance exceeds exhaustive bounds");
        }
    }

    std::vector<std::size_t> slots;
    for (std::size_t r = 0; r < claims.requests.size(); ++r) {
        for (int k = 0; k < claims.requests[r].count; ++k) {
            slots.push_back(r);
        }
    }

    for (const auto& node : state.nodes()) {
        const auto devices = free_devices(state, node);
        OracleSearch search{claims, devices, slots, std::vector<std::size_t>(slots.size(), 0),
                            std::vector<char>(devices.size(), 0)};
        if (search.fill(0)) return true;
    }
    return false;
}

std::optional<std::string> verify_allocation(const ClusterState& state, const PodClaimSet& claims,
                                             const Allocation& alloc) {
    const NodeInventory* node = state.find_node(alloc.node_name);
    if (node == nullptr) {
        return "node '" + alloc.node_name + "' does not exist";
    }
    if (alloc.pod_name != claims.pod_name) {
        return "allocation pod '" + alloc.pod_name + "' does not match claims";
    }
    if (alloc.assignments.size() != claims.requests.size()) {
        return "allocation request set does not match claims";
    }

    std::set<std::string> seen;
    for (const auto& r : claims.requests) {
        const auto it = alloc.assignments.find(r.request_name);
        if (it == alloc.assignments.end()) {
            return "request '" + r.request_name + "' has no assignment";
        }
        if (it->second.size() != static_cast<std::size_t>(r.count)) {
            return "request '" + r.request_name + "' assignment length != count";
        }
        for (const auto& name : it->second) {
            const DeviceDescriptor* d = node->find_device(name);
            if (d == nullptr) {
                return "device '" + name + "' does not exist on node '" + alloc.node_name + "'";
            }
            if (state.is_in_use(alloc.node_name, name)) {
                return "device '" + name + "' is already in use";
            }
            if (!seen.insert(name).second) {
                return "device '" + name + "' assigned twice";
            }
            const EvalOutcome out = evaluate(r.selector, *d);
            if (out.is_fault() || !out.value) {
                return "device '" + name + "' does not satisfy selector of request '" +
                       r.request_name + "'";
            }
        }
    }

    for (const auto& c : claims.constraints) {
        const AttributeValue* want = nullptr;
        std::string first;
        for (const auto& rn : c.request_names) {
            const auto it = alloc.assignments.find(rn);
            if (it == alloc.assignments.end() || it->second.empty()) {
                return "constraint on '" + c.attribute_key + "' references unassigned request '" + rn + "'";
            }
            const DeviceDescriptor* d = node->find_device(it->second[0]);
            const AttributeValue* v = d == nullptr ? nullptr : d->find_attribute(c.attribute_key);
            if (v == nullptr) {
                return "device '" + it->second[0] + "' lacks constrained attribute '" +
                       c.attribute_key + "'";
            }
            if (want == nullptr) {
                want = v;
                first = it->second[0];
            } else if (!(*want == *v)) {
                return "matchAttribute('" + c.attribute_key + "') violated by '" + first + "' vs '" +
                       it->second[0] + "'";
            }
        }
    }
    return std::nullopt;
}

} // namespace knd
