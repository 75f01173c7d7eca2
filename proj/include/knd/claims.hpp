#ifndef KND_CLAIMS_HPP
#define KND_CLAIMS_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "knd/rng.hpp"
#include "knd/selector.hpp"
#include "knd/topology.hpp"

namespace knd {

struct DeviceRequest {
    std::string request_name;
    SelectorAst selector;
    int count = 1;
};

// All named requests must be assigned devices whose `attribute_key` values
// are equal.
struct MatchAttributeConstraint {
    std::string attribute_key;
    std::set<std::string> request_names; // >= 2 entries
};

struct PodClaimSet {
    std::string pod_name;
    std::vector<DeviceRequest> requests;
    std::vector<MatchAttributeConstraint> constraints;
    std::map<std::string, std::string> config_payload; // per request, carried opaque
};

struct Allocation {
    std::string pod_name;
    std::string node_name;
    std::map<std::string, std::vector<std::string>> assignments; // request -> device names

    std::vector<std::pair<std::string, std::string>> devices() const; // (request, device), sorted
};

enum class PendingReason { NoNodeFits, SelectorFault };

struct Pending {
    PendingReason reason = PendingReason::NoNodeFits;
    std::string detail; // for SelectorFault: fault + where it was hit

    std::string to_string() const;
};

using AllocationResult = std::variant<Allocation, Pending>;

// Cluster inventory plus the set of devices bound to live allocations.
// Transitions are functional: commit/release return new states.
class ClusterState {
public:
    ClusterState() = default;
    static ClusterState create(std::vector<NodeInventory> nodes);

    const std::vector<NodeInventory>& nodes() const { return nodes_; } // sorted by node_name
    const NodeInventory* find_node(const std::string& name) const;

    bool is_in_use(const std::string& node, const std::string& device) const;
    std::size_t in_use_count() const { return in_use_.size(); }

    friend ClusterState commit(const ClusterState& state, const Allocation& alloc);
    friend ClusterState release(const ClusterState& state, const Allocation& alloc);

    friend bool operator==(const ClusterState& a, const ClusterState& b) {
        return a.in_use_ == b.in_use_; // inventories are immutable per cluster
    }

private:
    std::vector<NodeInventory> nodes_;
    std::set<std::pair<std::string, std::string>> in_use_;
};

// Deterministic first-fit: nodes in lexicographic node_name order; within a
// node, backtracking over free devices in lexicographic device-name order;
// the first complete assignment satisfying all selectors and constraints
// wins. Never mutates `state` — callers commit() a returned Allocation.
// `only_node` restricts the search to one node (scheduling pin).
AllocationResult allocate(const ClusterState& state, const PodClaimSet& claims,
                          const std::optional<std::string>& only_node = std::nullopt);

// Legacy device-plugin emulation: the NIC is pinned to `fixed_nic`, the GPU
// is drawn uniformly among free GPUs on that node, and constraints are
// ignored for the GPU (the plugin has no view of the network claim).
Allocation allocate_unaligned(const ClusterState& state, const PodClaimSet& claims,
                              const std::string& fixed_nic, Rng& rng);

ClusterState commit(const ClusterState& state, const Allocation& alloc);
ClusterState release(const ClusterState& state, const Allocation& alloc);

// Exhaustive enumeration over one-node assignments; true iff any assignment
// satisfies every selector and constraint. Refuses instances beyond
// 4 nodes / 8 devices per node / 4 requests. Shares no search logic with
// allocate(); it is the independence oracle allocate is checked against.
bool feasibility_oracle(const ClusterState& state, const PodClaimSet& claims);

// Re-checks an allocation from first principles (existence, freshness,
// selectors, constraints, no double assignment). Returns the first violation
// or nullopt when sound.
std::optional<std::string> verify_allocation(const ClusterState& state, const PodClaimSet& claims,
                                             const Allocation& alloc);

// Throws ValidationError on malformed claims (duplicate/dangling names,
// count < 1, constraints touching count > 1 requests).
void validate_claims(const PodClaimSet& claims);

} // namespace knd

#endif // KND_CLAIMS_HPP
