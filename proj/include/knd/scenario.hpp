#ifndef KND_SCENARIO_HPP
#define KND_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "knd/claims.hpp"
#include "knd/lifecycle.hpp"
#include "knd/perf.hpp"
#include "knd/topology.hpp"

namespace knd {

struct PipelineOverride {
    std::string step_name; // must exist in the pipeline being overridden
    LatencyDistribution latency;
};

struct PipelineConfig {
    PipelineKind kind = PipelineKind::Knd;
    std::vector<PipelineOverride> overrides;

    // Default steps for `kind` with latency overrides applied.
    std::vector<StepSpec> resolve() const;
};

struct SweepConfig {
    std::uint64_t begin_bytes = 8;
    std::uint64_t end_bytes = 8589934592ull; // 8 GiB
    std::uint64_t factor = 2;

    std::vector<std::uint64_t> sizes() const { return size_sweep(begin_bytes, end_bytes, factor); }
};

struct PerfConfig {
    std::vector<CollectiveKind> collectives;
    BenchmarkMode mode = BenchmarkMode::Aligned;
    std::string fixed_nic; // required (and validated) in lottery mode
    SweepConfig sweep;
    // Calibrated defaults with any scenario overrides applied, per collective.
    std::map<CollectiveKind, PerfParams> params;
};

struct ClaimTemplate {
    PodClaimSet claims;
    int replicas = 1;
    std::optional<std::string> node_pin; // restrict allocation to one node
};

// A fully validated experiment description. All cross-references (node
// names, request names, device names) resolve; the seed is explicit.
struct Scenario {
    std::string name;
    std::uint64_t seed = 0;
    std::size_t replications = 0;
    std::vector<NodeInventory> nodes;
    std::vector<ClaimTemplate> claims;
    PipelineConfig pipeline;
    FaultSpec faults;
    std::optional<PerfConfig> perf;
};

// Strict JSON: unknown keys are errors, every reference is checked, parse
// failures carry their location.
Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::string& path);

} // namespace knd

#endif // KND_SCENARIO_HPP
