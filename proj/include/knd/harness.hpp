#ifndef KND_HARNESS_HPP
#define KND_HARNESS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "knd/perf.hpp"
#include "knd/scenario.hpp"

namespace knd {

// One CSV row each. String fields may be empty where the column does not
// apply (a pending pod has no node; a zero-device pod has no request).
struct AllocationRow {
    std::size_t replication = 0;
    std::string pod;
    std::string node;
    std::string request;
    std::string device;
    std::string distance_class;  // the pod's gpu-nic pair distance
    std::string pending_reason;  // non-empty iff the pod stayed pending
};

struct StartupRow {
    std::size_t replication = 0;
    std::string pod;
    PipelineKind pipeline = PipelineKind::Knd;
    std::string step;
    double start_s = 0.0;
    double end_s = 0.0;
    bool api_touch = false;
    StartupOutcome outcome = StartupOutcome::Ready;
};

struct BandwidthRow {
    std::size_t replication = 0;
    CollectiveKind collective = CollectiveKind::AllGather;
    std::uint64_t size_bytes = 0;
    BenchmarkMode mode = BenchmarkMode::Aligned;
    DistanceClass distance = DistanceClass::SamePciRoot;
    double busbw_gbs = 0.0;
    double algbw_gbs = 0.0;
};

struct LatencySummary {
    double p50_s = 0.0;
    double p90_s = 0.0;
    double p99_s = 0.0;
    std::size_t n = 0;
};

// Rows are the ground truth; everything below `label`/`replications` is
// derived from them by recompute_aggregates (and therefore survives a CSV
// round trip bit for bit).
struct RunReport {
    std::string label;
    std::size_t replications = 0;

    std::vector<AllocationRow> allocations;
    std::vector<StartupRow> startup;
    std::vector<BandwidthRow> bandwidth;

    std::size_t pods_attempted = 0;
    std::size_t pods_pending = 0;
    std::size_t pods_ready = 0;
    std::size_t pods_timed_out = 0;
    std::optional<LatencySummary> total_latency;
    std::optional<LatencySummary> critical_path_latency;
    double api_roundtrips_per_pod = 0.0; // over started pods
    // Fraction of replications whose benchmark pod drew a same-pci-root
    // pair, over replications that produced a pair at all.
    std::optional<double> alignment_fraction;
    std::map<std::pair<CollectiveKind, std::uint64_t>, ExperimentStats> bandwidth_stats;
};

// Executes every replication on an isolated RNG stream derived from the
// scenario seed, then folds rows in replication order.
RunReport run(const Scenario& scenario);

// Same result for any execution order; `order` must be a permutation of
// 0..replications-1. Exists so tests can prove schedule independence.
RunReport run_with_execution_order(const Scenario& scenario, const std::vector<std::size_t>& order);

// Rebuilds the derived summary fields from the row vectors.
void recompute_aggregates(RunReport& report);

// Writes allocations.csv, startup.csv, bandwidth.csv into `out_dir`
// (created if needed). Deterministic bytes: LF line ends, shortest
// round-trip doubles, rows in replication-major order.
void emit_csv(const RunReport& report, const std::string& out_dir);

// Reads the three files back; the report's label is the directory name.
// Headers must match emit_csv exactly.
RunReport load_report_csv(const std::string& dir);

struct SpeedupRow {
    CollectiveKind collective = CollectiveKind::AllGather;
    std::uint64_t size_bytes = 0;
    double mean_a_gbs = 0.0;
    double mean_b_gbs = 0.0;
    double speedup = 0.0; // mean_a / mean_b
};

struct Comparison {
    std::string label_a;
    std::string label_b;
    std::vector<SpeedupRow> speedups; // sweep order
    std::optional<SpeedupRow> max_speedup;
    std::optional<double> p50_total_delta_s;    // a - b
    std::optional<double> api_roundtrips_delta; // a - b, per pod
};

// Bandwidth sweeps must cover identical (collective, size) sets, or both be
// absent; anything else throws ValidationError.
Comparison compare(const RunReport& a, const RunReport& b);

std::string render_report(const RunReport& report);
std::string render_comparison(const Comparison& cmp);

} // namespace knd

#endif // KND_HARNESS_HPP
