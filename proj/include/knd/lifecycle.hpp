#ifndef KND_LIFECYCLE_HPP
#define KND_LIFECYCLE_HPP

#include <string>
#include <variant>
#include <vector>

#include "knd/rng.hpp"

namespace knd {

enum class PipelineKind { CniDaemon, CniPlusDevicePlugin, Knd };

const char* pipeline_kind_name(PipelineKind k); // "cni-daemon" / "cni-device-plugin" / "knd"

enum class Phase { Scheduling = 0, Prepare = 1, Sandbox = 2, Container = 3 };

// Per-step latency model, seconds.
struct ConstantLatency {
    double seconds = 0.0;
};
struct UniformLatency {
    double lo = 0.0;
    double hi = 0.0;
};
struct LognormalLatency {
    double mu = 0.0; // log of the median
    double sigma = 0.0;
};
using LatencyDistribution = std::variant<ConstantLatency, UniformLatency, LognormalLatency>;

double sample_latency(const LatencyDistribution& dist, Rng& rng);

struct StepSpec {
    std::string step_name;
    LatencyDistribution latency;
    bool touches_api_server = false;
    Phase phase = Phase::Scheduling;
};

struct FaultSpec {
    bool daemon_down = false;
    double cni_timeout_s = 30.0;
};

enum class StartupOutcome { Ready, TimedOut };

const char* startup_outcome_name(StartupOutcome o); // "ready" / "timed_out"

struct TimelineEvent {
    std::string step_name;
    double start_s = 0.0;
    double end_s = 0.0;
    bool touches_api_server = false;
    Phase phase = Phase::Scheduling;
};

struct StartupTimeline {
    std::string pod_name;
    PipelineKind pipeline = PipelineKind::Knd;
    std::vector<TimelineEvent> events;
    StartupOutcome outcome = StartupOutcome::Ready;

    // Wall time from first start to last end; 0 for an empty timeline.
    double total_latency_s() const;
    // Total minus time spent in the Prepare phase, which runs ahead of the
    // pod's critical startup path.
    double critical_path_latency_s() const;
};

// Built-in step sequences for the three pipelines. The step latencies of the
// Knd pipeline are calibrated so that 100-replication totals land on
// P50 1.8 / P90 2.1 / P99 2.3 seconds; the legacy pipelines' latencies are
// plausible defaults, not measurements. Figure-level concurrency between the
// device-plugin allocation and CNI invocation is serialized here.
std::vector<StepSpec> default_pipeline(PipelineKind kind);

// Sequential execution in phase order. With faults.daemon_down, a
// "daemon-dispatch" step blocks for the full cni_timeout and execution stops
// there with a TimedOut outcome.
StartupTimeline simulate_startup(const std::vector<StepSpec>& pipeline, const FaultSpec& faults,
                                 Rng& rng, const std::string& pod_name = "pod",
                                 PipelineKind kind = PipelineKind::Knd);

int count_api_roundtrips(const StartupTimeline& timeline);

// Nearest-rank percentiles (rank = ceil(p * n) on the sorted sample).
// Every p must lie in (0, 1]; samples must be non-empty.
std::vector<double> percentiles(std::vector<double> samples, const std::vector<double>& ps);

} // namespace knd

#endif // KND_LIFECYCLE_HPP
