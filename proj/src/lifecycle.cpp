#include "knd/lifecycle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "knd/errors.hpp"

namespace knd {

const char* pipeline_kind_name(PipelineKind k) {
    switch (k) {
    case PipelineKind::CniDaemon: return "cni-daemon";
    case PipelineKind::CniPlusDevicePlugin: return "cni-device-plugin";
    case PipelineKind::Knd: return "knd";
    }
    return "?";
}

const char* startup_outcome_name(StartupOutcome o) {
    return o == StartupOutcome::Ready ? "ready" : "timed_out";
}

double sample_latency(const LatencyDistribution& dist, Rng& rng) {
    if (const auto* c = std::get_if<ConstantLatency>(&dist)) {
        if (c->seconds < 0.0) throw ValidationError("constant latency must be >= 0");
        return c->seconds;
    }
    if (const auto* u = std::get_if<UniformLatency>(&dist)) {
        if (u->lo < 0.0 || u->hi < u->lo) throw ValidationError("uniform latency needs 0 <= lo <= hi");
        return rng.uniform(u->lo, u->hi);
    }
    const auto& ln = std::get<LognormalLatency>(dist);
    if (ln.sigma < 0.0) throw ValidationError("lognormal sigma must be >= 0");
    return rng.lognormal(ln.mu, ln.sigma);
}

double StartupTimeline::total_latency_s() const {
    if (events.empty()) return 0.0;
    return events.back().end_s - events.front().start_s;
}

double StartupTimeline::critical_path_latency_s() const {
    double prepare = 0.0;
    for (const auto& e : events) {
        if (e.phase == Phase::Prepare) prepare += e.end_s - e.start_s;
    }
    return total_latency_s() - prepare;
}

namespace {

LognormalLatency median_sigma(double median_s, double sigma) {
    return LognormalLatency{std::log(median_s), sigma};
}

} // namespace

std::vector<StepSpec> default_pipeline(PipelineKind kind) {
    switch (kind) {
    case PipelineKind::CniDaemon:
        return {
            {"schedule", median_sigma(0.25, 0.13), false, Phase::Scheduling},
            {"runtime-invoke-cni-binary", median_sigma(0.05, 0.10), false, Phase::Sandbox},
            {"daemon-dispatch", median_sigma(0.15, 0.15), false, Phase::Sandbox},
            {"api-server-lookup", median_sigma(0.60, 0.35), true, Phase::Sandbox},
            {"configure-interface", median_sigma(0.40, 0.20), false, Phase::Sandbox},
        };
    case PipelineKind::CniPlusDevicePlugin:
        // The CNI-daemon sequence plus the device-plugin chain, with pod
        // state passed through annotations (one more API round trip).
        return {
            {"schedule", median_sigma(0.25, 0.13), false, Phase::Scheduling},
            {"runtime-invoke-cni-binary", median_sigma(0.05, 0.10), false, Phase::Sandbox},
            {"daemon-dispatch", median_sigma(0.15, 0.15), false, Phase::Sandbox},
            {"api-server-lookup", median_sigma(0.60, 0.35), true, Phase::Sandbox},
            {"configure-interface", median_sigma(0.40, 0.20), false, Phase::Sandbox},
            {"device-plugin-allocate", median_sigma(0.35, 0.20), false, Phase::Container},
            {"annotation-read", median_sigma(0.55, 0.35), true, Phase::Container},
            {"rdma-cni-configure", median_sigma(0.50, 0.25), false, Phase::Container},
        };
    case PipelineKind::Knd:
        // All claim data travels with the pod, so no step consults the API
        // server. NodePrepareResources runs in the Prepare phase, ahead of
        // the critical startup path.
        return {
            {"schedule-with-claims", median_sigma(0.25, 0.13), false, Phase::Scheduling},
            {"node-prepare-resources", median_sigma(0.45, 0.234), false, Phase::Prepare},
            {"nri-run-pod-sandbox", median_sigma(0.70, 0.208), false, Phase::Sandbox},
            {"nri-create-container", median_sigma(0.40, 0.182), false, Phase::Container},
        };
    }
    throw ValidationError("unknown pipeline kind");
}

StartupTimeline simulate_startup(const std::vector<StepSpec>& pipeline, const FaultSpec& faults,
                                 Rng& rng, const std::string& pod_name, PipelineKind kind) {
    if (pipeline.empty()) {
        throw ValidationError("pipeline must have at least one step");
    }
    if (faults.cni_timeout_s <= 0.0) {
        throw ValidationError("cni_timeout must be > 0");
    }

    std::vector<StepSpec> steps = pipeline;
    std::stable_sort(steps.begin(), steps.end(), [](const StepSpec& a, const StepSpec& b) {
        return static_cast<int>(a.phase) < static_cast<int>(b.phase);
    });

    StartupTimeline timeline;
    timeline.pod_name = pod_name;
    timeline.pipeline = kind;

    double now = 0.0;
    for (const auto& step : steps) {
        if (faults.daemon_down && step.step_name == "daemon-dispatch") {
            // The shim binary waits on a daemon that never answers.
            timeline.events.push_back(
                {step.step_name, now, now + faults.cni_timeout_s, step.touches_api_server, step.phase});
            timeline.outcome = StartupOutcome::TimedOut;
            return timeline;
        }
        const double duration = sample_latency(step.latency, rng);
        timeline.events.push_back(
            {step.step_name, now, now + duration, step.touches_api_server, step.phase});
        now += duration;
    }
    timeline.outcome = StartupOutcome::Ready;
    return timeline;
}

int count_api_roundtrips(const StartupTimeline& timeline) {
    int n = 0;
    for (const auto& e : timeline.events) {
        if (e.touches_api_server) ++n;
    }
    return n;
}

std::vector<double> percentiles(std::vector<double> samples, const std::vector<double>& ps) {
    if (samples.empty()) {
        throw ValidationError("percentiles: sample list is empty");
    }
    std::sort(samples.begin(), samples.end());
    std::vector<double> out;
    out.reserve(ps.size());
    for (const double p : ps) {
        if (!(p > 0.0) || p > 1.0) {
            throw ValidationError("percentiles: p must lie in (0, 1]");
        }
        const auto n = static_cast<double>(samples.size());
        auto rank = static_cast<std::size_t>(std::ceil(p * n));
        if (rank < 1) rank = 1;
        out.push_back(samples[rank - 1]);
    }
    return out;
}

} // namespace knd
