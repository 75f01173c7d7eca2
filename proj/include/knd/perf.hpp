#ifndef KND_PERF_HPP
#define KND_PERF_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "knd/claims.hpp"
#include "knd/rng.hpp"
#include "knd/topology.hpp"

namespace knd {

enum class CollectiveKind { AllGather, AllReduce };

const char* collective_name(CollectiveKind c); // "all_gather" / "all_reduce"

// Model parameters. Peak bandwidth decreases strictly with topological
// distance; attained bandwidth saturates with message size as
// peak * S / (S + S_half); per-sample jitter is relative and per class.
struct PerfParams {
    std::array<double, 3> peak_busbw_gbs{};                 // indexed by DistanceClass
    std::map<CollectiveKind, double> half_saturation_bytes; // per collective
    std::array<double, 3> jitter_rel{};                     // indexed by DistanceClass
    int ranks = 2;

    double peak(DistanceClass d) const { return peak_busbw_gbs[static_cast<std::size_t>(d)]; }
    double jitter(DistanceClass d) const { return jitter_rel[static_cast<std::size_t>(d)]; }

    void validate() const; // throws ValidationError on contract violations
};

struct BandwidthSample {
    CollectiveKind collective = CollectiveKind::AllGather;
    std::uint64_t message_size = 0;
    DistanceClass distance = DistanceClass::SamePciRoot;
    double busbw_gbs = 0.0;
    double algbw_gbs = 0.0;
};

struct ExperimentStats {
    double mean_gbs = 0.0;
    double stddev_gbs = 0.0;
    std::size_t n = 0;
};

// Mean and population standard deviation of a sample set.
ExperimentStats summarize_samples(const std::vector<double>& xs);

enum class BenchmarkMode { Aligned, UnalignedLottery };

const char* benchmark_mode_name(BenchmarkMode m); // "aligned" / "unaligned_lottery"

// busbw = algbw * bus_factor: (ranks-1)/ranks for all_gather,
// 2*(ranks-1)/ranks for all_reduce.
double bus_factor(CollectiveKind c, int ranks);

// peak[d] * size / (size + S_half[c]); strictly increasing in size with
// asymptote peak[d].
double mean_busbw(const PerfParams& params, CollectiveKind c, std::uint64_t size_bytes,
                  DistanceClass d);

// busbw = mean * (1 + eps), eps ~ Normal(0, jitter_rel[d]), redrawn in the
// (astronomically rare) case the factor is not positive.
BandwidthSample sample_busbw(const PerfParams& params, CollectiveKind c, std::uint64_t size_bytes,
                             DistanceClass d, Rng& rng);

// Exact moments of the two-point mixture: with probability p the aligned
// level, else the unaligned level.
ExperimentStats mixture_stats(double busbw_aligned, double busbw_unaligned, double p_aligned);

// One statistics row per message size. Aligned mode samples every
// replication at SamePciRoot. UnalignedLottery re-runs the device-plugin
// GPU draw on a fresh preset node per replication (fixed NIC rdma0) and
// samples at the drawn pair's distance.
std::vector<ExperimentStats> run_benchmark(const PerfParams& params, CollectiveKind c,
                                           const std::vector<std::uint64_t>& sizes,
                                           BenchmarkMode mode, std::size_t replications, Rng& rng);

// Calibrated defaults reproducing the reference testbed tables for the given
// collective (peaks differ per collective; saturation sizes are fitted per
// collective; jitter is shared).
const PerfParams& default_perf_params(CollectiveKind c);

// Least-squares fit of S_half against (size, busbw) anchors for a fixed
// peak; golden-section search over log(S_half). Exposed for tests.
double fit_half_saturation(double peak_gbs,
                           const std::vector<std::pair<std::uint64_t, double>>& anchors);

// Message-size sweep: begin, begin*factor, ... up to and including end.
std::vector<std::uint64_t> size_sweep(std::uint64_t begin_bytes, std::uint64_t end_bytes,
                                      std::uint64_t factor);

} // namespace knd

#endif // KND_PERF_HPP
