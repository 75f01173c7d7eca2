#include "knd/harness.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "knd/errors.hpp"

namespace fs = std::filesystem;

namespace knd {
namespace {

constexpr const char* kAllocationsHeader =
    "replication,pod,node,request,device,distance_class,pending_reason";
constexpr const char* kStartupHeader =
    "replication,pod,pipeline,step,start_s,end_s,api_touch,outcome";
constexpr const char* kBandwidthHeader =
    "replication,collective,size_bytes,mode,distance_class,busbw_gbs,algbw_gbs";

// Shortest representation that parses back to the same double, so a CSV
// round trip is lossless.
std::string format_double(double v) {
    std::array<char, 40> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ValidationError(where + ": bad number \"" + s + "\"");
    }
    return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& where) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
        throw ValidationError(where + ": bad count \"" + s + "\"");
    }
    return v;
}

PipelineKind parse_pipeline_kind(const std::string& s, const std::string& where) {
    for (const PipelineKind k :
         {PipelineKind::CniDaemon, PipelineKind::CniPlusDevicePlugin, PipelineKind::Knd}) {
        if (s == pipeline_kind_name(k)) return k;
    }
    throw ValidationError(where + ": unknown pipeline \"" + s + "\"");
}

CollectiveKind parse_collective_kind(const std::string& s, const std::string& where) {
    for (const CollectiveKind c : {CollectiveKind::AllGather, CollectiveKind::AllReduce}) {
        if (s == collective_name(c)) return c;
    }
    throw ValidationError(where + ": unknown collective \"" + s + "\"");
}

BenchmarkMode parse_benchmark_mode(const std::string& s, const std::string& where) {
    for (const BenchmarkMode m : {BenchmarkMode::Aligned, BenchmarkMode::UnalignedLottery}) {
        if (s == benchmark_mode_name(m)) return m;
    }
    throw ValidationError(where + ": unknown mode \"" + s + "\"");
}

DistanceClass parse_distance_class(const std::string& s, const std::string& where) {
    for (const DistanceClass d : {DistanceClass::SamePciRoot, DistanceClass::SameNumaCrossRoot,
                                  DistanceClass::CrossNuma}) {
        if (s == distance_class_name(d)) return d;
    }
    throw ValidationError(where + ": unknown distance class \"" + s + "\"");
}

StartupOutcome parse_outcome(const std::string& s, const std::string& where) {
    for (const StartupOutcome o : {StartupOutcome::Ready, StartupOutcome::TimedOut}) {
        if (s == startup_outcome_name(o)) return o;
    }
    throw ValidationError(where + ": unknown outcome \"" + s + "\"");
}

// Step names are unique within each built-in pipeline, so (pipeline, step)
// recovers the phase a CSV row does not carry.
Phase step_phase(PipelineKind kind, const std::string& step) {
    static const auto table = [] {
        std::map<PipelineKind, std::map<std::string, Phase>> t;
        for (const PipelineKind k :
             {PipelineKind::CniDaemon, PipelineKind::CniPlusDevicePlugin, PipelineKind::Knd}) {
            for (const StepSpec& s : default_pipeline(k)) {
                t[k][s.step_name] = s.phase;
            }
        }
        return t;
    }();
    const auto& steps = table.at(kind);
    const auto it = steps.find(step);
    if (it == steps.end()) {
        throw ValidationError(std::string("pipeline '") + pipeline_kind_name(kind) +
                              "' has no step '" + step + "'");
    }
    return it->second;
}

// First GPU and first NIC of the allocation, in (request, device) order.
std::optional<DistanceClass> pod_pair_distance(const NodeInventory& node, const Allocation& alloc) {
    const DeviceDescriptor* gpu = nullptr;
    const DeviceDescriptor* nic = nullptr;
    for (const auto& [request, device] : alloc.devices()) {
        (void)request;
        const DeviceDescriptor* d = node.find_device(device);
        if (!d) continue;
        if (d->kind() == DeviceKind::Gpu && !gpu) gpu = d;
        if (d->kind() == DeviceKind::Nic && !nic) nic = d;
    }
    if (!gpu || !nic) return std::nullopt;
    return topology_distance(*gpu, *nic);
}

struct ReplicationRows {
    std::vector<AllocationRow> allocations;
    std::vector<StartupRow> startup;
    std::vector<BandwidthRow> bandwidth;
};

// One replication, fully isolated: fresh cluster state, own RNG stream.
// Draw order is fixed (allocation, then startup per pod, then bandwidth)
// so the stream layout never depends on outside state.
ReplicationRows run_replication(const Scenario& s, const ClusterState& base,
                                const std::vector<StepSpec>& steps, std::size_t k) {
    Rng rng(derive_subseed(s.seed, k));
    ClusterState state = base;
    ReplicationRows out;
    std::optional<DistanceClass> pair_distance;
    bool all_ready = true;

    for (const auto& tmpl : s.claims) {
        for (int i = 0; i < tmpl.replicas; ++i) {
            PodClaimSet claims = tmpl.claims;
            if (tmpl.replicas > 1) {
                claims.pod_name += "-" + std::to_string(i);
            }

            std::optional<Allocation> alloc;
            std::string pending;
            if (s.perf && s.perf->mode == BenchmarkMode::UnalignedLottery) {
                alloc = allocate_unaligned(state, claims, s.perf->fixed_nic, rng);
            } else {
                AllocationResult res = allocate(state, claims, tmpl.node_pin);
                if (auto* a = std::get_if<Allocation>(&res)) {
                    alloc = std::move(*a);
                } else {
                    pending = std::get<Pending>(res).to_string();
                }
            }

            if (!alloc) {
                AllocationRow row;
                row.replication = k;
                row.pod = claims.pod_name;
                row.pending_reason = pending;
                out.allocations.push_back(std::move(row));
                all_ready = false;
                continue; // a pod that never scheduled has no startup timeline
            }

            state = commit(state, *alloc);
            const NodeInventory* node = state.find_node(alloc->node_name);
            const std::optional<DistanceClass> dist = pod_pair_distance(*node, *alloc);
            if (!pair_distance && dist) {
                pair_distance = dist;
            }

            const auto pairs = alloc->devices();
            if (pairs.empty()) {
                AllocationRow row; // deviceless pod: keep one row so it is counted
                row.replication = k;
                row.pod = claims.pod_name;
                row.node = alloc->node_name;
                out.allocations.push_back(std::move(row));
            }
            for (const auto& [request, device] : pairs) {
                AllocationRow row;
                row.replication = k;
                row.pod = claims.pod_name;
                row.node = alloc->node_name;
                row.request = request;
                row.device = device;
                if (dist) {
                    row.distance_class = distance_class_name(*dist);
                }
                out.allocations.push_back(std::move(row));
            }

            const StartupTimeline tl =
                simulate_startup(steps, s.faults, rng, claims.pod_name, s.pipeline.kind);
            for (const auto& e : tl.events) {
                StartupRow row;
                row.replication = k;
                row.pod = claims.pod_name;
                row.pipeline = s.pipeline.kind;
                row.step = e.step_name;
                row.start_s = e.start_s;
                row.end_s = e.end_s;
                row.api_touch = e.touches_api_server;
                row.outcome = tl.outcome;
                out.startup.push_back(std::move(row));
            }
            if (tl.outcome != StartupOutcome::Ready) {
                all_ready = false;
            }
        }
    }

    // The benchmark pod only reports bandwidth when the replication came up
    // clean; a pending or timed-out pod never ran the collective.
    if (s.perf && all_ready) {
        const PerfConfig& perf = *s.perf;
        const std::optional<DistanceClass> d =
            perf.mode == BenchmarkMode::Aligned ? std::optional(DistanceClass::SamePciRoot)
                                                : pair_distance;
        if (d) {
            const std::vector<std::uint64_t> sizes = perf.sweep.sizes();
            for (const CollectiveKind c : perf.collectives) {
                const PerfParams& params = perf.params.at(c);
                for (const std::uint64_t size : sizes) {
                    const BandwidthSample smp = sample_busbw(params, c, size, *d, rng);
                    BandwidthRow row;
                    row.replication = k;
                    row.collective = c;
                    row.size_bytes = size;
                    row.mode = perf.mode;
                    row.distance = *d;
                    row.busbw_gbs = smp.busbw_gbs;
                    row.algbw_gbs = smp.algbw_gbs;
                    out.bandwidth.push_back(row);
                }
            }
        }
    }
    return out;
}

void check_cell(const std::string& cell, const fs::path& file) {
    if (cell.find_first_of(",\"\n\r") != std::string::npos) {
        throw IoError(file.string() + ": cell \"" + cell + "\" breaks the CSV grammar");
    }
}

void write_csv(const fs::path& file, const char* header,
               const std::vector<std::vector<std::string>>& rows) {
    std::ofstream outstream(file, std::ios::binary);
    if (!outstream) {
        throw IoError("cannot write " + file.string());
    }
    outstream << header << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            check_cell(row[i], file);
            if (i) outstream << ',';
            outstream << row[i];
        }
        outstream << '\n';
    }
    outstream.flush();
    if (!outstream) {
        throw IoError("failed writing " + file.string());
    }
}

std::vector<std::vector<std::string>> read_csv(const fs::path& file, const char* header,
                                               std::size_t columns) {
    std::ifstream in(file, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + file.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw ValidationError(file.string() + ": unexpected header");
    }
    std::vector<std::vector<std::string>> rows;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::string> cells;
        std::size_t pos = 0;
        while (true) {
            const std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) {
                cells.push_back(line.substr(pos));
                break;
            }
            cells.push_back(line.substr(pos, comma - pos));
            pos = comma + 1;
        }
        if (cells.size() != columns) {
            throw ValidationError(file.string() + ":" + std::to_string(lineno) +
                                  ": expected " + std::to_string(columns) + " columns");
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

std::string fixed(double v, int precision) {
    std::array<char, 64> buf{};
    std::snprintf(buf.data(), buf.size(), "%.*f", precision, v);
    return std::string(buf.data());
}

} // namespace

RunReport run(const Scenario& scenario) {
    std::vector<std::size_t> order(scenario.replications);
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
    return run_with_execution_order(scenario, order);
}

RunReport run_with_execution_order(const Scenario& scenario,
                                   const std::vector<std::size_t>& order) {
    if (order.size() != scenario.replications) {
        throw ValidationError("execution order must list every replication exactly once");
    }
    std::vector<char> seen(scenario.replications, 0);
    for (const std::size_t k : order) {
        if (k >= scenario.replications || seen[k]) {
            throw ValidationError("execution order must be a permutation of the replications");
        }
        seen[k] = 1;
    }

    const ClusterState base = ClusterState::create(scenario.nodes);
    const std::vector<StepSpec> steps = scenario.pipeline.resolve();

    std::vector<ReplicationRows> rows(scenario.replications);
    for (const std::size_t k : order) {
        try {
            rows[k] = run_replication(scenario, base, steps, k);
        } catch (const ValidationError& e) {
            throw ValidationError("replication " + std::to_string(k) + ": " + e.what());
        } catch (const std::runtime_error& e) {
            throw std::runtime_error("replication " + std::to_string(k) + ": " + e.what());
        }
    }

    RunReport report;
    report.label = scenario.name;
    report.replications = scenario.replications;
    for (auto& r : rows) {
        report.allocations.insert(report.allocations.end(),
                                  std::make_move_iterator(r.allocations.begin()),
                                  std::make_move_iterator(r.allocations.end()));
        report.startup.insert(report.startup.end(), std::make_move_iterator(r.startup.begin()),
                              std::make_move_iterator(r.startup.end()));
        report.bandwidth.insert(report.bandwidth.end(), r.bandwidth.begin(), r.bandwidth.end());
    }
    recompute_aggregates(report);
    return report;
}

void recompute_aggregates(RunReport& report) {
    std::set<std::pair<std::size_t, std::string>> pods;
    std::size_t pending = 0;
    for (const auto& row : report.allocations) {
        pods.insert({row.replication, row.pod});
        if (!row.pending_reason.empty()) ++pending;
    }
    report.pods_attempted = pods.size();
    report.pods_pending = pending;

    struct PodAgg {
        double first_s = std::numeric_limits<double>::infinity();
        double last_s = -std::numeric_limits<double>::infinity();
        double prepare_s = 0.0;
        int api = 0;
        bool timed_out = false;
    };
    std::map<std::pair<std::size_t, std::string>, PodAgg> by_pod;
    for (const auto& row : report.startup) {
        PodAgg& agg = by_pod[{row.replication, row.pod}];
        agg.first_s = std::min(agg.first_s, row.start_s);
        agg.last_s = std::max(agg.last_s, row.end_s);
        if (step_phase(row.pipeline, row.step) == Phase::Prepare) {
            agg.prepare_s += row.end_s - row.start_s;
        }
        if (row.api_touch) ++agg.api;
        if (row.outcome == StartupOutcome::TimedOut) agg.timed_out = true;
    }

    std::vector<double> totals;
    std::vector<double> criticals;
    totals.reserve(by_pod.size());
    criticals.reserve(by_pod.size());
    std::size_t ready = 0;
    std::size_t timed_out = 0;
    long long api_total = 0;
    for (const auto& [key, agg] : by_pod) {
        (void)key;
        const double total = agg.last_s - agg.first_s;
        totals.push_back(total);
        criticals.push_back(total - agg.prepare_s);
        if (agg.timed_out) {
            ++timed_out;
        } else {
            ++ready;
        }
        api_total += agg.api;
    }
    report.pods_ready = ready;
    report.pods_timed_out = timed_out;
    report.api_roundtrips_per_pod =
        by_pod.empty() ? 0.0 : static_cast<double>(api_total) / static_cast<double>(by_pod.size());
    if (!totals.empty()) {
        const std::vector<double> ps = {0.5, 0.9, 0.99};
        const std::vector<double> t = percentiles(totals, ps);
        const std::vector<double> c = percentiles(criticals, ps);
        report.total_latency = LatencySummary{t[0], t[1], t[2], totals.size()};
        report.critical_path_latency = LatencySummary{c[0], c[1], c[2], criticals.size()};
    } else {
        report.total_latency.reset();
        report.critical_path_latency.reset();
    }

    // The benchmark pod is the first row of each replication that carries a
    // pair distance.
    std::map<std::size_t, std::string> first_distance;
    for (const auto& row : report.allocations) {
        if (!row.distance_class.empty() && first_distance.count(row.replication) == 0) {
            first_distance.emplace(row.replication, row.distance_class);
        }
    }
    if (first_distance.empty()) {
        report.alignment_fraction.reset();
    } else {
        std::size_t aligned = 0;
        for (const auto& [rep, dist] : first_distance) {
            (void)rep;
            if (dist == distance_class_name(DistanceClass::SamePciRoot)) ++aligned;
        }
        report.alignment_fraction =
            static_cast<double>(aligned) / static_cast<double>(first_distance.size());
    }

    report.bandwidth_stats.clear();
    std::map<std::pair<CollectiveKind, std::uint64_t>, std::vector<double>> groups;
    for (const auto& row : report.bandwidth) {
        groups[{row.collective, row.size_bytes}].push_back(row.busbw_gbs);
    }
    for (const auto& [key, xs] : groups) {
        report.bandwidth_stats.emplace(key, summarize_samples(xs));
    }
}

void emit_csv(const RunReport& report, const std::string& out_dir) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);

    std::vector<std::vector<std::string>> rows;
    rows.reserve(report.allocations.size());
    for (const auto& r : report.allocations) {
        rows.push_back({std::to_string(r.replication), r.pod, r.node, r.request, r.device,
                        r.distance_class, r.pending_reason});
    }
    write_csv(dir / "allocations.csv", kAllocationsHeader, rows);

    rows.clear();
    rows.reserve(report.startup.size());
    for (const auto& r : report.startup) {
        rows.push_back({std::to_string(r.replication), r.pod, pipeline_kind_name(r.pipeline),
                        r.step, format_double(r.start_s), format_double(r.end_s),
                        r.api_touch ? "1" : "0", startup_outcome_name(r.outcome)});
    }
    write_csv(dir / "startup.csv", kStartupHeader, rows);

    rows.clear();
    rows.reserve(report.bandwidth.size());
    for (const auto& r : report.bandwidth) {
        rows.push_back({std::to_string(r.replication), collective_name(r.collective),
                        std::to_string(r.size_bytes), benchmark_mode_name(r.mode),
                        distance_class_name(r.distance), format_double(r.busbw_gbs),
                        format_double(r.algbw_gbs)});
    }
    write_csv(dir / "bandwidth.csv", kBandwidthHeader, rows);
}

RunReport load_report_csv(const std::string& dir) {
    const fs::path base(dir);
    RunReport report;
    fs::path name = base;
    if (name.filename().empty()) name = name.parent_path();
    report.label = name.filename().string().empty() ? dir : name.filename().string();

    const std::string aw = (base / "allocations.csv").string();
    for (const auto& cells : read_csv(base / "allocations.csv", kAllocationsHeader, 7)) {
        AllocationRow row;
        row.replication = static_cast<std::size_t>(parse_u64(cells[0], aw));
        row.pod = cells[1];
        row.node = cells[2];
        row.request = cells[3];
        row.device = cells[4];
        row.distance_class = cells[5];
        if (!row.distance_class.empty()) {
            parse_distance_class(row.distance_class, aw); // reject unknown spellings
        }
        row.pending_reason = cells[6];
        report.allocations.push_back(std::move(row));
    }

    const std::string sw = (base / "startup.csv").string();
    for (const auto& cells : read_csv(base / "startup.csv", kStartupHeader, 8)) {
        StartupRow row;
        row.replication = static_cast<std::size_t>(parse_u64(cells[0], sw));
        row.pod = cells[1];
        row.pipeline = parse_pipeline_kind(cells[2], sw);
        row.step = cells[3];
        row.start_s = parse_double(cells[4], sw);
        row.end_s = parse_double(cells[5], sw);
        if (cells[6] != "0" && cells[6] != "1") {
            throw ValidationError(sw + ": api_touch must be 0 or 1");
        }
        row.api_touch = cells[6] == "1";
        row.outcome = parse_outcome(cells[7], sw);
        report.startup.push_back(std::move(row));
    }

    const std::string bw = (base / "bandwidth.csv").string();
    for (const auto& cells : read_csv(base / "bandwidth.csv", kBandwidthHeader, 7)) {
        BandwidthRow row;
        row.replication = static_cast<std::size_t>(parse_u64(cells[0], bw));
        row.collective = parse_collective_kind(cells[1], bw);
        row.size_bytes = parse_u64(cells[2], bw);
        row.mode = parse_benchmark_mode(cells[3], bw);
        row.distance = parse_distance_class(cells[4], bw);
        row.busbw_gbs = parse_double(cells[5], bw);
        row.algbw_gbs = parse_double(cells[6], bw);
        report.bandwidth.push_back(row);
    }

    std::size_t max_rep = 0;
    bool any = false;
    for (const auto& r : report.allocations) {
        max_rep = std::max(max_rep, r.replication);
        any = true;
    }
    for (const auto& r : report.startup) {
        max_rep = std::max(max_rep, r.replication);
        any = true;
    }
    for (const auto& r : report.bandwidth) {
        max_rep = std::max(max_rep, r.replication);
        any = true;
    }
    report.replications = any ? max_rep + 1 : 0;

    recompute_aggregates(report);
    return report;
}

Comparison compare(const RunReport& a, const RunReport& b) {
    Comparison cmp;
    cmp.label_a = a.label;
    cmp.label_b = b.label;

    if (a.bandwidth_stats.size() != b.bandwidth_stats.size()) {
        throw ValidationError("bandwidth sweeps do not match; run both scenarios with the same sweep");
    }
    auto it_b = b.bandwidth_stats.begin();
    for (const auto& [key, stats_a] : a.bandwidth_stats) {
        if (it_b->first != key) {
            throw ValidationError(
                "bandwidth sweeps do not match; run both scenarios with the same sweep");
        }
        const ExperimentStats& stats_b = it_b->second;
        ++it_b;
        if (!(stats_b.mean_gbs > 0.0)) {
            throw ValidationError("comparison baseline has zero mean bandwidth");
        }
        SpeedupRow row;
        row.collective = key.first;
        row.size_bytes = key.second;
        row.mean_a_gbs = stats_a.mean_gbs;
        row.mean_b_gbs = stats_b.mean_gbs;
        row.speedup = stats_a.mean_gbs / stats_b.mean_gbs;
        cmp.speedups.push_back(row);
        if (!cmp.max_speedup || row.speedup > cmp.max_speedup->speedup) {
            cmp.max_speedup = row;
        }
    }

    if (a.total_latency && b.total_latency) {
        cmp.p50_total_delta_s = a.total_latency->p50_s - b.total_latency->p50_s;
    }
    if (!a.startup.empty() && !b.startup.empty()) {
        cmp.api_roundtrips_delta = a.api_roundtrips_per_pod - b.api_roundtrips_per_pod;
    }
    return cmp;
}

std::string render_report(const RunReport& report) {
    std::ostringstream out;
    out << "scenario: " << report.label << "\n";
    out << "replications: " << report.replications << "\n";
    out << "pods: " << report.pods_attempted << " attempted, " << report.pods_pending
        << " pending, " << report.pods_ready << " ready, " << report.pods_timed_out
        << " timed out\n";
    if (report.total_latency) {
        const LatencySummary& t = *report.total_latency;
        out << "startup total s: p50=" << fixed(t.p50_s, 3) << " p90=" << fixed(t.p90_s, 3)
            << " p99=" << fixed(t.p99_s, 3) << " (n=" << t.n << ")\n";
    }
    if (report.critical_path_latency) {
        const LatencySummary& c = *report.critical_path_latency;
        out << "startup critical path s: p50=" << fixed(c.p50_s, 3) << " p90=" << fixed(c.p90_s, 3)
            << " p99=" << fixed(c.p99_s, 3) << "\n";
    }
    if (report.pods_attempted > report.pods_pending) {
        out << "api roundtrips per pod: " << fixed(report.api_roundtrips_per_pod, 2) << "\n";
    }
    if (report.alignment_fraction) {
        out << "same-pci-root pair fraction: " << fixed(*report.alignment_fraction, 4) << "\n";
    }
    if (!report.bandwidth_stats.empty()) {
        out << "bandwidth busbw GB/s (mean +/- sd over replications):\n";
        for (const auto& [key, stats] : report.bandwidth_stats) {
            out << "  " << collective_name(key.first) << " size=" << key.second << ": "
                << fixed(stats.mean_gbs, 2) << " +/- " << fixed(stats.stddev_gbs, 2)
                << " (n=" << stats.n << ")\n";
        }
    }
    return out.str();
}

std::string render_comparison(const Comparison& cmp) {
    std::ostringstream out;
    out << "compare: " << cmp.label_a << " vs " << cmp.label_b << "\n";
    if (!cmp.speedups.empty()) {
        out << "bandwidth speedup (" << cmp.label_a << " / " << cmp.label_b << "):\n";
        for (const auto& row : cmp.speedups) {
            out << "  " << collective_name(row.collective) << " size=" << row.size_bytes << ": "
                << fixed(row.mean_a_gbs, 2) << " / " << fixed(row.mean_b_gbs, 2) << " = "
                << fixed(row.speedup, 3) << "x\n";
        }
    }
    if (cmp.max_speedup) {
        out << "max speedup: " << fixed(cmp.max_speedup->speedup, 3) << "x ("
            << collective_name(cmp.max_speedup->collective) << ", "
            << cmp.max_speedup->size_bytes << " bytes)\n";
    }
    if (cmp.p50_total_delta_s) {
        out << "startup p50 total delta: " << fixed(*cmp.p50_total_delta_s, 3) << " s\n";
    }
    if (cmp.api_roundtrips_delta) {
        out << "api roundtrips per pod delta: " << fixed(*cmp.api_roundtrips_delta, 2) << "\n";
    }
    return out.str();
}

} // namespace knd
