#include "knd/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "knd/errors.hpp"
#include "knd/selector.hpp"

namespace knd {

std::vector<StepSpec> PipelineConfig::resolve() const {
    std::vector<StepSpec> steps = default_pipeline(kind);
    for (const auto& ov : overrides) {
        const auto it = std::find_if(steps.begin(), steps.end(),
                                     [&](const StepSpec& s) { return s.step_name == ov.step_name; });
        if (it == steps.end()) {
            throw ValidationError(std::string("pipeline override references unknown step '") +
                                  ov.step_name + "' in pipeline '" + pipeline_kind_name(kind) + "'");
        }
        it->latency = ov.latency;
    }
    return steps;
}

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ValidationError(where + ": " + what);
}

void require_object(const json& j, const std::string& where) {
    if (!j.is_object()) fail(where, "expected an object");
}

void require_array(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array");
}

// Strictness rule: a key the loader does not understand is an error, never
// silently ignored.
void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                    [&](const char* k) { return it.key() == k; });
        if (!ok) fail(where, "unknown key \"" + it.key() + "\"");
    }
}

const json* find(const json& obj, const char* key) {
    const auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

const json& require(const json& obj, const char* key, const std::string& where) {
    const json* p = find(obj, key);
    if (!p) fail(where, std::string("missing required key \"") + key + "\"");
    return *p;
}

std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

std::int64_t as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<std::int64_t>();
}

std::uint64_t as_uint(const json& j, const std::string& where) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
    fail(where, "expected a non-negative integer");
}

double as_number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

bool as_bool(const json& j, const std::string& where) {
    if (!j.is_boolean()) fail(where, "expected a boolean");
    return j.get<bool>();
}

// Names flow into CSV cells unquoted, so keep them out of the separator and
// record syntax.
std::string as_name(const json& j, const std::string& where) {
    const std::string s = as_string(j, where);
    if (s.empty()) fail(where, "must be non-empty");
    if (s.find_first_of(",\"\n\r") != std::string::npos) {
        fail(where, "names must not contain commas, quotes, or line breaks");
    }
    return s;
}

std::array<double, 3> as_triple(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) fail(where, "expected an array of three numbers");
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        out[i] = as_number(j[i], where + "[" + std::to_string(i) + "]");
    }
    return out;
}

DeviceSpec parse_device(const json& j, const std::string& where) {
    require_object(j, where);
    DeviceSpec spec;
    spec.name = as_name(require(j, "name", where), where + ".name");
    const std::string kind = as_string(require(j, "kind", where), where + ".kind");
    if (kind == device_kind_name(DeviceKind::Gpu)) {
        spec.kind = DeviceKind::Gpu;
    } else if (kind == device_kind_name(DeviceKind::Nic)) {
        spec.kind = DeviceKind::Nic;
    } else {
        fail(where + ".kind", "expected \"gpu\" or \"nic\"");
    }
    // Every other key is a device attribute; the JSON type picks the
    // attribute kind.
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        if (key == "name" || key == "kind") continue;
        const std::string vw = where + "." + key;
        const json& v = *it;
        if (v.is_string()) {
            spec.attributes.emplace(key, AttributeValue::text(as_string(v, vw)));
        } else if (v.is_boolean()) {
            spec.attributes.emplace(key, AttributeValue::flag(v.get<bool>()));
        } else if (v.is_number_integer()) {
            spec.attributes.emplace(key, AttributeValue::integer(v.get<std::int64_t>()));
        } else {
            fail(vw, "attribute values must be strings, integers, or booleans");
        }
    }
    return spec;
}

NodeInventory parse_node(const json& j, const std::string& where) {
    require_object(j, where);
    check_keys(j, {"name", "preset", "devices"}, where);
    const std::string name = as_name(require(j, "name", where), where + ".name");
    const json* preset = find(j, "preset");
    const json* devices = find(j, "devices");
    if ((preset != nullptr) == (devices != nullptr)) {
        fail(where, "give exactly one of \"preset\" or \"devices\"");
    }
    try {
        if (preset) {
            const std::string p = as_string(*preset, where + ".preset");
            if (p != "a4-highgpu-8g") fail(where + ".preset", "unknown preset \"" + p + "\"");
            return build_preset_node(NodePreset::A4HighGpu8g, name);
        }
        require_array(*devices, where + ".devices");
        if (devices->empty()) fail(where + ".devices", "must not be empty");
        NodeTopologySpec spec;
        spec.node_name = name;
        for (std::size_t i = 0; i < devices->size(); ++i) {
            spec.devices.push_back(
                parse_device((*devices)[i], where + ".devices[" + std::to_string(i) + "]"));
        }
        return build_node(spec);
    } catch (const ValidationError& e) {
        // Re-wrap construction-time errors with the node's position.
        const std::string msg = e.what();
        if (msg.rfind(where, 0) == 0) throw;
        fail(where, msg);
    }
}

SelectorAst parse_claim_selector(const json& j, const std::string& where) {
    const std::string text = as_string(j, where);
    try {
        return parse_selector(text);
    } catch (const ParseError& e) {
        fail(where, std::string("bad selector: ") + e.what());
    }
}

ClaimTemplate parse_claim(const json& j, const std::string& where) {
    require_object(j, where);
    check_keys(j, {"pod", "replicas", "node", "requests", "constraints", "config"}, where);
    ClaimTemplate tmpl;
    tmpl.claims.pod_name = as_name(require(j, "pod", where), where + ".pod");
    if (const json* r = find(j, "replicas")) {
        const std::int64_t n = as_int(*r, where + ".replicas");
        if (n < 1) fail(where + ".replicas", "must be >= 1");
        tmpl.replicas = static_cast<int>(n);
    }
    if (const json* pin = find(j, "node")) {
        tmpl.node_pin = as_name(*pin, where + ".node");
    }
    const json& requests = require(j, "requests", where);
    require_array(requests, where + ".requests");
    for (std::size_t i = 0; i < requests.size(); ++i) {
        const std::string rw = where + ".requests[" + std::to_string(i) + "]";
        const json& rj = requests[i];
        require_object(rj, rw);
        check_keys(rj, {"name", "selector", "count"}, rw);
        DeviceRequest req;
        req.request_name = as_name(require(rj, "name", rw), rw + ".name");
        req.selector = parse_claim_selector(require(rj, "selector", rw), rw + ".selector");
        if (const json* c = find(rj, "count")) {
            const std::int64_t n = as_int(*c, rw + ".count");
            if (n < 1) fail(rw + ".count", "must be >= 1");
            req.count = static_cast<int>(n);
        }
        tmpl.claims.requests.push_back(std::move(req));
    }
    if (const json* constraints = find(j, "constraints")) {
        require_array(*constraints, where + ".constraints");
        for (std::size_t i = 0; i < constraints->size(); ++i) {
            const std::string cw = where + ".constraints[" + std::to_string(i) + "]";
            const json& cj = (*constraints)[i];
            require_object(cj, cw);
            check_keys(cj, {"matchAttribute", "requests"}, cw);
            MatchAttributeConstraint con;
            con.attribute_key = as_string(require(cj, "matchAttribute", cw), cw + ".matchAttribute");
            const json& members = require(cj, "requests", cw);
            require_array(members, cw + ".requests");
            for (std::size_t m = 0; m < members.size(); ++m) {
                const std::string mw = cw + ".requests[" + std::to_string(m) + "]";
                if (!con.request_names.insert(as_string(members[m], mw)).second) {
                    fail(mw, "duplicate request in constraint");
                }
            }
            tmpl.claims.constraints.push_back(std::move(con));
        }
    }
    if (const json* config = find(j, "config")) {
        require_object(*config, where + ".config");
        for (auto it = config->begin(); it != config->end(); ++it) {
            tmpl.claims.config_payload.emplace(
                it.key(), as_string(*it, where + ".config." + it.key()));
        }
    }
    try {
        validate_claims(tmpl.claims);
    } catch (const ValidationError& e) {
        fail(where, e.what());
    }
    return tmpl;
}

LatencyDistribution parse_latency(const json& j, const std::string& where) {
    require_object(j, where);
    check_keys(j, {"constant", "uniform", "lognormal"}, where);
    if (j.size() != 1) {
        fail(where, "give exactly one of \"constant\", \"uniform\", \"lognormal\"");
    }
    if (const json* c = find(j, "constant")) {
        const double s = as_number(*c, where + ".constant");
        if (s < 0) fail(where + ".constant", "must be >= 0");
        return ConstantLatency{s};
    }
    if (const json* u = find(j, "uniform")) {
        require_object(*u, where + ".uniform");
        check_keys(*u, {"lo", "hi"}, where + ".uniform");
        UniformLatency lat;
        lat.lo = as_number(require(*u, "lo", where + ".uniform"), where + ".uniform.lo");
        lat.hi = as_number(require(*u, "hi", where + ".uniform"), where + ".uniform.hi");
        if (lat.lo < 0 || lat.hi < lat.lo) fail(where + ".uniform", "needs 0 <= lo <= hi");
        return lat;
    }
    const json& l = require(j, "lognormal", where);
    require_object(l, where + ".lognormal");
    check_keys(l, {"median", "sigma"}, where + ".lognormal");
    const double median =
        as_number(require(l, "median", where + ".lognormal"), where + ".lognormal.median");
    const double sigma =
        as_number(require(l, "sigma", where + ".lognormal"), where + ".lognormal.sigma");
    if (!(median > 0)) fail(where + ".lognormal.median", "must be > 0");
    if (sigma < 0) fail(where + ".lognormal.sigma", "must be >= 0");
    return LognormalLatency{std::log(median), sigma};
}

PipelineConfig parse_pipeline(const json& j, const std::string& where) {
    require_object(j, where);
    check_keys(j, {"kind", "overrides"}, where);
    PipelineConfig cfg;
    const std::string kind = as_string(require(j, "kind", where), where + ".kind");
    if (kind == pipeline_kind_name(PipelineKind::CniDaemon)) {
        cfg.kind = PipelineKind::CniDaemon;
    } else if (kind == pipeline_kind_name(PipelineKind::CniPlusDevicePlugin)) {
        cfg.kind = PipelineKind::CniPlusDevicePlugin;
    } else if (kind == pipeline_kind_name(PipelineKind::Knd)) {
        cfg.kind = PipelineKind::Knd;
    } else {
        fail(where + ".kind",
             "expected \"cni-daemon\", \"cni-device-plugin\", or \"knd\"");
    }
    if (const json* ovs = find(j, "overrides")) {
        require_array(*ovs, where + ".overrides");
        for (std::size_t i = 0; i < ovs->size(); ++i) {
            const std::string ow = where + ".overrides[" + std::to_string(i) + "]";
            const json& oj = (*ovs)[i];
            require_object(oj, ow);
            check_keys(oj, {"step", "latency"}, ow);
            PipelineOverride ov;
            ov.step_name = as_string(require(oj, "step", ow), ow + ".step");
            ov.latency = parse_latency(require(oj, "latency", ow), ow + ".latency");
            cfg.overrides.push_back(std::move(ov));
        }
    }
    try {
        cfg.resolve(); // rejects overrides naming steps the pipeline lacks
    } catch (const ValidationError& e) {
        fail(where + ".overrides", e.what());
    }
    return cfg;
}

FaultSpec parse_faults(const json& j, const std::string& where) {
    require_object(j, where);
    check_keys(j, {"daemonDown", "cniTimeoutS"}, where);
    FaultSpec faults;
    if (const json* d = find(j, "daemonDown")) {
        faults.daemon_down = as_bool(*d, where + ".daemonDown");
    }
    if (const json* t = find(j, "cniTimeoutS")) {
        faults.cni_timeout_s = as_number(*t, where + ".cniTimeoutS");
        if (!(faults.cni_timeout_s > 0)) fail(where + ".cniTimeoutS", "must be > 0");
    }
    return faults;
}

CollectiveKind parse_collective(const json& j, const std::string& where) {
    const std::string s = as_string(j, where);
    if (s == collective_name(CollectiveKind::AllGather)) return CollectiveKind::AllGather;
    if (s == collective_name(CollectiveKind::AllReduce)) return CollectiveKind::AllReduce;
    fail(where, "expected \"all_gather\" or \"all_reduce\"");
}

PerfParams parse_params_override(const json& j, CollectiveKind c, const std::string& where) {
    require_object(j, where);
    check_keys(j, {"peakBusbwGbs", "halfSaturationBytes", "jitterRel", "ranks"}, where);
    PerfParams params = default_perf_params(c);
    if (const json* p = find(j, "peakBusbwGbs")) {
        params.peak_busbw_gbs = as_triple(*p, where + ".peakBusbwGbs");
    }
    if (const json* h = find(j, "halfSaturationBytes")) {
        params.half_saturation_bytes[c] = as_number(*h, where + ".halfSaturationBytes");
    }
    if (const json* jr = find(j, "jitterRel")) {
        params.jitter_rel = as_triple(*jr, where + ".jitterRel");
    }
    if (const json* r = find(j, "ranks")) {
        params.ranks = static_cast<int>(as_int(*r, where + ".ranks"));
    }
    try {
        params.validate();
    } catch (const ValidationError& e) {
        fail(where, e.what());
    }
    return params;
}

PerfConfig parse_perf(const json& j, const std::string& where) {
    require_object(j, where);
    check_keys(j, {"collectives", "mode", "fixedNic", "sweep", "params"}, where);
    PerfConfig cfg;

    const json& collectives = require(j, "collectives", where);
    require_array(collectives, where + ".collectives");
    if (collectives.empty()) fail(where + ".collectives", "must not be empty");
    for (std::size_t i = 0; i < collectives.size(); ++i) {
        const CollectiveKind c =
            parse_collective(collectives[i], where + ".collectives[" + std::to_string(i) + "]");
        if (std::find(cfg.collectives.begin(), cfg.collectives.end(), c) != cfg.collectives.end()) {
            fail(where + ".collectives", "duplicate collective");
        }
        cfg.collectives.push_back(c);
    }

    const std::string mode = as_string(require(j, "mode", where), where + ".mode");
    if (mode == benchmark_mode_name(BenchmarkMode::Aligned)) {
        cfg.mode = BenchmarkMode::Aligned;
    } else if (mode == benchmark_mode_name(BenchmarkMode::UnalignedLottery)) {
        cfg.mode = BenchmarkMode::UnalignedLottery;
    } else {
        fail(where + ".mode", "expected \"aligned\" or \"unaligned_lottery\"");
    }

    if (const json* nic = find(j, "fixedNic")) {
        cfg.fixed_nic = as_name(*nic, where + ".fixedNic");
    }
    if (cfg.mode == BenchmarkMode::UnalignedLottery && cfg.fixed_nic.empty()) {
        fail(where, "unaligned_lottery mode requires \"fixedNic\"");
    }

    // The sweep block is optional; SweepConfig's defaults cover the full
    // 8 B .. 8 GiB doubling ladder.
    if (const json* sweep = find(j, "sweep")) {
        require_object(*sweep, where + ".sweep");
        check_keys(*sweep, {"beginBytes", "endBytes", "factor"}, where + ".sweep");
        if (const json* b = find(*sweep, "beginBytes")) {
            cfg.sweep.begin_bytes = as_uint(*b, where + ".sweep.beginBytes");
        }
        if (const json* e = find(*sweep, "endBytes")) {
            cfg.sweep.end_bytes = as_uint(*e, where + ".sweep.endBytes");
        }
        if (const json* f = find(*sweep, "factor")) {
            cfg.sweep.factor = as_uint(*f, where + ".sweep.factor");
        }
    }
    try {
        cfg.sweep.sizes();
    } catch (const ValidationError& e) {
        fail(where + ".sweep", e.what());
    }

    for (const CollectiveKind c : cfg.collectives) {
        cfg.params.emplace(c, default_perf_params(c));
    }
    if (const json* params = find(j, "params")) {
        require_object(*params, where + ".params");
        check_keys(*params, {"all_gather", "all_reduce"}, where + ".params");
        for (auto it = params->begin(); it != params->end(); ++it) {
            const CollectiveKind c = it.key() == "all_gather" ? CollectiveKind::AllGather
                                                              : CollectiveKind::AllReduce;
            if (cfg.params.count(c) == 0) {
                fail(where + ".params." + it.key(), "collective is not in \"collectives\"");
            }
            cfg.params.at(c) = parse_params_override(*it, c, where + ".params." + it.key());
        }
    }
    return cfg;
}

// Whole-scenario checks that need more than one section: name references
// across sections and the lottery-mode shape.
void cross_validate(const Scenario& s) {
    std::set<std::string> node_names;
    for (const auto& n : s.nodes) node_names.insert(n.node_name);

    std::set<std::string> pod_names;
    for (const auto& t : s.claims) {
        for (int i = 0; i < t.replicas; ++i) {
            std::string pod = t.claims.pod_name;
            if (t.replicas > 1) pod += "-" + std::to_string(i);
            if (!pod_names.insert(pod).second) {
                fail("scenario.claims", "pod name \"" + pod + "\" is not unique after expansion");
            }
        }
        if (t.node_pin && node_names.count(*t.node_pin) == 0) {
            fail("scenario.claims", "claim for pod \"" + t.claims.pod_name +
                                        "\" references unknown node \"" + *t.node_pin + "\"");
        }
    }

    if (!s.perf) return;
    const PerfConfig& perf = *s.perf;
    if (s.claims.empty()) {
        fail("scenario.perf", "bandwidth runs need at least one claim template");
    }
    if (perf.mode == BenchmarkMode::UnalignedLottery) {
        if (s.claims.size() != 1 || s.claims[0].replicas != 1) {
            fail("scenario.perf", "unaligned_lottery mode needs exactly one single-replica claim");
        }
        if (s.claims[0].node_pin) {
            fail("scenario.perf", "unaligned_lottery mode picks its own node; drop the node pin");
        }
        const auto& requests = s.claims[0].claims.requests;
        if (requests.size() != 2 || requests[0].count != 1 || requests[1].count != 1) {
            fail("scenario.perf", "unaligned_lottery mode needs exactly two count-1 requests");
        }
    }
    if (!perf.fixed_nic.empty()) {
        const DeviceDescriptor* dev = nullptr;
        for (const auto& n : s.nodes) {
            if (const DeviceDescriptor* d = n.find_device(perf.fixed_nic)) {
                dev = d;
                break;
            }
        }
        if (!dev) {
            fail("scenario.perf.fixedNic", "no node has a device named \"" + perf.fixed_nic + "\"");
        }
        if (dev->kind() != DeviceKind::Nic) {
            fail("scenario.perf.fixedNic", "\"" + perf.fixed_nic + "\" is not a nic");
        }
    }
}

} // namespace

Scenario parse_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("scenario JSON: ") + e.what());
    }
    const std::string where = "scenario";
    require_object(root, where);
    check_keys(root,
               {"name", "seed", "replications", "nodes", "claims", "pipeline", "faults", "perf"},
               where);

    Scenario s;
    s.name = as_name(require(root, "name", where), where + ".name");
    if (!find(root, "seed")) {
        fail(where, "seed required (every scenario pins its randomness)");
    }
    s.seed = as_uint(*find(root, "seed"), where + ".seed");
    s.replications =
        static_cast<std::size_t>(as_uint(require(root, "replications", where), where + ".replications"));
    if (s.replications < 1) fail(where + ".replications", "must be >= 1");

    const json& nodes = require(root, "nodes", where);
    require_array(nodes, where + ".nodes");
    if (nodes.empty()) fail(where + ".nodes", "must not be empty");
    std::set<std::string> node_names;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        NodeInventory inv = parse_node(nodes[i], where + ".nodes[" + std::to_string(i) + "]");
        if (!node_names.insert(inv.node_name).second) {
            fail(where + ".nodes", "duplicate node name \"" + inv.node_name + "\"");
        }
        s.nodes.push_back(std::move(inv));
    }

    const json& claims = require(root, "claims", where);
    require_array(claims, where + ".claims");
    for (std::size_t i = 0; i < claims.size(); ++i) {
        s.claims.push_back(parse_claim(claims[i], where + ".claims[" + std::to_string(i) + "]"));
    }

    s.pipeline = parse_pipeline(require(root, "pipeline", where), where + ".pipeline");
    if (const json* faults = find(root, "faults")) {
        s.faults = parse_faults(*faults, where + ".faults");
    }
    if (const json* perf = find(root, "perf")) {
        s.perf = parse_perf(*perf, where + ".perf");
    }

    cross_validate(s);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open scenario file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IoError("failed reading scenario file '" + path + "'");
    }
    try {
        return parse_scenario(buf.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

} // namespace knd
