#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <variant>

#include <json.hpp>

#include "knd/errors.hpp"
#include "knd/scenario.hpp"

using namespace knd;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) {
    return std::string(KND_SCENARIO_DIR) + "/" + name;
}

// Minimal valid scenario the error matrix mutates.
json base_scenario() {
    return json::parse(R"({
        "name": "base",
        "seed": 1,
        "replications": 2,
        "nodes": [{ "name": "node-a", "preset": "a4-highgpu-8g" }],
        "claims": [{
            "pod": "p",
            "requests": [
                { "name": "gpu", "selector": "device.kind == \"gpu\"" },
                { "name": "nic", "selector": "device.attributes[\"rdma\"] == true" }
            ]
        }],
        "pipeline": { "kind": "knd" }
    })");
}

// Expect parse_scenario to reject the document with the exact message.
void rejected(const json& doc, const std::string& message) {
    CAPTURE(doc.dump());
    CAPTURE(message);
    try {
        parse_scenario(doc.dump());
        FAIL_CHECK("expected ValidationError: " << message);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()) == message);
    }
}

} // namespace

TEST_CASE("shipped scenarios load") {
    for (const char* name :
         {"aligned-a4.json", "unaligned-a4.json", "cni-baseline.json", "daemon-down.json"}) {
        CAPTURE(name);
        CHECK_NOTHROW(load_scenario(fixture(name)));
    }
}

TEST_CASE("the aligned benchmark scenario parses into the expected shape") {
    const Scenario s = load_scenario(fixture("aligned-a4.json"));
    CHECK(s.name == "aligned-a4");
    CHECK(s.seed == 42);
    CHECK(s.replications == 100);
    REQUIRE(s.nodes.size() == 1);
    CHECK(s.nodes[0].node_name == "node-a");
    CHECK(s.nodes[0].devices.size() == 16);

    REQUIRE(s.claims.size() == 1);
    const ClaimTemplate& t = s.claims[0];
    CHECK(t.claims.pod_name == "bench");
    CHECK(t.replicas == 1);
    CHECK_FALSE(t.node_pin.has_value());
    REQUIRE(t.claims.requests.size() == 2);
    CHECK(t.claims.requests[0].request_name == "gpu");
    CHECK(t.claims.requests[0].count == 1);
    REQUIRE(t.claims.constraints.size() == 1);
    CHECK(t.claims.constraints[0].attribute_key == "pciRoot");
    CHECK(t.claims.constraints[0].request_names == std::set<std::string>{"gpu", "nic"});
    CHECK(t.claims.config_payload.at("nic") == "mtu=4200;queues=8");

    CHECK(s.pipeline.kind == PipelineKind::Knd);
    CHECK(s.pipeline.overrides.empty());
    CHECK(s.pipeline.resolve().size() == 4);
    CHECK_FALSE(s.faults.daemon_down);

    REQUIRE(s.perf.has_value());
    CHECK(s.perf->mode == BenchmarkMode::Aligned);
    CHECK(s.perf->collectives ==
          std::vector<CollectiveKind>{CollectiveKind::AllGather, CollectiveKind::AllReduce});
    CHECK(s.perf->sweep.sizes().size() == 31);
    // Defaults are materialized for every listed collective.
    CHECK(s.perf->params.at(CollectiveKind::AllGather).peak(DistanceClass::SamePciRoot) == 46.59);
    CHECK(s.perf->params.at(CollectiveKind::AllReduce).peak(DistanceClass::SamePciRoot) == 46.93);

    const Scenario lottery = load_scenario(fixture("unaligned-a4.json"));
    REQUIRE(lottery.perf.has_value());
    CHECK(lottery.perf->mode == BenchmarkMode::UnalignedLottery);
    CHECK(lottery.perf->fixed_nic == "rdma0");
    CHECK(lottery.pipeline.kind == PipelineKind::CniPlusDevicePlugin);

    const Scenario down = load_scenario(fixture("daemon-down.json"));
    CHECK(down.faults.daemon_down);
    CHECK(down.faults.cni_timeout_s == 30.0);
    CHECK_FALSE(down.perf.has_value());
}

TEST_CASE("missing file and malformed json") {
    CHECK_THROWS_AS(load_scenario(fixture("absent.json")), IoError);
    try {
        parse_scenario("{ not json");
        FAIL_CHECK("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).rfind("scenario JSON: ", 0) == 0);
    }
    rejected(json::array(), "scenario: expected an object");
}

TEST_CASE("top-level structure errors") {
    json j = base_scenario();
    j["extra"] = 1;
    rejected(j, "scenario: unknown key \"extra\"");

    j = base_scenario();
    j.erase("seed");
    rejected(j, "scenario: seed required (every scenario pins its randomness)");

    j = base_scenario();
    j["seed"] = -3;
    rejected(j, "scenario.seed: expected a non-negative integer");

    j = base_scenario();
    j.erase("name");
    rejected(j, "scenario: missing required key \"name\"");

    j = base_scenario();
    j["name"] = "has,comma";
    rejected(j, "scenario.name: names must not contain commas, quotes, or line breaks");

    j = base_scenario();
    j["replications"] = 0;
    rejected(j, "scenario.replications: must be >= 1");

    j = base_scenario();
    j["nodes"] = json::array();
    rejected(j, "scenario.nodes: must not be empty");

    j = base_scenario();
    j["nodes"].push_back(j["nodes"][0]);
    rejected(j, "scenario.nodes: duplicate node name \"node-a\"");

    // The largest representable seed survives the trip.
    j = base_scenario();
    j["seed"] = 18446744073709551615ull;
    CHECK(parse_scenario(j.dump()).seed == 18446744073709551615ull);
}

TEST_CASE("node parsing errors") {
    json j = base_scenario();
    j["nodes"][0] = {{"name", "node-a"}};
    rejected(j, "scenario.nodes[0]: give exactly one of \"preset\" or \"devices\"");

    j = base_scenario();
    j["nodes"][0]["devices"] = json::array({{{"name", "g0"},
                                             {"kind", "gpu"},
                                             {"pciRoot", "r0"},
                                             {"numaNode", 0}}});
    rejected(j, "scenario.nodes[0]: give exactly one of \"preset\" or \"devices\"");

    j = base_scenario();
    j["nodes"][0]["preset"] = "dgx-1";
    rejected(j, "scenario.nodes[0].preset: unknown preset \"dgx-1\"");

    j = base_scenario();
    j["nodes"][0] = {{"name", "node-a"}, {"devices", json::array()}};
    rejected(j, "scenario.nodes[0].devices: must not be empty");

    // Custom devices: every non-name/kind key is an attribute; floats have no
    // attribute representation.
    j = base_scenario();
    j["nodes"][0] = {{"name", "node-a"},
                     {"devices", json::array({{{"name", "g0"},
                                               {"kind", "gpu"},
                                               {"pciRoot", "r0"},
                                               {"numaNode", 0},
                                               {"weight", 1.5}}})}};
    rejected(j, "scenario.nodes[0].devices[0].weight: "
                "attribute values must be strings, integers, or booleans");

    j = base_scenario();
    j["nodes"][0] = {{"name", "node-a"},
                     {"devices", json::array({{{"name", "g0"},
                                               {"kind", "cpu"},
                                               {"pciRoot", "r0"},
                                               {"numaNode", 0}}})}};
    rejected(j, "scenario.nodes[0].devices[0].kind: expected \"gpu\" or \"nic\"");

    // Inventory-level validation is re-anchored at the node position.
    j = base_scenario();
    j["nodes"][0] = {{"name", "node-a"},
                     {"devices", json::array({{{"name", "n0"},
                                               {"kind", "nic"},
                                               {"pciRoot", "r0"},
                                               {"numaNode", 0}}})}};
    try {
        parse_scenario(j.dump());
        FAIL_CHECK("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).rfind("scenario.nodes[0]: ", 0) == 0);
    }

    // A full custom node round-trips attribute kinds faithfully.
    j = base_scenario();
    j["nodes"][0] = {{"name", "node-a"},
                     {"devices", json::array({{{"name", "g0"},
                                               {"kind", "gpu"},
                                               {"pciRoot", "r0"},
                                               {"numaNode", 0},
                                               {"model", "h100"},
                                               {"healthy", true},
                                               {"cap", 7}}})}};
    const Scenario s = parse_scenario(j.dump());
    const DeviceDescriptor& d = s.nodes[0].devices[0];
    CHECK(d.find_attribute("model")->as_text() == "h100");
    CHECK(d.find_attribute("healthy")->as_flag());
    CHECK(d.find_attribute("cap")->as_integer() == 7);
}

TEST_CASE("claim parsing errors") {
    json j = base_scenario();
    j["claims"][0]["replicas"] = 0;
    rejected(j, "scenario.claims[0].replicas: must be >= 1");

    j = base_scenario();
    j["claims"][0]["requests"][0]["count"] = 0;
    rejected(j, "scenario.claims[0].requests[0].count: must be >= 1");

    j = base_scenario();
    j["claims"][0]["requests"][0]["selector"] = "device.kind == ";
    try {
        parse_scenario(j.dump());
        FAIL_CHECK("expected ValidationError");
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        CHECK(what.rfind("scenario.claims[0].requests[0].selector: bad selector: ", 0) == 0);
        CHECK(what.find("at offset") != std::string::npos);
    }

    j = base_scenario();
    j["claims"][0]["constraints"] =
        json::array({{{"matchAttribute", "pciRoot"}, {"requests", json::array({"gpu", "gpu"})}}});
    rejected(j, "scenario.claims[0].constraints[0].requests[1]: duplicate request in constraint");

    // Claim-level validation surfaces at the claim position.
    j = base_scenario();
    j["claims"][0]["requests"][1]["name"] = "gpu";
    rejected(j, "scenario.claims[0]: duplicate request name 'gpu'");

    j = base_scenario();
    j["claims"][0]["config"] = {{"q-missing", "x"}};
    rejected(j, "scenario.claims[0]: config payload references unknown request 'q-missing'");

    // Cross-validation: pod names after replica expansion, node pins.
    j = base_scenario();
    j["claims"][0]["node"] = "node-b";
    rejected(j, "scenario.claims: claim for pod \"p\" references unknown node \"node-b\"");

    j = base_scenario();
    j["claims"][0]["node"] = "node-a";
    CHECK(parse_scenario(j.dump()).claims[0].node_pin == "node-a");

    j = base_scenario();
    j["claims"].push_back(j["claims"][0]);
    rejected(j, "scenario.claims: pod name \"p\" is not unique after expansion");

    // Replicated pods collide with an explicitly named sibling.
    j = base_scenario();
    j["claims"][0]["replicas"] = 2;
    json other = j["claims"][0];
    other["pod"] = "p-1";
    other["replicas"] = 1;
    j["claims"].push_back(other);
    rejected(j, "scenario.claims: pod name \"p-1\" is not unique after expansion");
}

TEST_CASE("pipeline parsing") {
    json j = base_scenario();
    j["pipeline"]["kind"] = "sidecar";
    rejected(j, "scenario.pipeline.kind: "
                "expected \"cni-daemon\", \"cni-device-plugin\", or \"knd\"");

    j = base_scenario();
    j.erase("pipeline");
    rejected(j, "scenario: missing required key \"pipeline\"");

    j = base_scenario();
    j["pipeline"]["overrides"] =
        json::array({{{"step", "warp-drive"}, {"latency", {{"constant", 1.0}}}}});
    rejected(j, "scenario.pipeline.overrides: "
                "pipeline override references unknown step 'warp-drive' in pipeline 'knd'");

    j = base_scenario();
    j["pipeline"]["overrides"] =
        json::array({{{"step", "schedule-with-claims"}, {"latency", {{"constant", 9.5}}}}});
    const Scenario s = parse_scenario(j.dump());
    const auto steps = s.pipeline.resolve();
    REQUIRE(steps.size() == 4);
    const auto* constant = std::get_if<ConstantLatency>(&steps[0].latency);
    REQUIRE(constant != nullptr);
    CHECK(constant->seconds == 9.5);
    // Untouched steps keep their stock distributions.
    CHECK(std::get_if<LognormalLatency>(&steps[1].latency) != nullptr);
}

TEST_CASE("latency parsing") {
    const auto with_latency = [](json latency) {
        json j = base_scenario();
        j["pipeline"]["overrides"] =
            json::array({{{"step", "schedule-with-claims"}, {"latency", std::move(latency)}}});
        return j;
    };

    rejected(with_latency(json::object()),
             "scenario.pipeline.overrides[0].latency: "
             "give exactly one of \"constant\", \"uniform\", \"lognormal\"");
    rejected(with_latency({{"constant", 1.0}, {"uniform", {{"lo", 0.0}, {"hi", 1.0}}}}),
             "scenario.pipeline.overrides[0].latency: "
             "give exactly one of \"constant\", \"uniform\", \"lognormal\"");
    rejected(with_latency({{"constant", -0.5}}),
             "scenario.pipeline.overrides[0].latency.constant: must be >= 0");
    rejected(with_latency({{"uniform", {{"lo", 2.0}, {"hi", 1.0}}}}),
             "scenario.pipeline.overrides[0].latency.uniform: needs 0 <= lo <= hi");
    rejected(with_latency({{"lognormal", {{"median", 0.0}, {"sigma", 0.1}}}}),
             "scenario.pipeline.overrides[0].latency.lognormal.median: must be > 0");
    rejected(with_latency({{"lognormal", {{"median", 1.0}, {"sigma", -0.1}}}}),
             "scenario.pipeline.overrides[0].latency.lognormal.sigma: must be >= 0");

    // The lognormal "median" knob is the distribution median, not the mu
    // parameter.
    const Scenario s =
        parse_scenario(with_latency({{"lognormal", {{"median", 2.0}, {"sigma", 0.0}}}}).dump());
    Rng rng(1);
    CHECK(sample_latency(s.pipeline.resolve()[0].latency, rng) == doctest::Approx(2.0));
}

TEST_CASE("fault parsing") {
    json j = base_scenario();
    j["faults"] = {{"daemonDown", true}, {"cniTimeoutS", 12.5}};
    const Scenario s = parse_scenario(j.dump());
    CHECK(s.faults.daemon_down);
    CHECK(s.faults.cni_timeout_s == 12.5);

    j["faults"]["cniTimeoutS"] = 0.0;
    rejected(j, "scenario.faults.cniTimeoutS: must be > 0");

    j = base_scenario();
    j["faults"] = {{"surprise", 1}};
    rejected(j, "scenario.faults: unknown key \"surprise\"");
}

TEST_CASE("perf parsing") {
    const auto with_perf = [](json perf) {
        json j = base_scenario();
        j["perf"] = std::move(perf);
        return j;
    };

    rejected(with_perf({{"collectives", json::array()}, {"mode", "aligned"}}),
             "scenario.perf.collectives: must not be empty");
    rejected(with_perf({{"collectives", {"all_gather", "all_gather"}}, {"mode", "aligned"}}),
             "scenario.perf.collectives: duplicate collective");
    rejected(with_perf({{"collectives", {"broadcast"}}, {"mode", "aligned"}}),
             "scenario.perf.collectives[0]: expected \"all_gather\" or \"all_reduce\"");
    rejected(with_perf({{"collectives", {"all_gather"}}, {"mode", "ring"}}),
             "scenario.perf.mode: expected \"aligned\" or \"unaligned_lottery\"");
    rejected(with_perf({{"collectives", {"all_gather"}}, {"mode", "unaligned_lottery"}}),
             "scenario.perf: unaligned_lottery mode requires \"fixedNic\"");
    rejected(with_perf({{"collectives", {"all_gather"}},
                        {"mode", "aligned"},
                        {"sweep", {{"beginBytes", 8}, {"endBytes", 4}, {"factor", 2}}}}),
             "scenario.perf.sweep: size sweep needs 1 <= begin <= end and factor >= 2");
    rejected(with_perf({{"collectives", {"all_gather"}},
                        {"mode", "aligned"},
                        {"sweep", {{"beginBytes", 8}, {"endBytes", 64}, {"factor", 1}}}}),
             "scenario.perf.sweep: size sweep needs 1 <= begin <= end and factor >= 2");
    rejected(with_perf({{"collectives", {"all_gather"}},
                        {"mode", "aligned"},
                        {"params", {{"all_reduce", {{"ranks", 4}}}}}}),
             "scenario.perf.params.all_reduce: collective is not in \"collectives\"");

    // Parameter overrides pass through PerfParams::validate.
    json bad_peaks = with_perf(
        {{"collectives", {"all_gather"}},
         {"mode", "aligned"},
         {"params", {{"all_gather", {{"peakBusbwGbs", {30.0, 30.0, 10.0}}}}}}});
    try {
        parse_scenario(bad_peaks.dump());
        FAIL_CHECK("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).rfind("scenario.perf.params.all_gather: ", 0) == 0);
    }

    json good = with_perf({{"collectives", {"all_gather"}},
                           {"mode", "aligned"},
                           {"params", {{"all_gather", {{"ranks", 4},
                                                       {"jitterRel", {0.001, 0.01, 0.02}}}}}}});
    const Scenario s = parse_scenario(good.dump());
    REQUIRE(s.perf.has_value());
    const PerfParams& p = s.perf->params.at(CollectiveKind::AllGather);
    CHECK(p.ranks == 4);
    CHECK(p.jitter(DistanceClass::SamePciRoot) == 0.001);
    // Unoverridden fields keep the calibrated defaults.
    CHECK(p.peak(DistanceClass::SamePciRoot) == 46.59);

    // Lottery-mode cross-validation.
    json lottery = with_perf({{"collectives", {"all_gather"}},
                              {"mode", "unaligned_lottery"},
                              {"fixedNic", "rdma0"}});
    CHECK_NOTHROW(parse_scenario(lottery.dump()));

    json bad_nic = lottery;
    bad_nic["perf"]["fixedNic"] = "rdma99";
    rejected(bad_nic, "scenario.perf.fixedNic: no node has a device named \"rdma99\"");

    json not_nic = lottery;
    not_nic["perf"]["fixedNic"] = "gpu0";
    rejected(not_nic, "scenario.perf.fixedNic: \"gpu0\" is not a nic");

    json pinned = lottery;
    pinned["claims"][0]["node"] = "node-a";
    rejected(pinned, "scenario.perf: unaligned_lottery mode picks its own node; drop the node pin");

    json replicated = lottery;
    replicated["claims"][0]["replicas"] = 2;
    rejected(replicated, "scenario.perf: unaligned_lottery mode needs exactly one single-replica claim");

    json three_requests = lottery;
    three_requests["claims"][0]["requests"].push_back(
        {{"name", "extra"}, {"selector", "device.kind == \"gpu\""}});
    rejected(three_requests, "scenario.perf: unaligned_lottery mode needs exactly two count-1 requests");

    json no_claims = with_perf({{"collectives", {"all_gather"}}, {"mode", "aligned"}});
    no_claims["claims"] = json::array();
    rejected(no_claims, "scenario.perf: bandwidth runs need at least one claim template");
}
