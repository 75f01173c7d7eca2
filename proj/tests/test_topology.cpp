#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>

#include "knd/rng.hpp"
#include "knd/topology.hpp"

using namespace knd;

namespace {

AttributeMap gpu_attrs(const std::string& root, std::int64_t numa) {
    AttributeMap m;
    m.emplace("pciRoot", AttributeValue::text(root));
    m.emplace("numaNode", AttributeValue::integer(numa));
    return m;
}

AttributeMap nic_attrs(const std::string& root, std::int64_t numa, bool rdma = true) {
    AttributeMap m = gpu_attrs(root, numa);
    m.emplace("rdma", AttributeValue::flag(rdma));
    return m;
}

} // namespace

TEST_CASE("name tables") {
    CHECK(std::string(device_kind_name(DeviceKind::Gpu)) == "gpu");
    CHECK(std::string(device_kind_name(DeviceKind::Nic)) == "nic");
    CHECK(std::string(distance_class_name(DistanceClass::SamePciRoot)) == "same_pci_root");
    CHECK(std::string(distance_class_name(DistanceClass::SameNumaCrossRoot)) ==
          "same_numa_cross_root");
    CHECK(std::string(distance_class_name(DistanceClass::CrossNuma)) == "cross_numa");
    CHECK(static_cast<int>(DistanceClass::SamePciRoot) < static_cast<int>(DistanceClass::SameNumaCrossRoot));
    CHECK(static_cast<int>(DistanceClass::SameNumaCrossRoot) < static_cast<int>(DistanceClass::CrossNuma));
}

TEST_CASE("preset inventory shape") {
    const NodeInventory inv = build_preset_node(NodePreset::A4HighGpu8g, "node-a");
    CHECK(inv.node_name == "node-a");
    REQUIRE(inv.devices.size() == 16);

    std::set<std::string> names;
    for (const auto& d : inv.devices) {
        names.insert(d.name());
    }
    CHECK(names.size() == 16);

    for (int i = 0; i < 8; ++i) {
        const DeviceDescriptor* gpu = inv.find_device("gpu" + std::to_string(i));
        const DeviceDescriptor* nic = inv.find_device("rdma" + std::to_string(i));
        REQUIRE(gpu != nullptr);
        REQUIRE(nic != nullptr);
        CHECK(gpu->kind() == DeviceKind::Gpu);
        CHECK(nic->kind() == DeviceKind::Nic);
        CHECK(gpu->pci_root() == "pci-root" + std::to_string(i));
        CHECK(nic->pci_root() == gpu->pci_root());
        const std::int64_t numa = i < 4 ? 0 : 1;
        CHECK(gpu->numa_node() == numa);
        CHECK(nic->numa_node() == numa);
        const AttributeValue* rdma = nic->find_attribute("rdma");
        REQUIRE(rdma != nullptr);
        CHECK(rdma->is_flag());
        CHECK(rdma->as_flag());
        CHECK(gpu->find_attribute("rdma") == nullptr);
    }
    CHECK(inv.find_device("gpu8") == nullptr);
}

TEST_CASE("preset distances against index arithmetic") {
    // Oracle: gpuI vs rdmaJ is SamePciRoot iff i == j, SameNumaCrossRoot iff
    // i and j fall on the same side of the 0-3 / 4-7 split, else CrossNuma.
    const NodeInventory inv = build_preset_node(NodePreset::A4HighGpu8g, "node-a");
    for (int i = 0; i < 8; ++i) {
        for (int j = 0; j < 8; ++j) {
            const DeviceDescriptor* gpu = inv.find_device("gpu" + std::to_string(i));
            const DeviceDescriptor* nic = inv.find_device("rdma" + std::to_string(j));
            DistanceClass want = DistanceClass::CrossNuma;
            if (i == j) {
                want = DistanceClass::SamePciRoot;
            } else if ((i < 4) == (j < 4)) {
                want = DistanceClass::SameNumaCrossRoot;
            }
            CHECK(topology_distance(*gpu, *nic) == want);
            CHECK(topology_distance(*nic, *gpu) == want);
        }
    }
}

TEST_CASE("distance is symmetric on random attribute pairs") {
    Rng rng(2024);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto root = [&] { return "r" + std::to_string(rng.uniform_index(3)); };
        const auto numa = [&] { return static_cast<std::int64_t>(rng.uniform_index(2)); };
        const DeviceDescriptor a =
            DeviceDescriptor::create("a", DeviceKind::Gpu, gpu_attrs(root(), numa()));
        const DeviceDescriptor b =
            DeviceDescriptor::create("b", DeviceKind::Nic, nic_attrs(root(), numa()));
        const DistanceClass ab = topology_distance(a, b);
        CHECK(ab == topology_distance(b, a));
        if (a.pci_root() == b.pci_root()) {
            CHECK(ab == DistanceClass::SamePciRoot);
        } else if (a.numa_node() == b.numa_node()) {
            CHECK(ab == DistanceClass::SameNumaCrossRoot);
        } else {
            CHECK(ab == DistanceClass::CrossNuma);
        }
    }
}

TEST_CASE("device construction validates required attributes") {
    CHECK_THROWS_AS(DeviceDescriptor::create("g", DeviceKind::Gpu, AttributeMap{}),
                    ValidationError);

    AttributeMap no_root;
    no_root.emplace("numaNode", AttributeValue::integer(0));
    CHECK_THROWS_AS(DeviceDescriptor::create("g", DeviceKind::Gpu, no_root), ValidationError);

    AttributeMap root_wrong_kind;
    root_wrong_kind.emplace("pciRoot", AttributeValue::integer(3));
    root_wrong_kind.emplace("numaNode", AttributeValue::integer(0));
    CHECK_THROWS_AS(DeviceDescriptor::create("g", DeviceKind::Gpu, root_wrong_kind),
                    ValidationError);

    AttributeMap negative_numa;
    negative_numa.emplace("pciRoot", AttributeValue::text("r0"));
    negative_numa.emplace("numaNode", AttributeValue::integer(-1));
    CHECK_THROWS_AS(DeviceDescriptor::create("g", DeviceKind::Gpu, negative_numa),
                    ValidationError);

    AttributeMap numa_wrong_kind;
    numa_wrong_kind.emplace("pciRoot", AttributeValue::text("r0"));
    numa_wrong_kind.emplace("numaNode", AttributeValue::text("zero"));
    CHECK_THROWS_AS(DeviceDescriptor::create("g", DeviceKind::Gpu, numa_wrong_kind),
                    ValidationError);

    // NICs additionally need the rdma flag; GPUs do not.
    CHECK_THROWS_AS(DeviceDescriptor::create("n", DeviceKind::Nic, gpu_attrs("r0", 0)),
                    ValidationError);
    AttributeMap rdma_wrong_kind = gpu_attrs("r0", 0);
    rdma_wrong_kind.emplace("rdma", AttributeValue::integer(1));
    CHECK_THROWS_AS(DeviceDescriptor::create("n", DeviceKind::Nic, rdma_wrong_kind),
                    ValidationError);
    CHECK_NOTHROW(DeviceDescriptor::create("g", DeviceKind::Gpu, gpu_attrs("r0", 0)));
    CHECK_NOTHROW(DeviceDescriptor::create("n", DeviceKind::Nic, nic_attrs("r0", 0, false)));

    CHECK_THROWS_AS(DeviceDescriptor::create("", DeviceKind::Gpu, gpu_attrs("r0", 0)),
                    ValidationError);
}

TEST_CASE("node inventory rejects duplicates and empty names") {
    std::vector<DeviceDescriptor> devs;
    devs.push_back(DeviceDescriptor::create("d0", DeviceKind::Gpu, gpu_attrs("r0", 0)));
    devs.push_back(DeviceDescriptor::create("d0", DeviceKind::Gpu, gpu_attrs("r1", 0)));
    CHECK_THROWS_AS(NodeInventory::create("n", devs), ValidationError);
    CHECK_THROWS_AS(NodeInventory::create("", {devs[0]}), ValidationError);

    const NodeInventory ok = NodeInventory::create("n", {devs[0]});
    CHECK(ok.find_device("d0") != nullptr);
    CHECK(ok.find_device("d1") == nullptr);
}

TEST_CASE("build_node mirrors the node description it is given") {
    NodeTopologySpec spec;
    spec.node_name = "custom";
    spec.devices.push_back({"g0", DeviceKind::Gpu, gpu_attrs("r0", 0)});
    spec.devices.push_back({"n0", DeviceKind::Nic, nic_attrs("r0", 0)});
    const NodeInventory inv = build_node(spec);
    CHECK(inv.node_name == "custom");
    REQUIRE(inv.devices.size() == 2);
    CHECK(inv.devices[0].name() == "g0");
    CHECK(inv.devices[1].name() == "n0");
    CHECK(topology_distance(inv.devices[0], inv.devices[1]) == DistanceClass::SamePciRoot);

    // A spec equivalent to the preset builds the identical inventory.
    NodeTopologySpec like_preset;
    like_preset.node_name = "node-a";
    for (int i = 0; i < 8; ++i) {
        const std::string root = "pci-root" + std::to_string(i);
        const std::int64_t numa = i < 4 ? 0 : 1;
        like_preset.devices.push_back({"gpu" + std::to_string(i), DeviceKind::Gpu,
                                       gpu_attrs(root, numa)});
    }
    for (int i = 0; i < 8; ++i) {
        const std::string root = "pci-root" + std::to_string(i);
        const std::int64_t numa = i < 4 ? 0 : 1;
        like_preset.devices.push_back({"rdma" + std::to_string(i), DeviceKind::Nic,
                                       nic_attrs(root, numa)});
    }
    const NodeInventory from_spec = build_node(like_preset);
    const NodeInventory from_preset = build_preset_node(NodePreset::A4HighGpu8g, "node-a");
    REQUIRE(from_spec.devices.size() == from_preset.devices.size());
    CHECK(from_spec.node_name == from_preset.node_name);
    for (std::size_t i = 0; i < from_spec.devices.size(); ++i) {
        CHECK(from_spec.devices[i] == from_preset.devices[i]);
    }
}

TEST_CASE("publish_slices emits one slice preserving order") {
    const NodeInventory inv = build_preset_node(NodePreset::A4HighGpu8g, "node-a");
    const auto slices = publish_slices(inv, "knd.example.com");
    REQUIRE(slices.size() == 1);
    CHECK(slices[0].node_name == "node-a");
    CHECK(slices[0].driver == "knd.example.com");
    REQUIRE(slices[0].devices.size() == inv.devices.size());
    for (std::size_t i = 0; i < inv.devices.size(); ++i) {
        CHECK(slices[0].devices[i] == inv.devices[i]);
    }
}
