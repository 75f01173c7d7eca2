#ifndef KND_TOPOLOGY_HPP
#define KND_TOPOLOGY_HPP

#include <string>
#include <vector>

#include "knd/attributes.hpp"

namespace knd {

enum class DeviceKind { Gpu, Nic };

const char* device_kind_name(DeviceKind k); // "gpu" / "nic"

// Locality between two devices, ordered from closest to farthest.
enum class DistanceClass { SamePciRoot = 0, SameNumaCrossRoot = 1, CrossNuma = 2 };

const char* distance_class_name(DistanceClass d);

// One allocatable device. Construction validates the required attributes:
// "pciRoot" (text) and "numaNode" (integer >= 0) always, "rdma" (flag) for NICs.
class DeviceDescriptor {
public:
    static DeviceDescriptor create(std::string name, DeviceKind kind, AttributeMap attributes);

    const std::string& name() const { return name_; }
    DeviceKind kind() const { return kind_; }
    const AttributeMap& attributes() const { return attributes_; }

    const AttributeValue* find_attribute(const std::string& key) const;

    const std::string& pci_root() const;
    std::int64_t numa_node() const;

    friend bool operator==(const DeviceDescriptor& a, const DeviceDescriptor& b) {
        return a.name_ == b.name_ && a.kind_ == b.kind_ && a.attributes_ == b.attributes_;
    }

private:
    DeviceDescriptor(std::string name, DeviceKind kind, AttributeMap attributes)
        : name_(std::move(name)), kind_(kind), attributes_(std::move(attributes)) {}

    std::string name_;
    DeviceKind kind_;
    AttributeMap attributes_;
};

// A node's full device inventory. Device names are pairwise distinct.
struct NodeInventory {
    std::string node_name;
    std::vector<DeviceDescriptor> devices;

    static NodeInventory create(std::string node_name, std::vector<DeviceDescriptor> devices);

    const DeviceDescriptor* find_device(const std::string& name) const;
};

// Published per-(node, driver) inventory. Pure data.
struct ResourceSlice {
    std::string node_name;
    std::string driver;
    std::vector<DeviceDescriptor> devices;
};

// Scenario-file-side description of a node; build_node validates it into a
// NodeInventory.
struct DeviceSpec {
    std::string name;
    DeviceKind kind = DeviceKind::Gpu;
    AttributeMap attributes;
};

struct NodeTopologySpec {
    std::string node_name;
    std::vector<DeviceSpec> devices;
};

enum class NodePreset { A4HighGpu8g };

// 8 GPUs + 8 RDMA NICs; gpuK and rdmaK share "pci-rootK"; devices 0-3 sit on
// NUMA node 0 and 4-7 on NUMA node 1. The NUMA split is synthetic (the
// reference machine publishes only the PCI pairing) and exists to exercise
// the SameNumaCrossRoot tier; do not treat it as hardware ground truth.
NodeInventory build_preset_node(NodePreset preset, const std::string& node_name);

NodeInventory build_node(const NodeTopologySpec& spec);

// Single-slice policy: one ResourceSlice per (node, driver) holding every
// device, preserving inventory order.
std::vector<ResourceSlice> publish_slices(const NodeInventory& inv, const std::string& driver);

// SamePciRoot iff equal pciRoot, else SameNumaCrossRoot iff equal numaNode,
// else CrossNuma. Symmetric.
DistanceClass topology_distance(const DeviceDescriptor& a, const DeviceDescriptor& b);

} // namespace knd

#endif // KND_TOPOLOGY_HPP
