#include "knd/topology.hpp"

#include <set>

namespace knd {

const char* attribute_kind_name(AttributeValue::Kind k) {
    switch (k) {
    case AttributeValue::Kind::Text: return "text";
    case AttributeValue::Kind::Integer: return "integer";
    case AttributeValue::Kind::Flag: return "flag";
    }
    return "?";
}

const char* device_kind_name(DeviceKind k) {
    return k == DeviceKind::Gpu ? "gpu" : "nic";
}

const char* distance_class_name(DistanceClass d) {
    switch (d) {
    case DistanceClass::SamePciRoot: return "same_pci_root";
    case DistanceClass::SameNumaCrossRoot: return "same_numa_cross_root";
    case DistanceClass::CrossNuma: return "cross_numa";
    }
    return "?";
}

namespace {

const AttributeValue& require_attribute(const AttributeMap& attrs, const std::string& device,
                                        const std::string& key, AttributeValue::Kind kind) {
    auto it = attrs.find(key);
    if (it == attrs.end()) {
        throw ValidationError("device '" + device + "' is missing required attribute '" + key + "'");
    }
    if (it->second.kind() != kind) {
        throw ValidationError("device '" + device + "' attribute '" + key + "' must be " +
                              attribute_kind_name(kind) + ", got " +
                              attribute_kind_name(it->second.kind()));
    }
    return it->second;
}

} // namespace

DeviceDescriptor DeviceDescriptor::create(std::string name, DeviceKind kind, AttributeMap attributes) {
    if (name.empty()) {
        throw ValidationError("device name must be non-empty");
    }
    require_attribute(attributes, name, "pciRoot", AttributeValue::Kind::Text);
    const auto& numa = require_attribute(attributes, name, "numaNode", AttributeValue::Kind::Integer);
    if (numa.as_integer() < 0) {
        throw ValidationError("device '" + name + "' numaNode must be >= 0");
    }
    if (kind == DeviceKind::Nic) {
        require_attribute(attributes, name, "rdma", AttributeValue::Kind::Flag);
    }
    return DeviceDescriptor(std::move(name), kind, std::move(attributes));
}

const AttributeValue* DeviceDescriptor::find_attribute(const std::string& key) const {
    auto it = attributes_.find(key);
    return it == attributes_.end() ? nullptr : &it->second;
}

const std::string& DeviceDescriptor::pci_root() const {
    const auto* v = find_attribute("pciRoot");
    if (v == nullptr || !v->is_text()) {
        throw ValidationError("device '" + name_ + "' is missing required attribute 'pciRoot'");
    }
    return v->as_text();
}

std::int64_t DeviceDescriptor::numa_node() const {
    const auto* v = find_attribute("numaNode");
    if (v == nullptr || !v->is_integer()) {
        throw ValidationError("device '" + name_ + "' is missing required attribute 'numaNode'");
    }
    return v->as_integer();
}

NodeInventory NodeInventory::create(std::string node_name, std::vector<DeviceDescriptor> devices) {
    if (node_name.empty()) {
        throw ValidationError("node name must be non-empty");
    }
    std::set<std::string> seen;
    for (const auto& d : devices) {
        if (!seen.insert(d.name()).second) {
            throw ValidationError("node '" + node_name + "' has duplicate device name '" + d.name() + "'");
        }
    }
    return NodeInventory{std::move(node_name), std::move(devices)};
}

const DeviceDescriptor* NodeInventory::find_device(const std::string& name) const {
    for (const auto& d : devices) {
        if (d.name() == name) return &d;
    }
    return nullptr;
}

NodeInventory build_preset_node(NodePreset preset, const std::string& node_name) {
    if (preset != NodePreset::A4HighGpu8g) {
        throw ValidationError("unknown node preset");
    }
    std::vector<DeviceDescriptor> devices;
    devices.reserve(16);
    for (int i = 0; i < 8; ++i) {
        const std::string root = "pci-root" + std::to_string(i);
        const std::int64_t numa = i < 4 ? 0 : 1;
        AttributeMap gpu_attrs;
        gpu_attrs.emplace("pciRoot", AttributeValue::text(root));
        gpu_attrs.emplace("numaNode", AttributeValue::integer(numa));
        devices.push_back(DeviceDescriptor::create("gpu" + std::to_string(i), DeviceKind::Gpu,
                                                   std::move(gpu_attrs)));
    }
    for (int i = 0; i < 8; ++i) {
        const std::string root = "pci-root" + std::to_string(i);
        const std::int64_t numa = i < 4 ? 0 : 1;
        AttributeMap nic_attrs;
        nic_attrs.emplace("pciRoot", AttributeValue::text(root));
        nic_attrs.emplace("numaNode", AttributeValue::integer(numa));
        nic_attrs.emplace("rdma", AttributeValue::flag(true));
        devices.push_back(DeviceDescriptor::create("rdma" + std::to_string(i), DeviceKind::Nic,
                                                   std::move(nic_attrs)));
    }
    return NodeInventory::create(node_name, std::move(devices));
}

NodeInventory build_node(const NodeTopologySpec& spec) {
    std::vector<DeviceDescriptor> devices;
    devices.reserve(spec.devices.size());
    for (const auto& d : spec.devices) {
        devices.push_back(DeviceDescriptor::create(d.name, d.kind, d.attributes));
    }
    return NodeInventory::create(spec.node_name, std::move(devices));
}

std::vector<ResourceSlice> publish_slices(const NodeInventory& inv, const std::string& driver) {
    return {ResourceSlice{inv.node_name, driver, inv.devices}};
}

DistanceClass topology_distance(const DeviceDescriptor& a, const DeviceDescriptor& b) {
    if (a.pci_root() == b.pci_root()) {
        return DistanceClass::SamePciRoot;
    }
    if (a.numa_node() == b.numa_node()) {
        return DistanceClass::SameNumaCrossRoot;
    }
    return DistanceClass::CrossNuma;
}

} // namespace knd
