#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace driftsim {

enum class ValueDistribution { Uniform };

// Generator parameters. Defaults are the standard benchmark database:
// 50 classes, 10 max refs per class, 50-byte base size, 100000 objects,
// 4 reference types, everything drawn uniformly.
struct DbParams {
    uint32_t num_classes = 50;
    uint32_t max_refs_per_class = 10;
    uint32_t base_size = 50; // bytes
    uint32_t num_objects = 100000;
    uint32_t num_ref_types = 4;
    ValueDistribution ref_type_dist = ValueDistribution::Uniform;
    ValueDistribution class_ref_dist = ValueDistribution::Uniform;
    ValueDistribution objects_in_classes_dist = ValueDistribution::Uniform;
    ValueDistribution object_refs_dist = ValueDistribution::Uniform;
    uint64_t seed = 1;

    void validate() const; // throws ConfigError naming the field
};

// Immutable after generation; safe to share read-only across runs.
// Object ids are dense 0..num_objects-1 in generation order. Instance size
// is fixed per class. Refs are stored CSR-style in slot order.
struct ObjectGraph {
    uint64_t seed = 0;
    uint32_t num_ref_types = 0;

    std::vector<uint32_t> object_class;                // oid -> class id
    std::vector<uint32_t> class_size;                  // class id -> instance bytes
    std::vector<std::vector<uint8_t>> class_ref_types; // class id -> ref slot types
    std::vector<uint64_t> ref_offset;                  // size num_objects+1
    std::vector<uint32_t> ref_target;
    std::vector<uint8_t> ref_type;
    std::vector<std::vector<uint32_t>> by_class;       // class id -> sorted oids

    uint32_t num_objects() const { return static_cast<uint32_t>(object_class.size()); }
    uint32_t num_classes() const { return static_cast<uint32_t>(class_size.size()); }

    uint32_t size_of(uint32_t oid) const { return class_size[object_class[oid]]; }

    std::span<const uint32_t> refs(uint32_t oid) const {
        return {ref_target.data() + ref_offset[oid],
                ref_target.data() + ref_offset[oid + 1]};
    }

    std::span<const uint8_t> ref_types_of(uint32_t oid) const {
        return {ref_type.data() + ref_offset[oid],
                ref_type.data() + ref_offset[oid + 1]};
    }

    uint64_t total_bytes() const;

    // Structural equality over the observable graph (objects, sizes, refs).
    bool same_structure(const ObjectGraph& other) const;
};

ObjectGraph generate_database(const DbParams& params);

// Depth-first pre-order visit following every ref slot up to `depth` edges
// from the root. Revisits are kept (no dedup); cycles are cut by the depth
// bound alone. Depth 0 visits just the root.
void simple_traversal(const ObjectGraph& g, uint32_t root, uint32_t depth,
                      std::vector<uint32_t>& out);
std::vector<uint32_t> simple_traversal(const ObjectGraph& g, uint32_t root,
                                       uint32_t depth);

// Line-oriented text dump; see README for the format. Round-trip is lossless.
void dump_graph(const ObjectGraph& g, std::ostream& out);
ObjectGraph load_graph(std::istream& in);

} // namespace driftsim
