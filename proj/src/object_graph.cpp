#include "driftsim/object_graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "driftsim/errors.hpp"
#include "driftsim/rng.hpp"

namespace driftsim {

namespace {

// Per-class size multiplier spread. Multipliers live in [1, kSizeSpread) and
// follow 1 + (kSizeSpread-1) * q^kSizeSkew over stratified quantiles q, which
// yields mostly small instances with a long tail. kSizeSkew is calibrated so
// the default 50-byte base lands on a [50,1600) range with a ~233-byte mean.
constexpr double kSizeSpread = 32.0;
constexpr double kSizeSkew = 7.4699453552;

} // namespace

void DbParams::validate() const {
    if (num_classes == 0)
        throw ConfigError("database.classes", "must be >= 1");
    if (num_objects == 0)
        throw ConfigError("database.objects", "must be >= 1");
    if (base_size == 0)
        throw ConfigError("database.base_size", "must be >= 1");
    if (num_ref_types == 0)
        throw ConfigError("database.ref_types", "must be >= 1");
    if (num_ref_types > 256)
        throw ConfigError("database.ref_types", "must be <= 256");
}

uint64_t ObjectGraph::total_bytes() const {
    uint64_t total = 0;
    for (uint32_t c : object_class) total += class_size[c];
    return total;
}

bool ObjectGraph::same_structure(const ObjectGraph& other) const {
    if (num_objects() != other.num_objects()) return false;
    if (num_ref_types != other.num_ref_types) return false;
    if (num_classes() != other.num_classes()) return false;
    if (object_class != other.object_class) return false;
    for (uint32_t o = 0; o < num_objects(); ++o)
        if (size_of(o) != other.size_of(o)) return false;
    return ref_offset == other.ref_offset && ref_target == other.ref_target &&
           ref_type == other.ref_type;
}

ObjectGraph generate_database(const DbParams& params) {
    params.validate();
    Rng rng = Rng::stream(params.seed, stream_tag::kGraph);

    ObjectGraph g;
    g.seed = params.seed;
    g.num_ref_types = params.num_ref_types;

    const uint32_t nc = params.num_classes;
    const uint32_t no = params.num_objects;

    // Schema: one fixed instance size per class, from stratified jittered
    // quantiles of the multiplier curve, shuffled so class id carries no
    // size ordering.
    g.class_size.resize(nc);
    for (uint32_t i = 0; i < nc; ++i) {
        double q = (i + rng.uniform01()) / nc;
        double mult = 1.0 + (kSizeSpread - 1.0) * std::pow(q, kSizeSkew);
        g.class_size[i] = static_cast<uint32_t>(std::llround(params.base_size * mult));
    }
    rng.shuffle(g.class_size);

    // Ref slot count per class is a uniform draw in [0, max]; each slot gets
    // a reference type at schema time.
    g.class_ref_types.resize(nc);
    for (uint32_t i = 0; i < nc; ++i) {
        auto& slots = g.class_ref_types[i];
        slots.resize(rng.bounded(params.max_refs_per_class + 1));
        for (auto& t : slots)
            t = static_cast<uint8_t>(rng.bounded(params.num_ref_types));
    }

    g.object_class.resize(no);
    for (auto& c : g.object_class) c = static_cast<uint32_t>(rng.bounded(nc));

    g.ref_offset.resize(no + 1);
    g.ref_offset[0] = 0;
    for (uint32_t o = 0; o < no; ++o)
        g.ref_offset[o + 1] = g.ref_offset[o] + g.class_ref_types[g.object_class[o]].size();

    const uint64_t total_refs = g.ref_offset[no];
    g.ref_target.resize(total_refs);
    g.ref_type.resize(total_refs);
    for (uint32_t o = 0; o < no; ++o) {
        const auto& slots = g.class_ref_types[g.object_class[o]];
        uint64_t base = g.ref_offset[o];
        for (size_t j = 0; j < slots.size(); ++j) {
            g.ref_target[base + j] = static_cast<uint32_t>(rng.bounded(no));
            g.ref_type[base + j] = slots[j];
        }
    }

    g.by_class.resize(nc);
    for (uint32_t o = 0; o < no; ++o) g.by_class[g.object_class[o]].push_back(o);

    return g;
}

void simple_traversal(const ObjectGraph& g, uint32_t root, uint32_t depth,
                      std::vector<uint32_t>& out) {
    if (root >= g.num_objects())
        throw std::invalid_argument("simple_traversal: root is not a valid object id");

    out.clear();
    // Explicit stack, children pushed in reverse so pre-order follows slot order.
    struct Frame { uint32_t oid; uint32_t remaining; };
    std::vector<Frame> stack;
    stack.push_back({root, depth});
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        out.push_back(f.oid);
        if (f.remaining == 0) continue;
        auto targets = g.refs(f.oid);
        for (size_t i = targets.size(); i > 0; --i)
            stack.push_back({targets[i - 1], f.remaining - 1});
    }
}

std::vector<uint32_t> simple_traversal(const ObjectGraph& g, uint32_t root,
                                       uint32_t depth) {
    std::vector<uint32_t> out;
    simple_traversal(g, root, depth, out);
    return out;
}

void dump_graph(const ObjectGraph& g, std::ostream& out) {
    out << "objectgraph 1\n";
    out << "objects " << g.num_objects() << "\n";
    out << "classes " << g.num_classes() << "\n";
    out << "ref_types " << g.num_ref_types << "\n";
    out << "seed " << g.seed << "\n";
    for (uint32_t o = 0; o < g.num_objects(); ++o)
        out << "o " << o << ' ' << g.object_class[o] << ' ' << g.size_of(o) << "\n";
    for (uint32_t o = 0; o < g.num_objects(); ++o) {
        auto targets = g.refs(o);
        auto types = g.ref_types_of(o);
        for (size_t j = 0; j < targets.size(); ++j)
            out << "r " << o << ' ' << targets[j] << ' ' << unsigned(types[j]) << "\n";
    }
    out << "end\n";
}

namespace {

[[noreturn]] void bad_dump(const std::string& what) {
    throw RunError("load_graph: " + what);
}

} // namespace

ObjectGraph load_graph(std::istream& in) {
    std::string line;
    auto next_line = [&]() -> std::string& {
        if (!std::getline(in, line)) bad_dump("unexpected end of file");
        return line;
    };

    if (next_line() != "objectgraph 1") bad_dump("missing header");

    uint64_t no = 0, nc = 0, nrt = 0, seed = 0;
    {
        std::istringstream s;
        std::string key;
        s.str(next_line()); s >> key >> no;
        if (key != "objects" || s.fail()) bad_dump("bad objects line");
        s.clear(); s.str(next_line()); s >> key >> nc;
        if (key != "classes" || s.fail()) bad_dump("bad classes line");
        s.clear(); s.str(next_line()); s >> key >> nrt;
        if (key != "ref_types" || s.fail()) bad_dump("bad ref_types line");
        s.clear(); s.str(next_line()); s >> key >> seed;
        if (key != "seed" || s.fail()) bad_dump("bad seed line");
    }
    if (no == 0 || nc == 0) bad_dump("empty database");

    ObjectGraph g;
    g.seed = seed;
    g.num_ref_types = static_cast<uint32_t>(nrt);
    g.object_class.resize(no);
    g.class_size.assign(nc, 0);
    g.class_ref_types.resize(nc);

    std::vector<uint32_t> obj_size(no);
    for (uint64_t i = 0; i < no; ++i) {
        std::istringstream s(next_line());
        char tag;
        uint64_t id, cls, size;
        s >> tag >> id >> cls >> size;
        if (s.fail() || tag != 'o') bad_dump("bad object line");
        if (id != i) bad_dump("object ids must be dense and ascending");
        if (cls >= nc) bad_dump("object class out of range");
        g.object_class[i] = static_cast<uint32_t>(cls);
        obj_size[i] = static_cast<uint32_t>(size);
        if (g.class_size[cls] == 0) g.class_size[cls] = obj_size[i];
        else if (g.class_size[cls] != obj_size[i])
            bad_dump("instance sizes differ within one class");
    }

    std::vector<std::vector<uint32_t>> targets(no);
    std::vector<std::vector<uint8_t>> types(no);
    for (;;) {
        next_line();
        if (line == "end") break;
        std::istringstream s(line);
        char tag;
        uint64_t src, dst, t;
        s >> tag >> src >> dst >> t;
        if (s.fail() || tag != 'r') bad_dump("bad ref line");
        if (src >= no || dst >= no) bad_dump("ref endpoint out of range");
        if (t >= nrt) bad_dump("ref type out of range");
        targets[src].push_back(static_cast<uint32_t>(dst));
        types[src].push_back(static_cast<uint8_t>(t));
    }

    g.ref_offset.resize(no + 1);
    g.ref_offset[0] = 0;
    for (uint64_t o = 0; o < no; ++o)
        g.ref_offset[o + 1] = g.ref_offset[o] + targets[o].size();
    g.ref_target.reserve(g.ref_offset[no]);
    g.ref_type.reserve(g.ref_offset[no]);
    for (uint64_t o = 0; o < no; ++o) {
        g.ref_target.insert(g.ref_target.end(), targets[o].begin(), targets[o].end());
        g.ref_type.insert(g.ref_type.end(), types[o].begin(), types[o].end());
    }

    // Rebuild schema views from instances. A class with no refs observed on
    // any instance simply has zero slots.
    for (uint64_t o = 0; o < no; ++o) {
        uint32_t cls = g.object_class[o];
        if (types[o].size() > g.class_ref_types[cls].size())
            g.class_ref_types[cls] = types[o];
    }

    g.by_class.resize(nc);
    for (uint64_t o = 0; o < no; ++o)
        g.by_class[g.object_class[o]].push_back(static_cast<uint32_t>(o));

    return g;
}

} // namespace driftsim
