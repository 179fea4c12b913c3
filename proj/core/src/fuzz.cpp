#include "psys/fuzz.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <random>

#include "psys/io.hpp"

namespace psys {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

using Rng = std::mt19937_64;

NodeId pick(Rng& rng, NodeId lo, NodeId hi) {
    return static_cast<NodeId>(std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng));
}

struct Generated {
    explicit Generated(Topology t) : topology(std::move(t)) {}
    Topology topology;
    NodeId commander{};
    std::vector<NodeId> squad;          // original nodes only
    bool sergeant_in_squad = false;     // dynamic runs add the sergeant
    bool squad_has_multipath = false;
    int squad_mode = 0;
};

std::vector<NodeId> random_permutation(Rng& rng, NodeId n) {
    std::vector<NodeId> perm(n + 1);
    std::iota(perm.begin(), perm.end(), 0u);
    for (NodeId i = n; i >= 2; --i) {
        NodeId j = pick(rng, 1, i);
        std::swap(perm[i], perm[j]);
    }
    return perm;
}

Topology random_tree(Rng& rng, NodeId n) {
    auto perm = random_permutation(rng, n);
    std::vector<Arc> arcs;
    for (NodeId i = 2; i <= n; ++i)
        arcs.push_back({perm[pick(rng, 1, i - 1)], perm[i]});
    return Topology::build(TopologyKind::tree, n, std::move(arcs));
}

// Layered construction; nodes in one layer may share parents, which makes
// multi-path counts (count >= 2) routine when the commander sits in layer 0.
Topology random_dag(Rng& rng, NodeId n, NodeId& layer0_node) {
    std::vector<std::vector<NodeId>> layers;
    layers.push_back({1});
    NodeId next = 2;
    while (next <= n) {
        NodeId width = std::min<NodeId>(pick(rng, 1, 3), n - next + 1);
        std::vector<NodeId> layer;
        for (NodeId i = 0; i < width; ++i) layer.push_back(next++);
        layers.push_back(std::move(layer));
    }

    std::vector<Arc> arcs;
    for (std::size_t k = 1; k < layers.size(); ++k) {
        const auto& above = layers[k - 1];
        for (NodeId node : layers[k]) {
            NodeId parent_count = 1;
            if (above.size() >= 2 && pick(rng, 0, 1) == 1) parent_count = 2;
            std::vector<NodeId> parents = above;
            for (NodeId p = 0; p < parent_count; ++p) {
                NodeId idx = pick(rng, 0, static_cast<NodeId>(parents.size() - 1));
                arcs.push_back({parents[idx], node});
                parents.erase(parents.begin() + idx);
                if (parents.empty()) break;
            }
        }
        // occasional same-layer arcs: peer relations
        const auto& layer = layers[k];
        for (std::size_t i = 0; i + 1 < layer.size(); ++i)
            if (pick(rng, 0, 2) == 0) arcs.push_back({layer[i], layer[i + 1]});
    }

    auto perm = random_permutation(rng, n);
    for (Arc& a : arcs) a = {perm[a.from], perm[a.to]};
    layer0_node = perm[1];
    const bool siblings = pick(rng, 0, 1) == 1;
    return Topology::build(TopologyKind::dag, n, std::move(arcs), siblings);
}

Topology random_graph(Rng& rng, NodeId n) {
    std::vector<Arc> arcs;
    auto perm = random_permutation(rng, n);
    for (NodeId i = 2; i <= n; ++i)
        arcs.push_back({perm[pick(rng, 1, i - 1)], perm[i]});
    const NodeId extra = pick(rng, 0, n);
    for (NodeId i = 0; i < extra; ++i) {
        NodeId u = pick(rng, 1, n);
        NodeId v = pick(rng, 1, n);
        if (u != v) arcs.push_back({u, v});
    }
    return Topology::build(TopologyKind::graph, n, std::move(arcs));
}

Generated generate(std::uint64_t seed, std::uint32_t index, NodeId max_nodes) {
    Rng rng(splitmix64(seed ^ (0x51ed270b * static_cast<std::uint64_t>(index) + 1)));
    const NodeId n = pick(rng, 2, max_nodes);

    NodeId layer0 = 1;
    Topology topology = [&] {
        switch (index % 3) {
            case 0: return random_tree(rng, n);
            case 1: return random_dag(rng, n, layer0);
            default: return random_graph(rng, n);
        }
    }();

    Generated g(std::move(topology));
    // Layer-0 commanders keep the layered structure's multi-path counts.
    if (index % 3 == 1 && pick(rng, 0, 1) == 0) g.commander = layer0;
    else g.commander = pick(rng, 1, n);

    const LevelTable levels = bfs_levels(g.topology, g.commander);
    std::vector<NodeId> multipath;
    for (NodeId x = 1; x <= n; ++x)
        if (levels.count[x] >= 2) multipath.push_back(x);

    g.squad_mode = static_cast<int>(index % 5);
    switch (g.squad_mode) {
        case 0:  // singleton
            g.squad = {pick(rng, 1, n)};
            break;
        case 1:  // full
            for (NodeId x = 1; x <= n; ++x) g.squad.push_back(x);
            break;
        case 2:  // random non-empty subset
            for (NodeId x = 1; x <= n; ++x)
                if (pick(rng, 0, 1) == 1) g.squad.push_back(x);
            if (g.squad.empty()) g.squad.push_back(pick(rng, 1, n));
            break;
        case 3:  // commander plus random others
            g.squad.push_back(g.commander);
            for (NodeId x = 1; x <= n; ++x)
                if (pick(rng, 0, 2) == 0) g.squad.push_back(x);
            break;
        default:  // a multi-path cell when one exists
            if (!multipath.empty())
                g.squad.push_back(multipath[pick(rng, 0, static_cast<NodeId>(multipath.size() - 1))]);
            for (NodeId x = 1; x <= n; ++x)
                if (pick(rng, 0, 2) == 0) g.squad.push_back(x);
            if (g.squad.empty()) g.squad.push_back(pick(rng, 1, n));
            break;
    }
    std::sort(g.squad.begin(), g.squad.end());
    g.squad.erase(std::unique(g.squad.begin(), g.squad.end()), g.squad.end());
    for (NodeId x : g.squad)
        if (levels.count[x] >= 2) g.squad_has_multipath = true;
    g.sergeant_in_squad = pick(rng, 0, 3) == 0;
    return g;
}

}  // namespace

FuzzSummary fuzz(const FuzzOptions& options) {
    if (options.instances == 0) throw ValidationError("instance count must be positive");
    if (options.max_nodes < 2 || options.max_nodes > 25)
        throw ValidationError("max nodes must be in 2..25");
    if (!options.run_dynamic && !options.run_static)
        throw ValidationError("no variant selected");

    FuzzSummary summary;
    for (std::uint32_t index = 0; index < options.instances; ++index) {
        Generated g = generate(options.seed, index, options.max_nodes);
        ++summary.instances_generated;
        if (g.squad_mode == 0) ++summary.singleton_squads;
        if (g.squad_mode == 1) ++summary.full_squads;
        if (std::binary_search(g.squad.begin(), g.squad.end(), g.commander))
            ++summary.commander_in_squad;
        if (g.squad_has_multipath) ++summary.multipath_squads;

        std::vector<Variant> variants;
        if (options.run_dynamic) variants.push_back(Variant::dynamic_channels);
        if (options.run_static) variants.push_back(Variant::static_rules);

        for (Variant variant : variants) {
            std::vector<NodeId> squad = g.squad;
            if (variant == Variant::dynamic_channels && g.sergeant_in_squad) {
                squad.push_back(g.topology.node_count() + 1);
                ++summary.sergeant_in_squad;
            }
            ++summary.runs;

            std::string failure;
            try {
                FsspInstance instance =
                    variant == Variant::dynamic_channels
                        ? build_dynamic_instance(g.topology, g.commander, squad,
                                                 options.dynamic_override)
                        : build_static_instance(g.topology, g.commander, squad,
                                                options.static_override);
                RunResult result = run_instance(instance);
                if (result.outcome == RunOutcome::budget_exhausted)
                    failure = "no quiescence within " + std::to_string(result.steps) + " steps";
                VerificationReport report = verify_run(result.trace, instance);
                summary.phase_checks += report.phase_checks.size();
                if (!report.ok()) {
                    for (const auto& f : report.failures) {
                        if (!failure.empty()) failure += "; ";
                        failure += f;
                    }
                }
            } catch (const std::exception& e) {
                failure = std::string("exception: ") + e.what();
            }

            if (!failure.empty()) {
                FuzzFailure record;
                record.index = index;
                record.variant = variant;
                record.message = failure;
                if (!options.replay_dir.empty()) {
                    namespace fs = std::filesystem;
                    fs::create_directories(options.replay_dir);
                    const std::string base = "fuzz_fail_" + std::to_string(index) + "_" +
                                             to_string(variant);
                    const fs::path topo_path = fs::path(options.replay_dir) / (base + ".top");
                    const fs::path inst_path = fs::path(options.replay_dir) / (base + ".instance");
                    write_file(topo_path, serialize_topology(g.topology));
                    InstanceSpec spec;
                    spec.topology_path = base + ".top";
                    spec.commander = g.commander;
                    spec.squad = squad;
                    spec.variant = variant;
                    write_file(inst_path, serialize_instance_spec(spec));
                    record.replay_instance_path = inst_path.string();
                }
                summary.failures.push_back(std::move(record));
                if (options.stop_at_first_failure) return summary;
            }
        }
    }
    return summary;
}

}  // namespace psys
