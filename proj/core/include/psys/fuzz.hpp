#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "psys/fssp.hpp"

namespace psys {

struct FuzzOptions {
    std::uint64_t seed = 1;
    std::uint32_t instances = 200;
    NodeId max_nodes = 15;  // capped at 25
    bool run_dynamic = true;
    bool run_static = true;
    std::shared_ptr<const RuleProgram> dynamic_override;
    std::shared_ptr<const RuleProgram> static_override;
    std::string replay_dir;  // empty: no replay files
    bool stop_at_first_failure = false;
};

struct FuzzFailure {
    std::uint32_t index{};
    Variant variant{};
    std::string message;
    std::string replay_instance_path;  // empty when replay_dir unset
};

struct FuzzSummary {
    std::uint32_t instances_generated = 0;
    std::uint32_t runs = 0;
    std::uint64_t phase_checks = 0;
    // squad coverage
    std::uint32_t singleton_squads = 0;
    std::uint32_t full_squads = 0;
    std::uint32_t commander_in_squad = 0;
    std::uint32_t multipath_squads = 0;  // squad contains a cell with count >= 2
    std::uint32_t sergeant_in_squad = 0;
    std::vector<FuzzFailure> failures;
    bool ok() const { return failures.empty(); }
};

// Random trees, layered dags (multi-path levels guaranteed to appear) and
// connected graphs with randomized commanders and squads; runs the selected
// variants and aggregates verify_run plus the static phase checks.
// Fully reproducible from the seed; instance i depends only on (seed, i).
FuzzSummary fuzz(const FuzzOptions& options);

}  // namespace psys
