#pragma once

#include "eog/evaluator.hpp"
#include "eog/evidence.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace eog {

enum class FaultKind { ConfigChange, ResourceExhaustion, TrafficSurge, CascadingFailure };

const char* to_string(FaultKind kind);
FaultKind fault_kind_from_string(const std::string& text);

struct ScenarioSpec {
    std::int64_t seed = 0;
    int n_services = 4;               // >= 2
    double hidden_edge_fraction = 0.0; // [0, 1)
    FaultKind fault = FaultKind::TrafficSurge;
    int cascade_depth = 2;            // >= 1
    double noise_level = 0.0;         // irrelevant-event rate, >= 0
    std::string ns = "otel-demo";
};

// Deterministic in the seed: synthetic incident snapshot plus ground truth.
// Topologies are weakly connected; hidden_edge_fraction of call edges are
// omitted from the topology but evidenced by log lines at their caller.
// Throws Error(InvalidSpec) on out-of-range parameters.
std::pair<Snapshot, GroundTruth> generate(const ScenarioSpec& spec);

// The canned four-service flash-sale fixture: gateway alert, hidden
// gateway->processor edge, staged database inbound metrics, workload marker
// at the frontend. Fully fixed (no seed).
std::pair<Snapshot, GroundTruth> generate_flash_sale();

// n scenarios cycling through all fault kinds, seeds base_seed..base_seed+n-1.
std::vector<ScenarioSpec> scenario_suite_specs(int n, std::int64_t base_seed);
std::vector<std::pair<Snapshot, GroundTruth>> scenario_suite(int n, std::int64_t base_seed);

// Writes snapshot files plus ground_truth.json.
void save_scenario(const Snapshot& snapshot, const GroundTruth& gt,
                   const std::filesystem::path& dir);

// FNV-1a 64 over the directory's file names and contents (sorted), hex.
std::string manifest_hash(const std::filesystem::path& dir);

} // namespace eog
