// eog command-line interface: scenario generation, investigation runs,
// evaluation, and ledger replay.

#include "eog/controller.hpp"
#include "eog/error.hpp"
#include "eog/evaluator.hpp"
#include "eog/external_policy.hpp"
#include "eog/scenario.hpp"
#include "eog/schema.hpp"
#include "eog/snapshot_io.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitDataError = 3;
constexpr int kExitPolicyFailure = 4;

void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) eog::raise(eog::ErrorKind::ParseError, "cannot write " + path.string());
    out << content;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) eog::raise(eog::ErrorKind::SnapshotNotFound, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct SimArgs {
    std::string fault = "flash-sale";
    std::int64_t seed = 0;
    int services = 4;
    double hidden_fraction = 0.25;
    int cascade_depth = 2;
    double noise = 0.5;
    std::string out = "snapshot";
    int suite = 0;
    std::int64_t base_seed = 0;
};

int cmd_sim(const SimArgs& args) {
    const fs::path out_dir(args.out);
    if (args.suite > 0) {
        const auto specs = eog::scenario_suite_specs(args.suite, args.base_seed);
        for (std::size_t i = 0; i < specs.size(); ++i) {
            auto [snapshot, gt] = eog::generate(specs[i]);
            char name[32];
            std::snprintf(name, sizeof(name), "scenario_%02zu", i);
            eog::save_scenario(snapshot, gt, out_dir / name);
            std::cout << name << " fault=" << eog::to_string(specs[i].fault)
                      << " seed=" << specs[i].seed << "\n";
        }
    } else {
        std::pair<eog::Snapshot, eog::GroundTruth> scenario;
        if (args.fault == "flash-sale") {
            scenario = eog::generate_flash_sale(); // fully canned; --seed ignored
        } else {
            eog::ScenarioSpec spec;
            spec.fault = eog::fault_kind_from_string(args.fault);
            spec.seed = args.seed;
            spec.n_services = args.services;
            spec.hidden_edge_fraction = args.hidden_fraction;
            spec.cascade_depth = args.cascade_depth;
            spec.noise_level = args.noise;
            scenario = eog::generate(spec);
        }
        eog::save_scenario(scenario.first, scenario.second, out_dir);
    }
    std::cout << "manifest " << eog::manifest_hash(out_dir) << "\n";
    return 0;
}

struct InvestigateArgs {
    std::string snapshot_dir;
    std::string policy = "oracle";
    std::string endpoint;
    int budget = 256;
    int k_thresh = 3;
    int k_max = 5;
    int k_cool = 2;
    std::int64_t packet_budget = 320 * 1024;
    std::string window_start;
    std::string window_end;
    std::string out = "out";
    std::int64_t seed = 0;
};

std::unique_ptr<eog::AbductivePolicy> make_policy(const InvestigateArgs& args) {
    if (args.policy == "oracle") return std::make_unique<eog::OraclePolicy>();
    if (args.policy == "adversarial") return std::make_unique<eog::AdversarialPolicy>();
    if (args.policy == "external") {
        return std::make_unique<eog::ExternalPolicy>(eog::make_transport(args.endpoint));
    }
    eog::raise(eog::ErrorKind::InvalidSpec, "unknown policy \"" + args.policy + "\"");
}

int cmd_investigate(const InvestigateArgs& args) {
    eog::Snapshot snapshot = eog::load_snapshot(args.snapshot_dir);
    auto policy = make_policy(args);

    std::optional<eog::TimeWindow> window;
    if (!args.window_start.empty() || !args.window_end.empty()) {
        if (args.window_start.empty() || args.window_end.empty()) {
            eog::raise(eog::ErrorKind::InvalidSpec,
                       "--window-start and --window-end must be given together");
        }
        window = eog::make_window(eog::parse_rfc3339(args.window_start),
                                  eog::parse_rfc3339(args.window_end));
    }

    eog::BudgetConfig budget;
    budget.max_hops = args.budget;
    budget.k_thresh = args.k_thresh;
    budget.k_max = args.k_max;
    budget.k_cool = args.k_cool;
    budget.packet_budget_bytes = args.packet_budget;

    const auto result = eog::run_investigation(std::move(snapshot), window, *policy, budget);
    const auto diagnosis = eog::finalize(result);

    const json diag_json = eog::to_json(diagnosis);
    const auto violations = eog::validate_against_schema(diag_json, eog::agent_output_schema());
    if (!violations.empty()) {
        eog::raise(eog::ErrorKind::SchemaViolation, "agent output: " + violations.front());
    }

    const fs::path out_dir(args.out);
    fs::create_directories(out_dir);
    write_file(out_dir / "agent_output.json", diag_json.dump(2) + "\n");
    write_file(out_dir / "ledger.jsonl", eog::ledger_to_jsonl(result.ledger, budget));

    json frontier = json::array();
    for (const auto& f : result.frontier) frontier.push_back(f.canonical());
    json fallback = json::array();
    for (const auto& [entity, score] : result.fallback_ranking) {
        fallback.push_back({{"entity", entity.canonical()}, {"score", score}});
    }
    const json result_json = {{"frontier", frontier},
                              {"fallback_ranking", fallback},
                              {"terminated_by", eog::to_string(result.terminated_by)},
                              {"budget_remaining", result.budget_remaining},
                              {"policy", policy->name()},
                              {"uncertain", diagnosis.uncertain}};
    write_file(out_dir / "result.json", result_json.dump(2) + "\n");

    std::cout << "frontier:";
    for (const auto& f : result.frontier) std::cout << " " << f.canonical();
    if (result.frontier.empty()) std::cout << " (empty)";
    std::cout << "\nterminated_by: " << eog::to_string(result.terminated_by) << "\n";
    if (result.terminated_by == eog::Termination::BudgetExhausted) {
        std::cerr << "warning: budget_exhausted before quiescence\n";
    }
    return 0;
}

struct EvalArgs {
    std::string ground_truth;
    std::vector<std::string> outputs;
    std::string success = "recall";
    double f1_threshold = 1.0;
    std::string out = "scores.json";
};

int cmd_eval(const EvalArgs& args) {
    const auto gt = eog::load_ground_truth(args.ground_truth);

    std::vector<eog::RunScores> runs;
    for (const auto& path : args.outputs) {
        json j;
        try {
            j = json::parse(read_file(path));
        } catch (const json::exception& e) {
            eog::raise(eog::ErrorKind::ParseError, path + ": " + e.what());
        }
        const auto violations = eog::validate_against_schema(j, eog::agent_output_schema());
        if (!violations.empty()) {
            eog::raise(eog::ErrorKind::SchemaViolation, path + ": " + violations.front());
        }
        runs.push_back(eog::score_run(eog::diagnosis_from_json(j), gt));
    }

    eog::SuccessPredicate success;
    if (args.success == "recall") {
        success.rule = eog::SuccessRule::RecallOne;
    } else if (args.success == "f1") {
        success.rule = eog::SuccessRule::F1AtLeast;
        success.f1_threshold = args.f1_threshold;
    } else {
        eog::raise(eog::ErrorKind::InvalidSpec, "unknown success rule \"" + args.success + "\"");
    }
    const auto agg = eog::aggregate(runs, success);

    std::printf("%-28s %9s %9s %9s %9s\n", "run", "precision", "recall", "f1", "reasoning");
    for (std::size_t i = 0; i < runs.size(); ++i) {
        std::printf("%-28s %9.3f %9.3f %9.3f %9.3f\n", args.outputs[i].c_str(), runs[i].precision,
                    runs[i].recall, runs[i].f1, runs[i].reasoning);
    }

    // Table-style summary: best-of-k for pass@k, majority-success means for
    // maj@k.
    double pass_f1 = 0.0;
    double pass_rec = 0.0;
    for (const auto& r : runs) {
        pass_f1 = std::max(pass_f1, r.f1);
        pass_rec = std::max(pass_rec, r.recall);
    }
    double maj_f1 = 0.0;
    double maj_rec = 0.0;
    if (agg.majority_at_k > 0.0) {
        int n = 0;
        for (const auto& r : runs) {
            if (success(r)) {
                maj_f1 += r.f1;
                maj_rec += r.recall;
                ++n;
            }
        }
        maj_f1 /= n;
        maj_rec /= n;
    }
    std::printf("\n%-12s %-11s %-12s %-11s %-10s %-6s\n", "pass@k F1", "pass@k Rec", "maj@k F1",
                "maj@k Rec", "reasoning", "gap");
    std::printf("%-12.3f %-11.3f %-12.3f %-11.3f %-10.3f %-6.3f\n", pass_f1, pass_rec, maj_f1,
                maj_rec, agg.mean_reasoning, agg.reliability_gap);

    json per_run = json::array();
    for (const auto& r : runs) per_run.push_back(eog::to_json(r));
    const json scores = {{"runs", per_run}, {"aggregate", eog::to_json(agg)}};
    write_file(args.out, scores.dump(2) + "\n");
    return 0;
}

int cmd_replay(const std::string& ledger_path) {
    const auto [entries, budget] = eog::ledger_from_jsonl(read_file(ledger_path));
    std::cout << entries.size() << " steps\n";

    std::map<eog::EntityId, eog::Label> last_label;
    std::map<eog::EntityId, int> flips;
    std::int64_t prev_step = -1;
    for (const auto& e : entries) {
        if (e.step <= prev_step) {
            std::cerr << "ledger violates the monotone step invariant at step "
                      << e.step << "\n";
            return kExitDataError;
        }
        prev_step = e.step;

        std::cout << "step " << e.step << "  " << e.entity.canonical();
        auto it = last_label.find(e.entity);
        if (it != last_label.end() && it->second != e.belief.label) {
            std::cout << "  " << eog::to_string(it->second) << " -> "
                      << eog::to_string(e.belief.label) << "  (broadcast)";
        } else {
            std::cout << "  " << eog::to_string(e.belief.label);
        }
        if (it == last_label.end() || it->second != e.belief.label) ++flips[e.entity];
        last_label[e.entity] = e.belief.label;
        for (const auto& claim : e.claims) {
            std::cout << "  claim " << claim.source.canonical() << " -> "
                      << claim.target.canonical();
        }
        std::cout << "\n";
    }
    for (const auto& [entity, count] : flips) {
        if (count > budget.k_thresh && last_label[entity] != eog::Label::Defer) {
            std::cerr << "ledger violates the flip damping invariant for " << entity.canonical()
                      << ": " << count << " flips exceed k_thresh=" << budget.k_thresh
                      << " without a frozen Defer\n";
            return kExitDataError;
        }
    }
    return 0;
}

int exit_code_for(const eog::Error& e) {
    switch (e.kind()) {
    case eog::ErrorKind::PolicyFailure:
    case eog::ErrorKind::Transport: return kExitPolicyFailure;
    default: return kExitDataError;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"eog: graph-guided incident investigation engine", "eog"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "print help for every subcommand");
    app.set_config("--config")->envname("EOG_CONFIG");

    SimArgs sim;
    auto* sim_cmd = app.add_subcommand("sim", "generate a synthetic incident snapshot");
    sim_cmd->add_option("--fault", sim.fault,
                        "config-change|resource-exhaustion|traffic-surge|cascading-failure|"
                        "flash-sale (flash-sale is canned and ignores --seed)")
        ->envname("EOG_FAULT");
    sim_cmd->add_option("--seed", sim.seed, "scenario seed")->envname("EOG_SEED");
    sim_cmd->add_option("--services", sim.services, "number of logical services")
        ->envname("EOG_SERVICES");
    sim_cmd->add_option("--hidden-fraction", sim.hidden_fraction,
                        "fraction of call edges omitted from topology")
        ->envname("EOG_HIDDEN_FRACTION");
    sim_cmd->add_option("--cascade-depth", sim.cascade_depth, "propagation depth")
        ->envname("EOG_CASCADE_DEPTH");
    sim_cmd->add_option("--noise", sim.noise, "irrelevant-evidence rate")->envname("EOG_NOISE");
    sim_cmd->add_option("--out", sim.out, "output directory")->envname("EOG_OUT");
    sim_cmd->add_option("--suite", sim.suite, "generate N scenarios cycling all fault kinds")
        ->envname("EOG_SUITE");
    sim_cmd->add_option("--base-seed", sim.base_seed, "first seed for --suite")
        ->envname("EOG_BASE_SEED");

    InvestigateArgs inv;
    auto* inv_cmd = app.add_subcommand("investigate", "run an investigation over a snapshot");
    inv_cmd->add_option("--snapshot", inv.snapshot_dir, "snapshot directory")
        ->required()
        ->envname("EOG_SNAPSHOT");
    inv_cmd->add_option("--policy", inv.policy, "oracle|adversarial|external")
        ->envname("EOG_POLICY");
    auto* endpoint_opt =
        inv_cmd->add_option("--endpoint", inv.endpoint,
                            "external policy endpoint: http(s) URL or a command line")
            ->envname("EOG_ENDPOINT");
    inv_cmd->add_option("--budget", inv.budget, "max policy invocations")->envname("EOG_BUDGET");
    inv_cmd->add_option("--k-thresh", inv.k_thresh, "flip damping threshold")
        ->envname("EOG_K_THRESH");
    inv_cmd->add_option("--k-max", inv.k_max, "max visits per node")->envname("EOG_K_MAX");
    inv_cmd->add_option("--k-cool", inv.k_cool, "cooldown: other evaluations between visits")
        ->envname("EOG_K_COOL");
    inv_cmd->add_option("--packet-budget", inv.packet_budget, "context packet byte budget")
        ->envname("EOG_PACKET_BUDGET");
    inv_cmd->add_option("--window-start", inv.window_start, "RFC3339 window start (default auto)")
        ->envname("EOG_WINDOW_START");
    inv_cmd->add_option("--window-end", inv.window_end, "RFC3339 window end")
        ->envname("EOG_WINDOW_END");
    inv_cmd->add_option("--seed", inv.seed, "reserved for parity with sim")->envname("EOG_SEED");
    inv_cmd->add_option("--out", inv.out, "output directory")->envname("EOG_OUT");

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "score diagnoses against ground truth");
    eval_cmd->add_option("--ground-truth", eval.ground_truth, "ground_truth.json path")
        ->required()
        ->envname("EOG_GROUND_TRUTH");
    eval_cmd->add_option("--outputs", eval.outputs, "agent_output.json paths (k runs)")
        ->required()
        ->expected(-1);
    eval_cmd->add_option("--success", eval.success, "success predicate: recall|f1")
        ->envname("EOG_SUCCESS");
    eval_cmd->add_option("--f1-threshold", eval.f1_threshold, "threshold for --success f1")
        ->envname("EOG_F1_THRESHOLD");
    eval_cmd->add_option("--out", eval.out, "scores.json path")->envname("EOG_OUT");

    std::string ledger_path;
    auto* replay_cmd = app.add_subcommand("replay", "print and verify a ledger timeline");
    replay_cmd->add_option("--ledger", ledger_path, "ledger.jsonl path")
        ->required()
        ->envname("EOG_LEDGER");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    if (inv_cmd->parsed() && inv.policy == "external" && endpoint_opt->count() == 0 &&
        inv.endpoint.empty()) {
        std::cerr << "--policy external requires --endpoint\n";
        return kExitUsage;
    }

    try {
        if (sim_cmd->parsed()) return cmd_sim(sim);
        if (inv_cmd->parsed()) return cmd_investigate(inv);
        if (eval_cmd->parsed()) return cmd_eval(eval);
        if (replay_cmd->parsed()) return cmd_replay(ledger_path);
    } catch (const eog::Error& e) {
        const json err = {{"error", eog::to_string(e.kind())}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        const json err = {{"error", "internal"}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return kExitDataError;
    }
    return 0;
}
