#include "eog/scenario.hpp"

#include "eog/error.hpp"
#include "eog/policy.hpp"
#include "eog/snapshot_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

namespace eog {

const char* to_string(FaultKind kind) {
    switch (kind) {
    case FaultKind::ConfigChange: return "config-change";
    case FaultKind::ResourceExhaustion: return "resource-exhaustion";
    case FaultKind::TrafficSurge: return "traffic-surge";
    case FaultKind::CascadingFailure: return "cascading-failure";
    }
    return "traffic-surge";
}

FaultKind fault_kind_from_string(const std::string& text) {
    if (text == "config-change") return FaultKind::ConfigChange;
    if (text == "resource-exhaustion") return FaultKind::ResourceExhaustion;
    if (text == "traffic-surge") return FaultKind::TrafficSurge;
    if (text == "cascading-failure") return FaultKind::CascadingFailure;
    raise(ErrorKind::InvalidSpec, "unknown fault kind \"" + text + "\"");
}

namespace {

// Bounded draws are hand-rolled: std::uniform_int_distribution is
// implementation-defined, and scenario bytes must be stable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed ^ 0x9e3779b97f4a7c15ULL) {}

    std::uint64_t next() { return gen_(); }
    int bounded(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

    std::string alnum(int len) {
        static const char charset[] = "abcdefghijklmnopqrstuvwxyz0123456789";
        std::string out;
        for (int i = 0; i < len; ++i) out.push_back(charset[bounded(36)]);
        return out;
    }

private:
    std::mt19937_64 gen_;
};

const std::vector<std::string>& service_names() {
    static const std::vector<std::string> names = {
        "frontend", "gateway",  "checkout", "cart",      "payment",   "shipping",
        "currency", "catalog",  "ads",      "email",     "quote",     "recommend",
        "search",   "inventory", "billing", "notify",
    };
    return names;
}

struct ServiceIds {
    EntityId service;
    EntityId deployment;
    EntityId pod;
    std::string name;
};

struct Builder {
    std::string ns;
    Snapshot snapshot;
    GroundTruth gt;
    std::set<std::pair<EntityId, EntityId>> hidden_edges; // omitted call edges
    std::vector<ServiceIds> services;
    Timestamp alert_start{};

    EntityId entity(const std::string& kind, const std::string& name) const {
        return {ns, kind, name};
    }

    ServiceIds make_service(const std::string& name, Rng& rng) {
        ServiceIds ids;
        ids.name = name;
        ids.service = entity("Service", name);
        ids.deployment = entity("Deployment", name);
        ids.pod = entity("Pod", name + "-" + rng.alnum(9) + "-" + rng.alnum(5));
        auto& topo = snapshot.topology;
        topo.add_edge(ids.service, ids.deployment, EdgeKind::Infrastructure);
        topo.add_edge(ids.deployment, ids.pod, EdgeKind::Ownership);
        services.push_back(ids);
        return ids;
    }

    void call_edge(int from, int to, EdgeKind kind, bool hidden, Rng& rng) {
        const EntityId& src = services[from].service;
        const EntityId& dst = services[to].service;
        if (hidden) {
            hidden_edges.insert({src, dst});
            snapshot.topology.add_node(src);
            snapshot.topology.add_node(dst);
        } else {
            snapshot.topology.add_edge(src, dst, kind);
        }
        (void)rng;
    }

    void alert(const EntityId& on, const std::string& name, Signal signal, Severity severity,
               Timestamp t0, Timestamp t1) {
        snapshot.alerts.push_back({name, on, severity, signal, t0, t1});
    }

    void event(const EntityId& on, const std::string& reason, EventType type,
               const std::string& message, Timestamp at) {
        snapshot.events.push_back({on, reason, type, message, at});
    }

    void log_line(const EntityId& on, Timestamp at, const std::string& level,
                  const std::string& text) {
        for (auto& chunk : snapshot.logs) {
            if (chunk.entity == on) {
                chunk.lines.push_back({at, level, text});
                return;
            }
        }
        snapshot.logs.push_back({on, {{at, level, text}}});
    }

    // Flat series around `base`, stepping to `base * (1 + pct/100)` from the
    // window start onward. Cadence 60s from alert_start-40m to +15m.
    void inbound_series(const EntityId& on, const EntityId& from, double base, int pct,
                        bool staged) {
        MetricSeries m;
        m.entity = on;
        m.metric = "inbound_rate_by_source:" + from.canonical();
        m.unit = "req/s";
        m.staged = staged;
        const Timestamp window_start = alert_start - 300;
        for (std::int64_t off = -2400; off <= 900; off += 60) {
            const Timestamp t = alert_start + off;
            const double v = t < window_start ? base : base * (1.0 + pct / 100.0);
            m.points.push_back({t, v});
        }
        snapshot.metrics.push_back(std::move(m));
    }

    void ramp_series(const EntityId& on, const std::string& metric, const std::string& unit,
                     double low, double high) {
        MetricSeries m;
        m.entity = on;
        m.metric = metric;
        m.unit = unit;
        for (std::int64_t off = -2400; off <= 900; off += 60) {
            const Timestamp t = alert_start + off;
            const double frac = off <= -300 ? 0.0 : static_cast<double>(off + 300) / 1200.0;
            m.points.push_back({t, low + (high - low) * std::min(1.0, frac)});
        }
        snapshot.metrics.push_back(std::move(m));
    }

    // Ground-truth triple (Service/Deployment/Pod groups) plus their alias set.
    void gt_service_groups(const ServiceIds& ids, bool root_cause) {
        gt.groups.push_back({ids.name + "-service-1", "Service", {ids.name + "\\b"}, ns,
                             root_cause});
        gt.groups.push_back({ids.name + "-deployment-1", "Deployment", {ids.name + "\\b"}, ns,
                             false});
        gt.groups.push_back({ids.name + "-pod-1", "Pod", {ids.name + "-.*"}, ns, false});
        gt.aliases.push_back(
            {ids.name + "-service-1", ids.name + "-pod-1", ids.name + "-deployment-1"});
    }

    void gt_propagation(const std::string& source_group, const std::string& target_group,
                        const std::string& condition, const std::string& effect) {
        gt.propagations.push_back({source_group, target_group, condition, effect});
    }

    // Every hidden edge must leave a trace in the caller's logs; edges off the
    // fault path get a benign line.
    void evidence_remaining_hidden_edges(const std::set<std::pair<EntityId, EntityId>>& covered) {
        for (const auto& [src, dst] : hidden_edges) {
            if (covered.count({src, dst})) continue;
            log_line(src, alert_start - 240, "info",
                     "dependency probe: calling " + dst.canonical() + " ok");
        }
    }
};

std::string svc_group(const std::string& name) { return name + "-service-1"; }

} // namespace

std::pair<Snapshot, GroundTruth> generate(const ScenarioSpec& spec) {
    if (spec.n_services < 2) raise(ErrorKind::InvalidSpec, "n_services must be >= 2");
    if (spec.hidden_edge_fraction < 0.0 || spec.hidden_edge_fraction >= 1.0) {
        raise(ErrorKind::InvalidSpec, "hidden_edge_fraction must be in [0, 1)");
    }
    if (spec.cascade_depth < 1) raise(ErrorKind::InvalidSpec, "cascade_depth must be >= 1");
    if (spec.noise_level < 0.0) raise(ErrorKind::InvalidSpec, "noise_level must be >= 0");

    Rng rng(static_cast<std::uint64_t>(spec.seed));
    Builder b;
    b.ns = spec.ns;
    b.gt.fault_kind = to_string(spec.fault);
    b.gt.seed = spec.seed;
    // 2026-03-14T09:00:00Z plus a small seeded offset.
    b.alert_start = parse_rfc3339("2026-03-14T09:00:00Z") + (spec.seed % 97) * 60;
    const Timestamp a0 = b.alert_start;

    const int n = spec.n_services;
    for (int i = 0; i < n; ++i) {
        const auto& names = service_names();
        std::string name = names[i % names.size()];
        if (i >= static_cast<int>(names.size())) name += "-" + std::to_string(i);
        b.make_service(name, rng);
    }

    // Call spine S0 -> S1 -> ... plus a few extra forward edges.
    std::vector<std::pair<int, int>> call_edges;
    for (int i = 0; i + 1 < n; ++i) call_edges.push_back({i, i + 1});
    const int extras = n / 3;
    for (int i = 0; i < extras; ++i) {
        const int from = rng.bounded(n - 1);
        const int to = from + 1 + rng.bounded(n - from - 1);
        if (std::find(call_edges.begin(), call_edges.end(), std::make_pair(from, to)) ==
            call_edges.end()) {
            call_edges.push_back({from, to});
        }
    }

    // Fault placement along the spine.
    const int sink_index = std::min(spec.cascade_depth + 1, n - 1);
    const int victim_index = std::min(spec.cascade_depth, n - 1);

    // Hidden-edge selection: for surge scenarios prefer the second chain hop
    // (the classic unregistered dynamic call); fill the rest at random.
    int hidden_budget =
        static_cast<int>(spec.hidden_edge_fraction * static_cast<double>(call_edges.size()));
    std::set<int> hidden_indices;
    if (hidden_budget > 0 && spec.fault == FaultKind::TrafficSurge && sink_index >= 2) {
        hidden_indices.insert(1); // spine edge S1 -> S2
    }
    while (static_cast<int>(hidden_indices.size()) < hidden_budget) {
        hidden_indices.insert(rng.bounded(static_cast<int>(call_edges.size())));
    }
    for (std::size_t i = 0; i < call_edges.size(); ++i) {
        const auto [from, to] = call_edges[i];
        const EdgeKind kind =
            spec.fault == FaultKind::TrafficSurge && to <= sink_index && to == from + 1
                ? EdgeKind::Traffic
                : EdgeKind::Dependency;
        b.call_edge(from, to, kind, hidden_indices.count(static_cast<int>(i)) > 0, rng);
    }

    std::set<std::pair<EntityId, EntityId>> evidenced;
    const Timestamp window_end = a0 + 900;

    auto caller_cascade = [&](int victim, int depth) {
        // Errors bubble up the call chain: S[k] logs failed calls to S[k+1].
        for (int k = victim - 1; k >= std::max(0, victim - depth); --k) {
            const auto& caller = b.services[k];
            const auto& callee = b.services[k + 1];
            const char* shape = (victim - 1 - k) % 2 == 0 ? "HTTP 500 calling " : "timeout calling ";
            b.log_line(caller.service, a0 + 60 + 30 * (victim - k), "error",
                       shape + callee.service.canonical() + " failed");
            b.log_line(caller.service, a0 + 120 + 30 * (victim - k), "error",
                       shape + callee.service.canonical() + " failed");
            evidenced.insert({caller.service, callee.service});
        }
    };

    switch (spec.fault) {
    case FaultKind::ConfigChange: {
        const auto& victim = b.services[victim_index];
        const EntityId cm = b.entity("ConfigMap", victim.name + "-config");
        b.snapshot.topology.add_edge(victim.service, cm, EdgeKind::Infrastructure);

        b.snapshot.spec_changes.push_back(
            {cm, a0 - 180, "feature flag promoOverdrive enabled; configuration updated",
             {"data.featureFlag"}});
        b.alert(victim.service, victim.name + "ErrorRateHigh", Signal::Errors, Severity::Critical,
                a0, window_end);
        b.log_line(victim.service, a0 + 60, "error",
                   "config reload error: calling " + cm.canonical() + " failed (bad feature flag)");
        b.log_line(victim.service, a0 + 150, "error",
                   "config reload error: calling " + cm.canonical() + " failed (bad feature flag)");
        b.event(victim.pod, "CrashLoopBackOff", EventType::Warning,
                "back-off restarting failed container", a0 + 120);
        caller_cascade(victim_index, spec.cascade_depth);
        if (victim_index > 0) {
            const auto& top = b.services[std::max(0, victim_index - spec.cascade_depth)];
            b.alert(top.service, top.name + "ErrorRateHigh", Signal::Errors, Severity::Warning,
                    a0 + 60, window_end);
        }

        for (int i = 0; i < n; ++i) b.gt_service_groups(b.services[i], false);
        b.gt.groups.push_back({victim.name + "-config-1", "ConfigMap",
                               {victim.name + "-config\\b"}, spec.ns, true});
        b.gt_propagation(victim.name + "-config-1", svc_group(victim.name),
                         "configuration updated with a bad feature flag",
                         victim.name + " fails to apply config and errors out");
        for (int k = victim_index - 1; k >= std::max(0, victim_index - spec.cascade_depth); --k) {
            b.gt_propagation(svc_group(b.services[k + 1].name), svc_group(b.services[k].name),
                             b.services[k + 1].name + " returns errors",
                             b.services[k].name + " sees failed calls");
        }
        b.gt.keywords.push_back(
            {victim.name + "-config-1", {"configuration"}, {"feature", "updated"}});
        break;
    }
    case FaultKind::ResourceExhaustion: {
        const auto& victim = b.services[victim_index];
        b.alert(victim.service, victim.name + "ErrorRateHigh", Signal::Errors, Severity::Critical,
                a0, window_end);
        b.event(victim.pod, "OOMKilled", EventType::Warning, "container killed: out of memory",
                a0 + 120);
        b.log_line(victim.service, a0 + 60, "error", "OutOfMemoryError: heap space exhausted");
        b.log_line(victim.service, a0 + 240, "error", "OutOfMemoryError: heap space exhausted");
        b.ramp_series(victim.service, "memory", "MiB", 200.0, 900.0);
        caller_cascade(victim_index, spec.cascade_depth);
        if (victim_index > 0) {
            const auto& top = b.services[std::max(0, victim_index - spec.cascade_depth)];
            b.alert(top.service, top.name + "Http5xx", Signal::Errors, Severity::Warning, a0 + 60,
                    window_end);
        }

        for (int i = 0; i < n; ++i) b.gt_service_groups(b.services[i], i == victim_index);
        for (int k = victim_index - 1; k >= std::max(0, victim_index - spec.cascade_depth); --k) {
            b.gt_propagation(svc_group(b.services[k + 1].name), svc_group(b.services[k].name),
                             b.services[k + 1].name + " exhausted memory and returns errors",
                             b.services[k].name + " sees failed calls");
        }
        b.gt.keywords.push_back({svc_group(victim.name), {"memory"}, {"exhaust"}});
        break;
    }
    case FaultKind::TrafficSurge: {
        const auto& src = b.services[0];
        const auto& sink = b.services[sink_index];
        b.log_line(src.service, a0 - 120, "info",
                   "marketing launch: " + std::string(kWorkloadChangeMarker) +
                       " detected, request volume surge (flash sale)");
        const int alert_hop = std::min(1, sink_index);
        b.alert(b.services[alert_hop].service, b.services[alert_hop].name + "Http5xx",
                Signal::Errors, Severity::Critical, a0, window_end);

        for (int k = 1; k <= sink_index; ++k) {
            const int pct = std::min(40, 20 + 5 * (k - 1));
            b.inbound_series(b.services[k].service, b.services[k - 1].service, 100.0, pct,
                             /*staged=*/k == sink_index);
        }
        for (int k = 1; k < sink_index; ++k) {
            const auto& hop = b.services[k];
            const auto& next = b.services[k + 1];
            const char* shape = k % 2 == 1 ? "HTTP 500 calling " : "timeout calling ";
            b.log_line(hop.service, a0 + 60 + 30 * k, "error",
                       shape + next.service.canonical() + " failed");
            b.log_line(hop.service, a0 + 120 + 30 * k, "error",
                       shape + next.service.canonical() + " failed");
            evidenced.insert({hop.service, next.service});
        }
        // OOM evidence stays at the service: the sink must revise to Symptom
        // once the staged traffic series appears, and an unrevisable pod-level
        // origin would poison the frontier.
        b.log_line(sink.service, a0 + 180, "error", "OutOfMemoryError: allocation failed");

        for (int i = 0; i < n; ++i) b.gt_service_groups(b.services[i], i == 0);
        for (int k = 0; k < sink_index; ++k) {
            b.gt_propagation(svc_group(b.services[k].name), svc_group(b.services[k + 1].name),
                             "traffic surge amplified through " + b.services[k].name,
                             b.services[k + 1].name + " receives elevated request volume");
        }
        b.gt.keywords.push_back({svc_group(src.name), {"traffic"}, {"workload", "surge"}});
        break;
    }
    case FaultKind::CascadingFailure: {
        const int root_index = sink_index;
        const auto& root = b.services[root_index];
        b.alert(root.service, root.name + "ErrorRateHigh", Signal::Errors, Severity::Critical, a0,
                window_end);
        b.event(root.service, "Evicted", EventType::Warning,
                "workload evicted under node resource pressure", a0 + 90);
        b.event(root.pod, "Evicted", EventType::Warning,
                "workload evicted under node resource pressure", a0 + 90);
        b.log_line(root.service, a0 + 120, "error", "fatal: worker evicted, shutting down");
        caller_cascade(root_index, spec.cascade_depth);
        const auto& top = b.services[std::max(0, root_index - spec.cascade_depth)];
        if (root_index > 0) {
            b.alert(top.service, top.name + "Http5xx", Signal::Errors, Severity::Warning, a0 + 60,
                    window_end);
        }

        for (int i = 0; i < n; ++i) b.gt_service_groups(b.services[i], i == root_index);
        for (int k = root_index - 1; k >= std::max(0, root_index - spec.cascade_depth); --k) {
            b.gt_propagation(svc_group(b.services[k + 1].name), svc_group(b.services[k].name),
                             b.services[k + 1].name + " evicted and unavailable",
                             b.services[k].name + " sees failed calls");
        }
        b.gt.keywords.push_back({svc_group(root.name), {"resource"}, {"evicted"}});
        break;
    }
    }

    // Noise: benign events and log lines on non-fault entities.
    std::set<EntityId> fault_entities;
    for (const auto& a : b.snapshot.alerts) fault_entities.insert(a.entity);
    for (const auto& e : b.snapshot.events) fault_entities.insert(e.entity);
    for (const auto& c : b.snapshot.spec_changes) fault_entities.insert(c.entity);
    for (const auto& l : b.snapshot.logs) fault_entities.insert(l.entity);
    const int noise_count = static_cast<int>(spec.noise_level * n);
    static const char* const noise_reasons[] = {"Scheduled", "Pulled", "Started"};
    for (int i = 0; i < noise_count; ++i) {
        const auto& svc = b.services[rng.bounded(n)];
        const EntityId* candidates[] = {&svc.service, &svc.deployment, &svc.pod};
        const EntityId& target = *candidates[rng.bounded(3)];
        const Timestamp at = a0 - 240 + rng.bounded(840);
        if (fault_entities.count(target)) continue;
        if (rng.bounded(2) == 0) {
            b.event(target, noise_reasons[rng.bounded(3)], EventType::Normal,
                    "routine lifecycle activity", at);
        } else {
            b.log_line(target, at, "info", "health check ok");
        }
    }

    b.evidence_remaining_hidden_edges(evidenced);

    // Log lines are appended per fault step; keep each chunk sorted.
    for (auto& chunk : b.snapshot.logs) {
        std::stable_sort(chunk.lines.begin(), chunk.lines.end(),
                         [](const LogLine& x, const LogLine& y) { return x.at < y.at; });
    }
    std::stable_sort(b.snapshot.metrics.begin(), b.snapshot.metrics.end(),
                     [](const MetricSeries& x, const MetricSeries& y) {
                         if (!(x.entity == y.entity)) return x.entity < y.entity;
                         return x.metric < y.metric;
                     });
    std::stable_sort(b.snapshot.logs.begin(), b.snapshot.logs.end(),
                     [](const LogChunk& x, const LogChunk& y) { return x.entity < y.entity; });
    std::stable_sort(b.snapshot.events.begin(), b.snapshot.events.end(),
                     [](const K8sEvent& x, const K8sEvent& y) {
                         if (x.at != y.at) return x.at < y.at;
                         return x.entity < y.entity;
                     });
    std::stable_sort(b.snapshot.alerts.begin(), b.snapshot.alerts.end(),
                     [](const Alert& x, const Alert& y) {
                         if (x.first_seen != y.first_seen) return x.first_seen < y.first_seen;
                         return x.name < y.name;
                     });

    return {std::move(b.snapshot), std::move(b.gt)};
}

std::pair<Snapshot, GroundTruth> generate_flash_sale() {
    Builder b;
    b.ns = "otel-demo";
    b.gt.fault_kind = "traffic-surge";
    b.gt.seed = 0;
    b.alert_start = parse_rfc3339("2026-03-14T09:00:00Z");
    const Timestamp a0 = b.alert_start;
    const Timestamp window_end = a0 + 900;

    // Fixed pod suffixes: the fixture is fully canned.
    auto fixed_service = [&](const std::string& name, const std::string& pod_suffix) {
        ServiceIds ids;
        ids.name = name;
        ids.service = b.entity("Service", name);
        ids.deployment = b.entity("Deployment", name);
        ids.pod = b.entity("Pod", name + "-" + pod_suffix);
        b.snapshot.topology.add_edge(ids.service, ids.deployment, EdgeKind::Infrastructure);
        b.snapshot.topology.add_edge(ids.deployment, ids.pod, EdgeKind::Ownership);
        b.services.push_back(ids);
        return ids;
    };
    const auto frontend = fixed_service("frontend", "7c9d8b6f5-k2x4m");
    const auto gateway = fixed_service("gateway", "5f8c7d6b4-m3p9q");
    const auto processor = fixed_service("processor", "6b9e8f7c5-r4t2w");
    const auto database = fixed_service("database", "8d7f6e5c3-z5v7n");

    // Call chain frontend -> gateway -> processor -> database; the
    // gateway -> processor hop is a dynamic dependency missing from topology.
    b.snapshot.topology.add_edge(frontend.service, gateway.service, EdgeKind::Traffic);
    b.hidden_edges.insert({gateway.service, processor.service});
    b.snapshot.topology.add_edge(processor.service, database.service, EdgeKind::Traffic);

    b.alert(gateway.service, "GatewayHighErrorRate", Signal::Errors, Severity::Critical, a0,
            window_end);

    b.log_line(frontend.service, a0 - 120, "info",
               "marketing event started: " + std::string(kWorkloadChangeMarker) +
                   " detected, request volume surge (flash sale)");
    b.log_line(gateway.service, a0 + 60, "error",
               "HTTP 500 calling " + processor.service.canonical() + " failed");
    b.log_line(gateway.service, a0 + 120, "error",
               "HTTP 500 calling " + processor.service.canonical() + " failed");
    b.log_line(processor.service, a0 + 150, "error",
               "timeout calling " + database.service.canonical() + " after 10s");
    b.log_line(database.service, a0 + 180, "error",
               "OutOfMemoryError: allocation failed in query buffer pool");

    b.inbound_series(gateway.service, frontend.service, 100.0, 20, false);
    b.inbound_series(processor.service, gateway.service, 100.0, 25, false);
    b.inbound_series(database.service, processor.service, 100.0, 30, true);

    b.gt_service_groups(frontend, true);
    b.gt_service_groups(gateway, false);
    b.gt_service_groups(processor, false);
    b.gt_service_groups(database, false);
    b.gt_propagation(svc_group("frontend"), svc_group("gateway"),
                     "flash sale workload change raises request volume",
                     "gateway receives elevated traffic");
    b.gt_propagation(svc_group("gateway"), svc_group("processor"),
                     "gateway fans out amplified traffic over a dynamic dependency",
                     "processor receives elevated traffic");
    b.gt_propagation(svc_group("processor"), svc_group("database"),
                     "processor retries amplify load", "database exhausts memory");
    b.gt.keywords.push_back({svc_group("frontend"), {"traffic"}, {"workload", "surge"}});

    for (auto& chunk : b.snapshot.logs) {
        std::stable_sort(chunk.lines.begin(), chunk.lines.end(),
                         [](const LogLine& x, const LogLine& y) { return x.at < y.at; });
    }
    return {std::move(b.snapshot), std::move(b.gt)};
}

std::vector<ScenarioSpec> scenario_suite_specs(int n, std::int64_t base_seed) {
    if (n < 1) raise(ErrorKind::InvalidSpec, "suite size must be >= 1");
    static const FaultKind kinds[] = {FaultKind::ConfigChange, FaultKind::ResourceExhaustion,
                                      FaultKind::TrafficSurge, FaultKind::CascadingFailure};
    std::vector<ScenarioSpec> specs;
    for (int i = 0; i < n; ++i) {
        ScenarioSpec spec;
        spec.seed = base_seed + i;
        spec.fault = kinds[i % 4];
        spec.n_services = 4 + (i % 3);
        spec.hidden_edge_fraction = 0.25;
        spec.cascade_depth = 1 + (i % 3);
        spec.noise_level = 0.5;
        specs.push_back(spec);
    }
    return specs;
}

std::vector<std::pair<Snapshot, GroundTruth>> scenario_suite(int n, std::int64_t base_seed) {
    std::vector<std::pair<Snapshot, GroundTruth>> out;
    for (const auto& spec : scenario_suite_specs(n, base_seed)) out.push_back(generate(spec));
    return out;
}

void save_scenario(const Snapshot& snapshot, const GroundTruth& gt,
                   const std::filesystem::path& dir) {
    save_snapshot(snapshot, dir);
    std::ofstream out(dir / "ground_truth.json");
    if (!out) raise(ErrorKind::ParseError, "cannot write " + (dir / "ground_truth.json").string());
    out << to_json(gt).dump(2) << "\n";
}

std::string manifest_hash(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](const std::string& bytes) {
        for (unsigned char c : bytes) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    for (const auto& f : files) {
        mix(std::filesystem::relative(f, dir).generic_string());
        std::ifstream in(f, std::ios::binary);
        std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        mix(content);
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace eog
