#pragma once

#include <memory>
#include <optional>

#include "zkcontact/registry.hpp"

namespace zkcontact {

// ---------------------------------------------------------------------------
// Scenario configuration: a flat, line-oriented text format (sections of
// key=value lines) that round-trips losslessly through parse/emit.

struct ScenarioAgent {
    std::string id;
    bool is_beacon = false;

    bool operator==(const ScenarioAgent&) const = default;
};

struct ScenarioAuthority {
    std::string id;
    uint64_t key_seed = 1;

    bool operator==(const ScenarioAuthority&) const = default;
};

struct ScenarioEncounter {
    std::string a;
    std::string b;
    uint32_t epoch = 0;

    bool operator==(const ScenarioEncounter&) const = default;
};

struct ScenarioDiagnosis {
    std::string agent;
    uint64_t status = kStatusPositive;
    uint32_t epoch = 0;
    std::string authority; // empty: first declared authority

    bool operator==(const ScenarioDiagnosis&) const = default;
};

struct ScenarioConfig {
    std::string name = "unnamed";
    uint64_t seed = 1;
    uint32_t scan_interval = 12; // one virtual hour of 5-minute epochs
    bool transitive = true;      // non-beacon agents extend chains on match
    std::string field = "bn254";
    uint32_t rsa_bits = 2048;
    uint32_t epoch_seconds = 300;
    uint32_t contact_window = 4032;
    uint32_t incubation = 864;
    uint32_t health_window = 288;
    bool m1_lower_bound = true;
    bool m1_upper_bound = true;

    std::vector<ScenarioAgent> agents;
    std::vector<ScenarioAuthority> authorities;
    std::vector<ScenarioEncounter> encounters;
    std::vector<ScenarioDiagnosis> diagnoses;

    const ScenarioAgent* find_agent(std::string_view id) const;
    ProtocolParams protocol_params() const; // throws Error on bad field name

    bool operator==(const ScenarioConfig&) const = default;
};

/// Parses scenario text; errors carry "<origin>:<line>: ..." context.
ScenarioConfig parse_scenario(std::string_view text, std::string_view origin = "<memory>");
ScenarioConfig load_scenario(const std::string& path); // throws Error if unreadable
/// Canonical text form; parse(emit(c)) == c for any valid config.
std::string emit_scenario(const ScenarioConfig& config);

// ---------------------------------------------------------------------------
// Simulation

/// Deployment plus authority signing keys, all derived deterministically from
/// the scenario's parameter and authority sections. Reusable across runs that
/// share those sections.
struct SimContext {
    ProtocolParams params;
    std::unique_ptr<Deployment> deployment;
    std::vector<HealthAuthority> authorities; // declaration order

    const HealthAuthority& authority_named(const ScenarioConfig& cfg,
                                           const std::string& id) const;
};

std::shared_ptr<const SimContext> make_sim_context(const ScenarioConfig& config);

struct NotificationEvent {
    std::string agent;
    uint32_t order = 0;         // chain hops; 1 = direct contact
    uint32_t epoch = 0;         // scan epoch at which the match verified
    uint32_t contact_epoch = 0; // epoch of the agent's matching log entry
    Bytes h_key;                // digest bytes the registry indexed

    bool operator==(const NotificationEvent&) const = default;
};

struct LatencyRow {
    std::string agent;
    std::optional<uint32_t> first_order; // earliest order-1 notification
    std::optional<uint32_t> transitive;  // earliest order-2+ notification
};

struct SimMetrics {
    std::string scenario;
    std::vector<NotificationEvent> notifications; // processing order
    uint64_t registry_accepted = 0;
    uint64_t registry_duplicates = 0;
    uint64_t registry_invalid = 0;
    uint64_t proofs_refused = 0;
    uint64_t matches_unverified = 0;

    /// One row per notified agent, ordered by agent id.
    std::vector<LatencyRow> latency_table() const;
};

/// Drives the scenario over a fresh in-process registry whose receive clock
/// is the virtual epoch clock.
SimMetrics run_scenario(const ScenarioConfig& config);
/// Same, against a caller-supplied registry (e.g. a TCP client).
SimMetrics run_scenario(const ScenarioConfig& config, RegistryClient& client);
/// Same, reusing a prebuilt context; throws Error if the context does not
/// match the config's parameter and authority sections.
SimMetrics run_scenario(const ScenarioConfig& config, RegistryClient& client,
                        const SimContext& ctx);

/// Full independent re-verification of a published record: proof, signature
/// or chain. Returns the exposure order on success, nullopt on any failure.
std::optional<uint32_t> verify_registry_entry(const SimContext& ctx, BundleKind kind,
                                              const Bytes& body);

/// Human-oriented summary; stable across runs of the same (config, seed).
std::string report_text(const SimMetrics& metrics);
/// Delimited table: header "agent,order,notify_epoch,latency_epochs", one row
/// per notification event in processing order.
std::string report_table(const SimMetrics& metrics);

/// Small random contact graph with one early diagnosis plus optional later
/// ones; every parameter drawn from rng so runs are reproducible by seed.
ScenarioConfig random_scenario(std::mt19937_64& rng, size_t max_agents = 10,
                               uint32_t max_epochs = 200);

} // namespace zkcontact
