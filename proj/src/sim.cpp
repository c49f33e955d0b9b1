#include "zkcontact/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "zkcontact/digest.hpp"
#include "zkcontact/errors.hpp"

namespace zkcontact {

// ---------------------------------------------------------------------------
// Scenario text format

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_words(std::string_view s) {
    std::vector<std::string_view> out;
    size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        size_t start = i;
        while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
        if (i > start) out.push_back(s.substr(start, i - start));
    }
    return out;
}

bool valid_id(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') {
            return false;
        }
    }
    return true;
}

/// Location-prefixed scenario schema violation.
ParseError at(std::string_view origin, size_t line, const std::string& msg) {
    return ParseError(std::string(origin) + ":" + std::to_string(line) + ": " + msg);
}

uint64_t parse_u64_at(std::string_view origin, size_t line, std::string_view word,
                      std::string_view what) {
    uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(word.data(), word.data() + word.size(), v);
    if (ec != std::errc{} || ptr != word.data() + word.size()) {
        throw at(origin, line, "expected a non-negative integer for " + std::string(what) +
                                   ", got '" + std::string(word) + "'");
    }
    return v;
}

uint32_t parse_u32_at(std::string_view origin, size_t line, std::string_view word,
                      std::string_view what) {
    uint64_t v = parse_u64_at(origin, line, word, what);
    if (v > std::numeric_limits<uint32_t>::max()) {
        throw at(origin, line, std::string(what) + " out of range: " + std::string(word));
    }
    return static_cast<uint32_t>(v);
}

bool parse_switch_at(std::string_view origin, size_t line, std::string_view word,
                     std::string_view key) {
    if (word == "on") return true;
    if (word == "off") return false;
    throw at(origin, line,
             "expected on|off for " + std::string(key) + ", got '" + std::string(word) + "'");
}

const char* status_word(uint64_t status) {
    return status == kStatusPositive ? "positive" : "negative";
}

} // namespace

const ScenarioAgent* ScenarioConfig::find_agent(std::string_view id) const {
    for (const ScenarioAgent& a : agents) {
        if (a.id == id) return &a;
    }
    return nullptr;
}

ProtocolParams ScenarioConfig::protocol_params() const {
    const Field* f = nullptr;
    if (field == "bn254") {
        f = &Field::bn254();
    } else if (field == "mersenne61") {
        f = &Field::mersenne61();
    } else if (field == "p251") {
        f = &Field::p251();
    } else {
        throw Error("unknown field '" + field + "'");
    }
    ProtocolParams p = ProtocolParams::make(*f, rsa_bits, epoch_seconds);
    p.contact_window_epochs = contact_window;
    p.incubation_epochs = incubation;
    p.health_window_epochs = health_window;
    p.m1_lower_bound = m1_lower_bound;
    p.m1_upper_bound = m1_upper_bound;
    p.validate();
    return p;
}

ScenarioConfig parse_scenario(std::string_view text, std::string_view origin) {
    ScenarioConfig cfg;
    cfg.name.clear(); // must be set explicitly

    enum class Section { None, Scenario, Agents, Authorities, Encounters, Diagnoses };
    Section section = Section::None;
    std::set<std::string, std::less<>> seen_keys; // [scenario] keys appear once
    std::set<std::string, std::less<>> agent_ids;
    std::set<std::string, std::less<>> authority_ids;

    size_t line_no = 0;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string_view raw =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;

        if (line.front() == '[') {
            if (line.back() != ']') throw at(origin, line_no, "unterminated section header");
            std::string_view name = line.substr(1, line.size() - 2);
            if (name == "scenario") {
                section = Section::Scenario;
            } else if (name == "agents") {
                section = Section::Agents;
            } else if (name == "authorities") {
                section = Section::Authorities;
            } else if (name == "encounters") {
                section = Section::Encounters;
            } else if (name == "diagnoses") {
                section = Section::Diagnoses;
            } else {
                throw at(origin, line_no, "unknown section [" + std::string(name) + "]");
            }
            continue;
        }

        size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw at(origin, line_no, "expected key = value, got '" + std::string(line) + "'");
        }
        std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (key.empty()) throw at(origin, line_no, "empty key");
        if (value.empty()) throw at(origin, line_no, "empty value for '" + key + "'");

        switch (section) {
        case Section::None:
            throw at(origin, line_no, "'" + key + "' appears before any section header");

        case Section::Scenario: {
            if (!seen_keys.insert(key).second) {
                throw at(origin, line_no, "duplicate key '" + key + "' in [scenario]");
            }
            if (key == "name") {
                if (!valid_id(value)) {
                    throw at(origin, line_no, "scenario name must be alphanumeric/._-");
                }
                cfg.name = std::string(value);
            } else if (key == "seed") {
                cfg.seed = parse_u64_at(origin, line_no, value, "seed");
            } else if (key == "scan_interval") {
                cfg.scan_interval = parse_u32_at(origin, line_no, value, "scan_interval");
                if (cfg.scan_interval == 0) {
                    throw at(origin, line_no, "scan_interval must be at least 1");
                }
            } else if (key == "transitive") {
                cfg.transitive = parse_switch_at(origin, line_no, value, key);
            } else if (key == "field") {
                cfg.field = std::string(value);
            } else if (key == "rsa_bits") {
                cfg.rsa_bits = parse_u32_at(origin, line_no, value, "rsa_bits");
            } else if (key == "epoch_seconds") {
                cfg.epoch_seconds = parse_u32_at(origin, line_no, value, "epoch_seconds");
            } else if (key == "contact_window") {
                cfg.contact_window = parse_u32_at(origin, line_no, value, "contact_window");
            } else if (key == "incubation") {
                cfg.incubation = parse_u32_at(origin, line_no, value, "incubation");
            } else if (key == "health_window") {
                cfg.health_window = parse_u32_at(origin, line_no, value, "health_window");
            } else if (key == "m1_lower_bound") {
                cfg.m1_lower_bound = parse_switch_at(origin, line_no, value, key);
            } else if (key == "m1_upper_bound") {
                cfg.m1_upper_bound = parse_switch_at(origin, line_no, value, key);
            } else {
                throw at(origin, line_no, "unknown key '" + key + "' in [scenario]");
            }
            break;
        }

        case Section::Agents: {
            if (key != "agent" && key != "beacon") {
                throw at(origin, line_no, "unknown key '" + key + "' in [agents]");
            }
            if (!valid_id(value)) {
                throw at(origin, line_no, "invalid agent id '" + std::string(value) + "'");
            }
            if (!agent_ids.insert(std::string(value)).second) {
                throw at(origin, line_no, "duplicate agent id '" + std::string(value) + "'");
            }
            cfg.agents.push_back({std::string(value), key == "beacon"});
            break;
        }

        case Section::Authorities: {
            if (key != "authority") {
                throw at(origin, line_no, "unknown key '" + key + "' in [authorities]");
            }
            std::vector<std::string_view> words = split_words(value);
            if (words.size() != 2) {
                throw at(origin, line_no, "authority takes '<id> <key-seed>'");
            }
            if (!valid_id(words[0])) {
                throw at(origin, line_no, "invalid authority id '" + std::string(words[0]) + "'");
            }
            if (!authority_ids.insert(std::string(words[0])).second) {
                throw at(origin, line_no, "duplicate authority id '" + std::string(words[0]) + "'");
            }
            cfg.authorities.push_back(
                {std::string(words[0]), parse_u64_at(origin, line_no, words[1], "key seed")});
            break;
        }

        case Section::Encounters: {
            if (key != "meet") {
                throw at(origin, line_no, "unknown key '" + key + "' in [encounters]");
            }
            std::vector<std::string_view> words = split_words(value);
            if (words.size() != 3) {
                throw at(origin, line_no, "meet takes '<agent> <agent> <epoch>'");
            }
            for (int i = 0; i < 2; ++i) {
                if (!agent_ids.contains(words[i])) {
                    throw at(origin, line_no, "unknown agent '" + std::string(words[i]) + "'");
                }
            }
            if (words[0] == words[1]) {
                throw at(origin, line_no, "an agent cannot meet itself");
            }
            cfg.encounters.push_back({std::string(words[0]), std::string(words[1]),
                                      parse_u32_at(origin, line_no, words[2], "epoch")});
            break;
        }

        case Section::Diagnoses: {
            if (key != "diagnose") {
                throw at(origin, line_no, "unknown key '" + key + "' in [diagnoses]");
            }
            std::vector<std::string_view> words = split_words(value);
            if (words.size() != 3 && words.size() != 4) {
                throw at(origin, line_no, "diagnose takes '<agent> <status> <epoch> [authority]'");
            }
            if (!agent_ids.contains(words[0])) {
                throw at(origin, line_no, "unknown agent '" + std::string(words[0]) + "'");
            }
            uint64_t status;
            if (words[1] == "positive") {
                status = kStatusPositive;
            } else if (words[1] == "negative") {
                status = kStatusNegative;
            } else {
                throw at(origin, line_no,
                         "unknown status '" + std::string(words[1]) + "' (positive|negative)");
            }
            std::string authority;
            if (words.size() == 4) {
                if (!authority_ids.contains(words[3])) {
                    throw at(origin, line_no,
                             "unknown authority '" + std::string(words[3]) + "'");
                }
                authority = std::string(words[3]);
            }
            cfg.diagnoses.push_back({std::string(words[0]), status,
                                     parse_u32_at(origin, line_no, words[2], "epoch"),
                                     std::move(authority)});
            break;
        }
        }
    }

    if (cfg.name.empty()) throw at(origin, line_no, "missing 'name' in [scenario]");
    if (!cfg.diagnoses.empty() && cfg.authorities.empty()) {
        throw at(origin, line_no, "diagnoses declared but no authorities");
    }
    cfg.protocol_params(); // validate parameter combination
    return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open scenario file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

std::string emit_scenario(const ScenarioConfig& config) {
    std::ostringstream out;
    out << "[scenario]\n";
    out << "name = " << config.name << "\n";
    out << "seed = " << config.seed << "\n";
    out << "scan_interval = " << config.scan_interval << "\n";
    out << "transitive = " << (config.transitive ? "on" : "off") << "\n";
    out << "field = " << config.field << "\n";
    out << "rsa_bits = " << config.rsa_bits << "\n";
    out << "epoch_seconds = " << config.epoch_seconds << "\n";
    out << "contact_window = " << config.contact_window << "\n";
    out << "incubation = " << config.incubation << "\n";
    out << "health_window = " << config.health_window << "\n";
    out << "m1_lower_bound = " << (config.m1_lower_bound ? "on" : "off") << "\n";
    out << "m1_upper_bound = " << (config.m1_upper_bound ? "on" : "off") << "\n";
    out << "\n[agents]\n";
    for (const ScenarioAgent& a : config.agents) {
        out << (a.is_beacon ? "beacon" : "agent") << " = " << a.id << "\n";
    }
    out << "\n[authorities]\n";
    for (const ScenarioAuthority& a : config.authorities) {
        out << "authority = " << a.id << " " << a.key_seed << "\n";
    }
    out << "\n[encounters]\n";
    for (const ScenarioEncounter& e : config.encounters) {
        out << "meet = " << e.a << " " << e.b << " " << e.epoch << "\n";
    }
    out << "\n[diagnoses]\n";
    for (const ScenarioDiagnosis& d : config.diagnoses) {
        out << "diagnose = " << d.agent << " " << status_word(d.status) << " " << d.epoch;
        if (!d.authority.empty()) out << " " << d.authority;
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Simulation

const HealthAuthority& SimContext::authority_named(const ScenarioConfig& cfg,
                                                   const std::string& id) const {
    if (authorities.empty()) throw Error("no authorities in simulation context");
    if (id.empty()) return authorities.front();
    for (size_t i = 0; i < cfg.authorities.size(); ++i) {
        if (cfg.authorities[i].id == id) return authorities.at(i);
    }
    throw Error("unknown authority '" + id + "'");
}

std::shared_ptr<const SimContext> make_sim_context(const ScenarioConfig& config) {
    auto ctx = std::make_shared<SimContext>();
    ctx->params = config.protocol_params();
    AuthorityDirectory directory;
    std::vector<RsaKeyPair> keys;
    keys.reserve(config.authorities.size());
    for (const ScenarioAuthority& a : config.authorities) {
        std::mt19937_64 key_rng(a.key_seed);
        RsaKeyPair kp = rsa_generate(key_rng, ctx->params.rsa_modulus_bits);
        directory.add(a.id, kp.pub, ctx->params);
        keys.push_back(std::move(kp));
    }
    ctx->deployment = std::make_unique<Deployment>(ctx->params, std::move(directory));
    for (RsaKeyPair& kp : keys) {
        ctx->authorities.emplace_back(*ctx->deployment, std::move(kp),
                                      std::vector<uint64_t>{kStatusPositive, kStatusNegative});
    }
    return ctx;
}

namespace {

struct PendingChain {
    PcdMessage message;
    ContactRecord entry;
};

struct SimAgent {
    const ScenarioAgent* decl = nullptr;
    AgentState state;
    uint64_t cursor = 0;
    std::set<Bytes> own_keys;                // digests this agent published
    std::set<std::pair<Bytes, Bytes>> hops;  // (matched h, onward h) already proven
    std::vector<PendingChain> chains;        // verified matches still extendable
};

enum class Phase : uint8_t { Encounter = 0, Diagnosis = 1, Scan = 2 };

struct Event {
    uint32_t epoch = 0;
    Phase phase{};
    uint32_t seq = 0;
    size_t subject = 0; // encounter/diagnosis index, or scanning agent index
};

/// Mirrors the extension predicate's enabled epoch bounds so the simulator
/// does not attempt provably hopeless hops.
bool hop_epoch_ok(const ProtocolParams& p, uint32_t t1, uint32_t t2) {
    if (p.m1_lower_bound && uint64_t(t2) < uint64_t(t1) + p.incubation_epochs) return false;
    if (p.m1_upper_bound &&
        (t2 < t1 || uint64_t(t2) > uint64_t(t1) + p.contact_window_epochs)) {
        return false;
    }
    return true;
}

SimMetrics run_impl(const ScenarioConfig& config, RegistryClient& client, const SimContext& ctx,
                    int64_t* clock_cell) {
    ProtocolParams expect = config.protocol_params();
    if (!(expect == ctx.params)) {
        throw Error("simulation context parameters do not match the scenario");
    }
    const std::vector<AuthorityRecord>& records = ctx.deployment->directory().records();
    if (records.size() != config.authorities.size()) {
        throw Error("simulation context authorities do not match the scenario");
    }
    for (size_t i = 0; i < records.size(); ++i) {
        if (records[i].id != config.authorities[i].id) {
            throw Error("simulation context authorities do not match the scenario");
        }
    }

    SimMetrics metrics;
    metrics.scenario = config.name;

    std::mt19937_64 rng(config.seed);
    std::vector<SimAgent> agents;
    std::map<std::string, size_t> by_id;
    agents.reserve(config.agents.size());
    for (const ScenarioAgent& decl : config.agents) {
        by_id.emplace(decl.id, agents.size());
        agents.push_back({&decl, AgentState::generate(ctx.params, rng)});
    }

    // One flat, pre-sorted event list; within an epoch encounters precede
    // diagnoses precede scans, ties broken by declaration order.
    std::vector<Event> events;
    uint32_t seq = 0;
    uint32_t last_input = 0;
    for (size_t i = 0; i < config.encounters.size(); ++i) {
        events.push_back({config.encounters[i].epoch, Phase::Encounter, seq++, i});
        last_input = std::max(last_input, config.encounters[i].epoch);
    }
    for (size_t i = 0; i < config.diagnoses.size(); ++i) {
        events.push_back({config.diagnoses[i].epoch, Phase::Diagnosis, seq++, i});
        last_input = std::max(last_input, config.diagnoses[i].epoch);
    }
    // Run scans long enough after the last input for a maximal chain to
    // propagate: one scan round per agent, plus one.
    uint64_t horizon = uint64_t(last_input) +
                       uint64_t(config.scan_interval) * (config.agents.size() + 1);
    horizon = std::min<uint64_t>(horizon, std::numeric_limits<uint32_t>::max());
    for (uint64_t t = config.scan_interval; t <= horizon; t += config.scan_interval) {
        for (size_t i = 0; i < agents.size(); ++i) {
            events.push_back({static_cast<uint32_t>(t), Phase::Scan, seq++, i});
        }
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return std::tie(a.epoch, a.phase, a.seq) < std::tie(b.epoch, b.phase, b.seq);
    });

    auto publish = [&](SimAgent& who, BundleKind kind, const Bytes& body) {
        PublishResult r = client.publish(kind, body);
        switch (r.status) {
        case PublishStatus::Accepted:
            ++metrics.registry_accepted;
            who.own_keys.insert(bundle_index_key(kind, body));
            break;
        case PublishStatus::Duplicate:
            ++metrics.registry_duplicates;
            break;
        case PublishStatus::Invalid:
            ++metrics.registry_invalid;
            break;
        }
    };

    for (const Event& ev : events) {
        if (clock_cell) *clock_cell = ev.epoch;
        switch (ev.phase) {
        case Phase::Encounter: {
            const ScenarioEncounter& enc = config.encounters[ev.subject];
            SimAgent& a = agents[by_id.at(enc.a)];
            SimAgent& b = agents[by_id.at(enc.b)];
            a.state.advance_clock(enc.epoch);
            b.state.advance_clock(enc.epoch);
            BigUint token_a = a.state.token_at(enc.epoch);
            BigUint token_b = b.state.token_at(enc.epoch);
            a.state.record_contact(token_b, enc.epoch);
            b.state.record_contact(token_a, enc.epoch);
            break;
        }

        case Phase::Diagnosis: {
            const ScenarioDiagnosis& d = config.diagnoses[ev.subject];
            SimAgent& agent = agents[by_id.at(d.agent)];
            agent.state.advance_clock(d.epoch);
            try {
                CredentialRequest req =
                    make_credential_request(agent.state, *ctx.deployment, d.status, d.epoch);
                const HealthAuthority& authority = ctx.authority_named(config, d.authority);
                DiagnosisCredential cred = authority.issue(req);
                if (cred.status != kStatusPositive) break; // credential held, nothing published
                for (const PcdMessage& seedmsg :
                     build_seed_messages(agent.state, *ctx.deployment, cred)) {
                    publish(agent, BundleKind::Transitive, serialize_pcd_message(seedmsg));
                }
            } catch (const Error&) {
                ++metrics.proofs_refused;
            }
            break;
        }

        case Phase::Scan: {
            SimAgent& agent = agents[ev.subject];
            uint32_t now = ev.epoch;
            agent.state.advance_clock(now);
            bool extends = config.transitive || agent.decl->is_beacon;
            while (true) {
                QueryPage page = client.query_since(agent.cursor);
                if (page.entries.empty()) break;
                agent.cursor = page.next_cursor;
                std::vector<BundleRecord> batch;
                batch.reserve(page.entries.size());
                for (RegistryEntry& e : page.entries) {
                    if (agent.own_keys.contains(e.h_index_key)) continue;
                    batch.push_back({e.kind, std::move(e.body)});
                }
                std::vector<Match> matches =
                    scan_and_match(agent.state, *ctx.deployment, batch);
                for (Match& match : matches) {
                    if (!match.verified) {
                        ++metrics.matches_unverified;
                        continue;
                    }
                    metrics.notifications.push_back({agent.decl->id, match.order, now,
                                                     match.entry.t,
                                                     match.entry.h.to_bytes()});
                    if (extends && match.message && match.message->depth < kMaxChainDepth) {
                        agent.chains.push_back({std::move(*match.message), match.entry});
                    }
                }
            }
            if (!extends) break;
            // Extension pass: chains stay live for the whole window, so a
            // contact made after the match still produces its hop.
            std::erase_if(agent.chains, [&](const PendingChain& chain) {
                return ctx.params.m1_upper_bound &&
                       uint64_t(chain.entry.t) + ctx.params.contact_window_epochs < now;
            });
            for (const PendingChain& chain : agent.chains) {
                Bytes h_bytes = chain.entry.h.to_bytes();
                for (const ContactRecord& onward : agent.state.contact_log()) {
                    Bytes onward_bytes = onward.h.to_bytes();
                    if (onward_bytes == h_bytes) continue;
                    if (!hop_epoch_ok(ctx.params, chain.entry.t, onward.t)) continue;
                    if (!agent.hops.emplace(h_bytes, onward_bytes).second) continue;
                    try {
                        TransitiveBundle hop = build_transitive_bundle(
                            agent.state, *ctx.deployment, chain.message, chain.entry, onward);
                        publish(agent, BundleKind::Transitive,
                                serialize_pcd_message(hop.message));
                    } catch (const Error&) {
                        ++metrics.proofs_refused;
                    }
                }
            }
            break;
        }
        }
    }
    return metrics;
}

} // namespace

SimMetrics run_scenario(const ScenarioConfig& config) {
    std::shared_ptr<const SimContext> ctx = make_sim_context(config);
    auto clock_cell = std::make_shared<int64_t>(0);
    Registry::Options opts;
    opts.clock = [clock_cell] { return *clock_cell; };
    Registry registry(std::move(opts));
    InprocRegistryClient client(registry);
    return run_impl(config, client, *ctx, clock_cell.get());
}

SimMetrics run_scenario(const ScenarioConfig& config, RegistryClient& client) {
    std::shared_ptr<const SimContext> ctx = make_sim_context(config);
    return run_impl(config, client, *ctx, nullptr);
}

SimMetrics run_scenario(const ScenarioConfig& config, RegistryClient& client,
                        const SimContext& ctx) {
    return run_impl(config, client, ctx, nullptr);
}

std::optional<uint32_t> verify_registry_entry(const SimContext& ctx, BundleKind kind,
                                              const Bytes& body) {
    try {
        if (kind == BundleKind::Contact) {
            ContactBundle bundle = parse_contact_bundle(body);
            std::vector<FieldElement> publics = {bundle.h, bundle.h_s};
            if (!verify(ctx.deployment->contact_keys().verifying_key, publics, bundle.proof)) {
                return std::nullopt;
            }
            for (const AuthorityRecord& rec : ctx.deployment->directory().records()) {
                if (rsa_verify(rec.key, bundle.h_s.value(), bundle.signature)) return 1;
            }
            return std::nullopt;
        }
        PcdMessage msg = parse_pcd_message(body);
        if (!pcd_verify(ctx.deployment->predicates(), msg)) return std::nullopt;
        return msg.depth;
    } catch (const ParseError&) {
        return std::nullopt;
    }
}

// ---------------------------------------------------------------------------
// Metrics and reports

std::vector<LatencyRow> SimMetrics::latency_table() const {
    std::map<std::string, LatencyRow> rows;
    for (const NotificationEvent& n : notifications) {
        LatencyRow& row = rows.try_emplace(n.agent, LatencyRow{n.agent, {}, {}}).first->second;
        std::optional<uint32_t>& slot = n.order == 1 ? row.first_order : row.transitive;
        if (!slot || n.epoch < *slot) slot = n.epoch;
    }
    std::vector<LatencyRow> out;
    out.reserve(rows.size());
    for (auto& [id, row] : rows) out.push_back(std::move(row));
    return out;
}

std::string report_table(const SimMetrics& metrics) {
    std::ostringstream out;
    out << "agent,order,notify_epoch,latency_epochs\n";
    for (const NotificationEvent& n : metrics.notifications) {
        out << n.agent << "," << n.order << "," << n.epoch << ","
            << (n.epoch - n.contact_epoch) << "\n";
    }
    return out.str();
}

std::string report_text(const SimMetrics& metrics) {
    size_t width = 5;
    for (const NotificationEvent& n : metrics.notifications) {
        width = std::max(width, n.agent.size());
    }
    auto pad = [&](const std::string& s) {
        return s + std::string(width + 2 - s.size(), ' ');
    };

    std::ostringstream out;
    out << "scenario: " << metrics.scenario << "\n";
    out << "notifications: " << metrics.notifications.size() << "\n";
    for (const NotificationEvent& n : metrics.notifications) {
        out << "  epoch " << n.epoch << "  " << pad(n.agent) << "order " << n.order
            << "  contact@" << n.contact_epoch << "  h "
            << hex_encode(n.h_key).substr(0, 8) << "\n";
    }
    out << "latency:\n";
    out << "  " << pad("agent") << "first_order  transitive\n";
    for (const LatencyRow& row : metrics.latency_table()) {
        std::string first = row.first_order ? std::to_string(*row.first_order) : "-";
        std::string trans = row.transitive ? std::to_string(*row.transitive) : "-";
        out << "  " << pad(row.agent) << first
            << std::string(first.size() < 13 ? 13 - first.size() : 1, ' ') << trans << "\n";
    }
    out << "registry: accepted " << metrics.registry_accepted << ", duplicates "
        << metrics.registry_duplicates << ", invalid " << metrics.registry_invalid << "\n";
    out << "refusals: proofs " << metrics.proofs_refused << ", unverified_matches "
        << metrics.matches_unverified << "\n";
    return out.str();
}

// ---------------------------------------------------------------------------
// Random scenario generation

ScenarioConfig random_scenario(std::mt19937_64& rng, size_t max_agents, uint32_t max_epochs) {
    if (max_agents < 3) throw Error("random scenarios need at least 3 agents");
    ScenarioConfig cfg;
    cfg.name = "random-" + std::to_string(rng() % 1000000);
    cfg.seed = rng();
    cfg.scan_interval = 12;
    cfg.transitive = true;
    cfg.field = "bn254";
    cfg.rsa_bits = 256;
    cfg.incubation = 24; // short hop spacing keeps chains inside the horizon

    size_t n = 3 + rng() % (max_agents - 2);
    for (size_t i = 0; i < n; ++i) {
        cfg.agents.push_back({"a" + std::to_string(i), false});
    }
    cfg.authorities.push_back({"health", 7});

    // A guided path guarantees multi-hop structure; epoch gaps clear the
    // incubation bound.
    std::vector<size_t> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = i;
    for (size_t i = n - 1; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);

    size_t path_edges = 2 + rng() % std::min<size_t>(n - 2, 3);
    uint32_t t = static_cast<uint32_t>(rng() % 30);
    std::vector<uint32_t> path_epochs;
    for (size_t k = 0; k < path_edges && t <= max_epochs; ++k) {
        cfg.encounters.push_back({cfg.agents[order[k]].id, cfg.agents[order[k + 1]].id, t});
        path_epochs.push_back(t);
        t += cfg.incubation + static_cast<uint32_t>(rng() % 20);
    }

    // Noise edges anywhere in the window.
    size_t extra = rng() % (2 * n);
    for (size_t e = 0; e < extra; ++e) {
        size_t a = rng() % n;
        size_t b = rng() % n;
        uint32_t when = static_cast<uint32_t>(rng() % max_epochs);
        if (a == b) continue;
        cfg.encounters.push_back({cfg.agents[a].id, cfg.agents[b].id, when});
    }

    // The path head is diagnosed shortly after its first contact; sometimes
    // the second hop is diagnosed a few scan rounds later, giving first-order
    // notification a slower route to the same hop-2 agents.
    cfg.diagnoses.push_back({cfg.agents[order[0]].id, kStatusPositive,
                             path_epochs.front() + 1 + static_cast<uint32_t>(rng() % 10), ""});
    if (path_epochs.size() >= 2 && rng() % 2 == 0) {
        cfg.diagnoses.push_back({cfg.agents[order[1]].id, kStatusPositive,
                                 path_epochs[1] + 30 + static_cast<uint32_t>(rng() % 60), ""});
    }
    return cfg;
}

} // namespace zkcontact
