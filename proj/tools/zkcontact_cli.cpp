#include <atomic>
#include <csignal>
#include <cstdio>
#include <thread>

#include "CLI11.hpp"
#include "zkcontact/circuits.hpp"
#include "zkcontact/digest.hpp"
#include "zkcontact/errors.hpp"
#include "zkcontact/sim.hpp"

using namespace zkcontact;

namespace {

int cmd_run(const std::string& path, std::optional<uint64_t> seed,
            std::optional<std::string> transitive, const std::string& registry,
            const std::string& registry_log, const std::string& format) {
    ScenarioConfig cfg = load_scenario(path);
    if (seed) cfg.seed = *seed;
    if (transitive) {
        if (*transitive != "on" && *transitive != "off") {
            throw Error("--transitive takes on|off");
        }
        cfg.transitive = *transitive == "on";
    }

    SimMetrics metrics;
    if (registry == "inproc") {
        if (registry_log.empty()) {
            metrics = run_scenario(cfg);
        } else {
            Registry::Options opts;
            opts.log_path = registry_log;
            Registry reg(std::move(opts));
            InprocRegistryClient client(reg);
            metrics = run_scenario(cfg, client);
        }
    } else {
        size_t colon = registry.rfind(':');
        if (colon == std::string::npos) {
            throw Error("--registry takes host:port or 'inproc'");
        }
        std::string host = registry.substr(0, colon);
        int port = std::stoi(registry.substr(colon + 1));
        if (port <= 0 || port > 65535) throw Error("bad registry port");
        TcpRegistryClient client(host, static_cast<uint16_t>(port));
        metrics = run_scenario(cfg, client);
    }

    std::fputs((format == "table" ? report_table(metrics) : report_text(metrics)).c_str(),
               stdout);
    return 0;
}

int cmd_verify_chain(const std::string& log_path, const std::string& h_hex,
                     const std::string& scenario_path) {
    Registry::Options opts;
    opts.log_path = log_path;
    Registry reg(std::move(opts));

    ScenarioConfig cfg = load_scenario(scenario_path);
    std::shared_ptr<const SimContext> ctx = make_sim_context(cfg);

    size_t found = 0;
    size_t verified = 0;
    uint64_t cursor = 0;
    while (true) {
        QueryPage page = reg.query_since(cursor);
        if (page.entries.empty()) break;
        cursor = page.next_cursor;
        for (const RegistryEntry& entry : page.entries) {
            if (!hex_encode(entry.h_index_key).starts_with(h_hex)) continue;
            ++found;
            std::optional<uint32_t> order = verify_registry_entry(*ctx, entry.kind, entry.body);
            size_t links = 1;
            if (entry.kind == BundleKind::Transitive) {
                try {
                    links = pcd_chain(parse_pcd_message(entry.body)).size();
                } catch (const ParseError&) {
                }
            }
            std::printf("seq %llu  %s  links %zu  %s\n",
                        static_cast<unsigned long long>(entry.seq),
                        entry.kind == BundleKind::Contact ? "contact" : "transitive", links,
                        order ? ("VERIFIED order " + std::to_string(*order)).c_str()
                              : "FAILED");
            if (order) ++verified;
        }
    }
    if (found == 0) {
        std::printf("no entries for digest %s\n", h_hex.c_str());
        return 1;
    }
    return verified == found ? 0 : 1;
}

int cmd_circuit_stats(const std::string& field, uint32_t rsa_bits, uint32_t epoch_seconds) {
    ScenarioConfig probe;
    probe.name = "stats";
    probe.field = field;
    probe.rsa_bits = rsa_bits;
    probe.epoch_seconds = epoch_seconds;
    ProtocolParams params = probe.protocol_params();

    std::mt19937_64 rng(1);
    RsaKeyPair authority = rsa_generate(rng, params.rsa_modulus_bits);

    struct Row {
        const char* name;
        const CircuitSpec* spec;
    };
    ContactCircuit contact(params);
    CredentialCircuit credential(params);
    HealthCircuit health(params);
    PcdM1Circuit m1(params);
    PcdM0Circuit m0(params, authority.pub);
    const Row rows[] = {
        {"contact", &contact.spec()},    {"credential", &credential.spec()},
        {"health", &health.spec()},      {"pcd-m0-seed", &m0.spec()},
        {"pcd-m1-extend", &m1.spec()},
    };

    std::printf("%-14s  %11s  %7s  %9s\n", "circuit", "constraints", "publics", "auxiliary");
    for (const Row& row : rows) {
        std::printf("%-14s  %11zu  %7u  %9u\n", row.name, row.spec->cs.constraints.size(),
                    row.spec->cs.num_public, row.spec->cs.num_aux);
    }
    return 0;
}

std::atomic<bool> g_stop{false};

int cmd_registry_serve(uint16_t port, const std::string& log_path, size_t page_limit) {
    Registry::Options opts;
    opts.log_path = log_path;
    if (page_limit > 0) opts.page_limit = page_limit;
    Registry reg(std::move(opts));
    RegistryServer server(reg);
    uint16_t bound = server.start(port);
    std::printf("listening on 127.0.0.1:%u\n", bound);
    std::fflush(stdout);

    std::signal(SIGINT, [](int) { g_stop = true; });
    std::signal(SIGTERM, [](int) { g_stop = true; });
    while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    std::printf("stopped; %zu entries\n", reg.size());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"privacy-preserving contact tracing: simulator, registry and chain tools"};
    app.require_subcommand(1);

    // run
    auto* run = app.add_subcommand("run", "run a scenario and print its report");
    std::string scenario;
    std::optional<uint64_t> seed;
    std::optional<std::string> transitive;
    std::string registry = "inproc";
    std::string registry_log;
    std::string format = "text";
    run->add_option("scenario", scenario, "scenario file")->required();
    run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--transitive", transitive, "override transitive publication (on|off)");
    run->add_option("--registry", registry, "registry: 'inproc' or host:port");
    run->add_option("--registry-log", registry_log,
                    "persist the in-process registry to this log file");
    run->add_option("--report", format, "report format (text|table)")
        ->check(CLI::IsMember({"text", "table"}));

    // verify-chain
    auto* vc = app.add_subcommand("verify-chain",
                                  "re-verify the published record(s) for a digest offline");
    std::string vc_log, vc_hex, vc_scenario;
    vc->add_option("registry-log", vc_log, "registry log file")->required();
    vc->add_option("digest", vc_hex, "contact digest, hex (prefix allowed)")->required();
    vc->add_option("--scenario", vc_scenario, "scenario file the deployment derives from")
        ->required();

    // circuit-stats
    auto* stats = app.add_subcommand("circuit-stats", "print constraint counts per circuit");
    std::string cs_field = "bn254";
    uint32_t cs_rsa = 2048;
    uint32_t cs_epoch = 300;
    stats->add_option("--field", cs_field, "prime field (bn254|mersenne61|p251)");
    stats->add_option("--rsa-bits", cs_rsa, "authority modulus width");
    stats->add_option("--epoch-seconds", cs_epoch, "epoch length in seconds");

    // registry-serve
    auto* serve = app.add_subcommand("registry-serve", "host a registry over TCP");
    uint16_t port = 0;
    std::string serve_log;
    size_t page_limit = 0;
    serve->add_option("--listen", port, "port to bind on 127.0.0.1 (0 = ephemeral)");
    serve->add_option("--log", serve_log, "append-only log file for durability");
    serve->add_option("--page-limit", page_limit, "max entries per query page");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(scenario, seed, transitive, registry, registry_log, format);
        if (*vc) return cmd_verify_chain(vc_log, vc_hex, vc_scenario);
        if (*stats) return cmd_circuit_stats(cs_field, cs_rsa, cs_epoch);
        if (*serve) return cmd_registry_serve(port, serve_log, page_limit);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
