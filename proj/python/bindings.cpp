#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "zkcontact/circuits.hpp"
#include "zkcontact/digest.hpp"
#include "zkcontact/errors.hpp"
#include "zkcontact/sim.hpp"

namespace py = pybind11;
using namespace zkcontact;

namespace {

py::dict metrics_to_dict(const SimMetrics& m) {
    py::list notifications;
    for (const NotificationEvent& n : m.notifications) {
        py::dict d;
        d["agent"] = n.agent;
        d["order"] = n.order;
        d["epoch"] = n.epoch;
        d["contact_epoch"] = n.contact_epoch;
        d["h"] = hex_encode(n.h_key);
        notifications.append(d);
    }
    py::dict out;
    out["scenario"] = m.scenario;
    out["notifications"] = notifications;
    out["registry_accepted"] = m.registry_accepted;
    out["registry_duplicates"] = m.registry_duplicates;
    out["registry_invalid"] = m.registry_invalid;
    out["proofs_refused"] = m.proofs_refused;
    out["matches_unverified"] = m.matches_unverified;
    out["report"] = report_text(m);
    out["table"] = report_table(m);
    return out;
}

ScenarioConfig config_from(const std::string& text, std::optional<uint64_t> seed,
                           std::optional<bool> transitive) {
    ScenarioConfig cfg = parse_scenario(text);
    if (seed) cfg.seed = *seed;
    if (transitive) cfg.transitive = *transitive;
    return cfg;
}

} // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Decentralized proof-of-contact protocol: simulator and circuit tools";
    mod.attr("__version__") = "0.1.0";

    // Base registered first; translators run newest-first, so the derived
    // ParseError is matched before the generic Error.
    static py::exception<Error>& zk_error = py::register_exception<Error>(mod, "ZkError");
    py::register_exception<ParseError>(mod, "ZkParseError", zk_error.ptr());

    mod.def(
        "canonical_scenario",
        [](const std::string& text) { return emit_scenario(parse_scenario(text)); },
        py::arg("text"), "Parse scenario text and return its canonical form.");

    mod.def(
        "run",
        [](const std::string& text, std::optional<uint64_t> seed,
           std::optional<bool> transitive) {
            return metrics_to_dict(run_scenario(config_from(text, seed, transitive)));
        },
        py::arg("text"), py::arg("seed") = std::nullopt, py::arg("transitive") = std::nullopt,
        "Run scenario text over an in-process registry and return the metrics.");

    mod.def(
        "run_file",
        [](const std::string& path, std::optional<uint64_t> seed,
           std::optional<bool> transitive) {
            ScenarioConfig cfg = load_scenario(path);
            if (seed) cfg.seed = *seed;
            if (transitive) cfg.transitive = *transitive;
            return metrics_to_dict(run_scenario(cfg));
        },
        py::arg("path"), py::arg("seed") = std::nullopt, py::arg("transitive") = std::nullopt,
        "Run a scenario file over an in-process registry and return the metrics.");

    mod.def(
        "circuit_stats",
        [](const std::string& field, uint32_t rsa_bits, uint32_t epoch_seconds) {
            ScenarioConfig probe;
            probe.name = "stats";
            probe.field = field;
            probe.rsa_bits = rsa_bits;
            probe.epoch_seconds = epoch_seconds;
            ProtocolParams params = probe.protocol_params();
            std::mt19937_64 rng(1);
            RsaKeyPair authority = rsa_generate(rng, params.rsa_modulus_bits);

            auto row = [](const CircuitSpec& spec) {
                py::dict d;
                d["constraints"] = spec.cs.constraints.size();
                d["publics"] = spec.cs.num_public;
                d["auxiliary"] = spec.cs.num_aux;
                return d;
            };
            py::dict out;
            out["contact"] = row(ContactCircuit(params).spec());
            out["credential"] = row(CredentialCircuit(params).spec());
            out["health"] = row(HealthCircuit(params).spec());
            out["pcd-m0-seed"] = row(PcdM0Circuit(params, authority.pub).spec());
            out["pcd-m1-extend"] = row(PcdM1Circuit(params).spec());
            return out;
        },
        py::arg("field") = "bn254", py::arg("rsa_bits") = 2048,
        py::arg("epoch_seconds") = 300, "Constraint counts per circuit kind.");

    mod.def(
        "verify_registry_log",
        [](const std::string& log_path, const std::string& scenario_text) {
            Registry::Options opts;
            opts.log_path = log_path;
            Registry reg(std::move(opts));
            std::shared_ptr<const SimContext> ctx =
                make_sim_context(parse_scenario(scenario_text));
            py::list out;
            uint64_t cursor = 0;
            while (true) {
                QueryPage page = reg.query_since(cursor);
                if (page.entries.empty()) break;
                cursor = page.next_cursor;
                for (const RegistryEntry& e : page.entries) {
                    std::optional<uint32_t> order = verify_registry_entry(*ctx, e.kind, e.body);
                    py::dict d;
                    d["seq"] = e.seq;
                    d["kind"] = e.kind == BundleKind::Contact ? "contact" : "transitive";
                    d["h"] = hex_encode(e.h_index_key);
                    d["order"] = order ? py::cast(*order) : py::none();
                    out.append(d);
                }
            }
            return out;
        },
        py::arg("log_path"), py::arg("scenario_text"),
        "Re-verify every record in a registry log against a scenario's deployment.");
}
