#pragma once

#include "efxw/fairness.hpp"
#include "efxw/instances.hpp"
#include "efxw/oracle.hpp"
#include "efxw/solver.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace efxw::cli {

inline constexpr int kFormatVersion = 1;

enum ExitCode { kOk = 0, kNegative = 1, kInputError = 2, kExhausted = 3 };

inline const char* kPriceHeader =
    "format_version,instance,n,m,c,p,notion,engine,opt,fair,opt_key,fair_key,ratio_tag,ratio";

struct RunConfig {
    std::string p = "0";
    std::string notion = "efx";
    std::string mode = "within";
    std::string engine = "oracle";
    std::string filter = "all";
    std::string format = "human";
    std::uint64_t budget = default_budget();
    unsigned precision_bits = numeric::precision_cap();
    unsigned threads = 0;
    std::uint64_t seed = 1;
    bool exact = false;
    bool min_only = false;
    bool header = true;
    std::string out;
    std::string id;
    std::vector<std::string> positional;

    // generate
    int n = 3;
    int c = 1;
    std::string eps = "1/1000000";
    std::string weights;
    std::string half;
    std::string variant = "optimization";
    long lambda = 0;
    int max_value = 10;
    bool nmu = false;
    std::string zero_density = "0";
    std::string input;
};

namespace detail {

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline std::string bundles_text(const Instance& inst, const Allocation& alloc) {
    std::string out;
    for (int i = 0; i < alloc.n(); ++i) {
        if (i) out += "; ";
        out += inst.agent_name(i) + ": {";
        for (std::size_t k = 0; k < alloc.bundle(i).size(); ++k)
            out += (k ? ", " : "") + inst.good_name(alloc.bundle(i)[k]);
        out += "}";
    }
    return out;
}

inline std::vector<long> parse_long_list(const std::string& text) {
    std::vector<long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(std::stol(item));
    return out;
}

inline std::string welfare_text(const UtilityProfile& u, const PExponent& p) { return pmean_value(u, p, 128, 12); }

inline EgalitarianOrder order_of(const RunConfig& cfg) {
    return cfg.min_only ? EgalitarianOrder::MinOnly : EgalitarianOrder::Leximin;
}

inline SolverOptions solver_options(const RunConfig& cfg) {
    SolverOptions o;
    o.oracle_budget = cfg.budget;
    o.order = order_of(cfg);
    o.threads = cfg.threads;
    o.max_c = std::numeric_limits<int>::max();
    return o;
}

inline OracleOptions oracle_options(const RunConfig& cfg) {
    OracleOptions o;
    o.budget = cfg.budget;
    o.order = order_of(cfg);
    o.threads = cfg.threads;
    return o;
}

inline void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
    if (cfg.out.empty()) {
        out << text;
    } else {
        write_file(cfg.out, text);
    }
}

inline nlohmann::ordered_json result_json(const Instance& inst, const SolverResult& r, const PExponent& p) {
    nlohmann::ordered_json doc;
    doc["status"] = to_string(r.status);
    doc["allocation"] = r.allocation ? allocation_json(inst, *r.allocation) : nlohmann::ordered_json();
    doc["welfare"] = welfare_text(r.profile, p);
    doc["key"] = r.key.describe();
    if (!r.note.empty()) doc["note"] = r.note;
    return doc;
}

inline void print_result(const RunConfig& cfg, std::ostream& out, const Instance& inst, const SolverResult& r,
                         const PExponent& p, const std::string& label = {}) {
    const std::string pre = label.empty() ? "" : label + " ";
    out << pre << "status: " << to_string(r.status) << "\n";
    if (r.allocation) out << pre << "allocation: " << bundles_text(inst, *r.allocation) << "\n";
    out << pre << "welfare: " << welfare_text(r.profile, p) << "\n";
    if (cfg.exact) out << pre << "key: " << r.key.describe() << "\n";
    if (!r.note.empty()) out << pre << "note: " << r.note << "\n";
}

inline std::string price_row(const std::string& id, const Instance& inst, const PriceReport& r,
                             const std::string& notion, const std::string& engine) {
    std::ostringstream row;
    row << kFormatVersion << ',' << csv_field(id) << ',' << inst.n() << ',' << inst.m() << ',' << surplus(inst)
        << ',' << csv_field(r.p.str()) << ',' << notion << ',' << engine << ','
        << welfare_text(r.opt.profile, r.p) << ',' << welfare_text(r.fair.profile, r.p) << ','
        << csv_field(r.opt.key.describe()) << ',' << csv_field(r.fair.key.describe()) << ','
        << to_string(r.tag) << ',' << r.decimal;
    return row.str();
}

inline PriceReport price(const Instance& inst, const PExponent& p, FairnessNotion notion, const RunConfig& cfg) {
    if (cfg.engine == "oracle") return price_of_fairness(inst, p, notion, oracle_options(cfg));
    if (cfg.engine == "solver") {
        if (!p.is_nonpositive()) throw ValidationError("the solver engine needs p <= 0");
        return solver_price(inst, p, notion, solver_options(cfg));
    }
    throw ValidationError("unknown engine '" + cfg.engine + "'");
}

inline int cmd_check(const RunConfig& cfg, std::ostream& out) {
    if (cfg.positional.size() != 2) throw ValidationError("check needs INSTANCE and ALLOCATION files");
    Instance inst = load_instance(cfg.positional[0]);
    validate_instance(inst, true);
    Allocation alloc = parse_allocation(read_file(cfg.positional[1]), inst);
    validate_allocation(inst, alloc);
    auto notion = parse_notion(cfg.notion);
    auto w = is_fair(inst, alloc, notion);
    if (cfg.format == "json") {
        nlohmann::ordered_json doc;
        doc["format_version"] = kFormatVersion;
        doc["notion"] = to_string(notion);
        doc["fair"] = !w;
        if (w) {
            doc["envier"] = inst.agent_name(w->envier);
            doc["envied"] = inst.agent_name(w->envied);
            doc["dropped_good"] = w->dropped_good ? inst.good_name(*w->dropped_good) : "";
            doc["lhs"] = to_string(w->lhs);
            doc["rhs"] = to_string(w->rhs);
        }
        out << doc.dump(2) << "\n";
    } else if (w) {
        out << "not " << to_string(notion) << ": envier " << inst.agent_name(w->envier) << ", envied "
            << inst.agent_name(w->envied) << ", dropped good "
            << (w->dropped_good ? inst.good_name(*w->dropped_good) : "-") << ", " << to_string(w->lhs) << " < "
            << to_string(w->rhs) << "\n";
    } else {
        out << to_string(notion) << ": ok\n";
    }
    return w ? kNegative : kOk;
}

inline int cmd_solve(const RunConfig& cfg, std::ostream& out) {
    if (cfg.positional.size() != 1) throw ValidationError("solve needs one INSTANCE file");
    Instance inst = load_instance(cfg.positional[0]);
    validate_instance(inst, true);
    const PExponent p = PExponent::parse(cfg.p);
    const FairnessNotion notion = parse_notion(cfg.notion);
    const SolverOptions opts = solver_options(cfg);

    if (cfg.mode == "compat") {
        auto r = decide_compatibility(inst, p, notion, opts);
        if (cfg.format == "json") {
            nlohmann::ordered_json doc;
            doc["format_version"] = kFormatVersion;
            doc["mode"] = "compat";
            doc["compatible"] = r.compatible;
            doc["global"] = result_json(inst, r.global, p);
            doc["fair"] = result_json(inst, r.fair, p);
            emit(cfg, out, doc.dump(2) + "\n");
        } else {
            std::ostringstream text;
            text << (r.compatible ? "yes" : "no") << "\n";
            text << "opt key: " << r.global.key.describe() << "\n";
            text << "fair key: " << r.fair.key.describe() << "\n";
            print_result(cfg, text, inst, r.global, p, "opt");
            print_result(cfg, text, inst, r.fair, p, "fair");
            emit(cfg, out, text.str());
        }
        return r.compatible ? kOk : kNegative;
    }

    SolverResult r;
    if (cfg.mode == "within") {
        r = optimize_within_fair(inst, p, notion, opts);
    } else if (cfg.mode == "global") {
        r = global_optimum(inst, p, opts);
    } else if (cfg.mode == "nmu") {
        r = solve_nmu(inst, p, notion, opts);
    } else {
        throw ValidationError("unknown mode '" + cfg.mode + "'");
    }
    if (cfg.format == "json") {
        nlohmann::ordered_json doc;
        doc["format_version"] = kFormatVersion;
        doc["mode"] = cfg.mode;
        doc["p"] = p.str();
        const auto body = result_json(inst, r, p);
        for (const auto& [k, v] : body.items()) doc[k] = v;
        emit(cfg, out, doc.dump(2) + "\n");
    } else if (!cfg.out.empty() && r.allocation) {
        write_file(cfg.out, serialize_allocation(inst, *r.allocation));
        print_result(cfg, out, inst, r, p);
    } else {
        print_result(cfg, out, inst, r, p);
    }
    return r.status == SolveStatus::InfeasibleObjective ? kNegative : kOk;
}

inline int cmd_price(const RunConfig& cfg, std::ostream& out) {
    if (cfg.positional.size() != 1) throw ValidationError("price needs one INSTANCE file");
    Instance inst = load_instance(cfg.positional[0]);
    validate_instance(inst, true);
    const PExponent p = PExponent::parse(cfg.p);
    const FairnessNotion notion = parse_notion(cfg.notion);
    PriceReport r = price(inst, p, notion, cfg);
    const std::string id = cfg.id.empty() ? std::filesystem::path(cfg.positional[0]).stem().string() : cfg.id;
    std::ostringstream text;
    if (cfg.header) text << kPriceHeader << "\n";
    text << price_row(id, inst, r, to_string(notion), cfg.engine) << "\n";
    emit(cfg, out, text.str());
    return kOk;
}

inline int cmd_oracle(const RunConfig& cfg, std::ostream& out) {
    if (cfg.positional.size() != 1) throw ValidationError("oracle needs one INSTANCE file");
    Instance inst = load_instance(cfg.positional[0]);
    validate_instance(inst, true);
    const PExponent p = PExponent::parse(cfg.p);
    SolverResult r = brute_opt(inst, p, parse_filter(cfg.filter), oracle_options(cfg));
    if (cfg.format == "json") {
        nlohmann::ordered_json doc;
        doc["format_version"] = kFormatVersion;
        doc["filter"] = cfg.filter;
        doc["p"] = p.str();
        const auto body = result_json(inst, r, p);
        for (const auto& [k, v] : body.items()) doc[k] = v;
        emit(cfg, out, doc.dump(2) + "\n");
    } else {
        print_result(cfg, out, inst, r, p);
    }
    return r.allocation ? kOk : kNegative;
}

inline Instance generate(const std::string& family, const RunConfig& cfg) {
    if (family == "example-compat") return gen_example_compat();
    if (family == "hoarding") return gen_hoarding_family(cfg.n, cfg.c, parse_rational(cfg.eps));
    if (family == "private-shared") return gen_private_shared_family(cfg.n, cfg.c, parse_rational(cfg.eps));
    if (family == "random") return gen_random(cfg.n, cfg.c, cfg.max_value, cfg.seed, cfg.nmu, parse_rational(cfg.zero_density));
    if (family == "gadget") {
        PartitionGadgetSpec spec;
        spec.weights = parse_long_list(cfg.weights);
        spec.c = cfg.c;
        spec.p = PExponent::parse(cfg.p);
        if (cfg.lambda > 0) spec.lambda = cfg.lambda;
        GadgetVariant v = cfg.variant == "compatibility" ? GadgetVariant::Compatibility : GadgetVariant::Optimization;
        return gen_partition_gadget(spec, v).instance;
    }
    if (family == "pad-zero") return pad_zero_agent(load_instance(cfg.input));
    if (family == "pad-pair") return pad_private_pair(load_instance(cfg.input));
    throw ValidationError("unknown family '" + family + "'");
}

inline int cmd_generate(const RunConfig& cfg, std::ostream& out) {
    if (cfg.positional.size() != 1) throw ValidationError("generate needs a FAMILY");
    Instance inst = generate(cfg.positional[0], cfg);
    validate_instance(inst, true);
    emit(cfg, out, serialize_instance(inst));
    return kOk;
}

/// Grid over (family, n, c, p, eps, seed); one price row per point.
inline int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    if (cfg.positional.size() != 1) throw ValidationError("sweep needs a CONFIG file");
    auto doc = efxw::detail::parse_document(read_file(cfg.positional[0]));
    auto list = [&](const char* key, nlohmann::json fallback) { return doc.contains(key) ? doc[key] : fallback; };
    auto families = list("families", {"random"});
    auto ns = list("n", {2, 3});
    auto cs = list("c", {0, 1});
    auto ps = list("p", {"0"});
    auto epss = list("eps", {"1/1000000"});
    auto seeds = list("seeds", {1});
    RunConfig run = cfg;
    run.notion = doc.value("notion", cfg.notion);
    run.engine = doc.value("engine", cfg.engine);
    run.max_value = doc.value("max_value", cfg.max_value);
    run.zero_density = doc.value("zero_density", cfg.zero_density);
    const FairnessNotion notion = parse_notion(run.notion);

    std::ostringstream text;
    text << kPriceHeader << "\n";
    for (const auto& family : families) {
        const std::string fam = family.get<std::string>();
        for (const auto& n : ns)
            for (const auto& c : cs)
                for (const auto& pv : ps)
                    for (std::size_t e = 0; e < epss.size(); ++e)
                        for (const auto& seed : seeds) {
                            const auto& eps = epss[e];
                            if (fam == "random" && e > 0) break;  // the random family ignores eps
                            run.n = n.get<int>();
                            run.c = c.get<int>();
                            run.eps = eps.get<std::string>();
                            run.seed = seed.get<std::uint64_t>();
                            const PExponent p = PExponent::parse(pv.get<std::string>());
                            Instance inst = generate(fam, run);
                            std::string id = fam + "-n" + std::to_string(run.n) + "-c" + std::to_string(run.c);
                            id += fam == "random" ? "-s" + std::to_string(run.seed) : "-eps" + run.eps;
                            text << price_row(id, inst, price(inst, p, notion, run), run.notion, run.engine) << "\n";
                            if (fam != "random") break;  // deterministic families ignore the seed
                        }
    }
    emit(cfg, out, text.str());
    return kOk;
}

}  // namespace detail

/// Runs the command line; returns the process exit code.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Exact EFX / EFX0 allocation solver with p-mean welfare"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    app.add_option("--p", cfg.p, "welfare exponent: 1, 0, -1, 1/2, -inf, ...");
    app.add_option("--notion", cfg.notion, "efx | efx0");
    app.add_option("--budget", cfg.budget, "largest exhaustive search (allocations)")->check(CLI::PositiveNumber);
    app.add_option("--precision-bits", cfg.precision_bits, "interval precision cap for radical comparisons");
    app.add_option("--threads", cfg.threads, "oracle worker threads (0 = machine parallelism)");
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--format", cfg.format, "human | csv | json");
    app.add_flag("--exact", cfg.exact, "print exact score keys");
    app.add_flag("--min-only", cfg.min_only, "compare p = -inf by minimum only, without leximin tie-breaks");
    app.add_option("--out", cfg.out, "output file");

    auto* check = app.add_subcommand("check", "check an allocation for EFX / EFX0");
    check->add_option("files", cfg.positional, "INSTANCE ALLOCATION")->expected(2);

    auto* solve = app.add_subcommand("solve", "optimize W_p");
    solve->add_option("instance", cfg.positional)->expected(1);
    solve->add_option("--mode", cfg.mode, "within | global | compat | nmu");

    auto* pr = app.add_subcommand("price", "price of fairness as one CSV row");
    pr->add_option("instance", cfg.positional)->expected(1);
    pr->add_option("--engine", cfg.engine, "oracle | solver");
    pr->add_option("--id", cfg.id, "instance id column");
    pr->add_flag("!--no-header", cfg.header, "omit the CSV header");

    auto* gen = app.add_subcommand("generate", "write a generated instance");
    gen->add_option("family", cfg.positional,
                    "example-compat | hoarding | private-shared | gadget | random | pad-zero | pad-pair")
        ->expected(1);
    gen->add_option("--n", cfg.n);
    gen->add_option("--c", cfg.c);
    gen->add_option("--eps", cfg.eps);
    gen->add_option("--weights", cfg.weights, "gadget weights, comma separated");
    gen->add_option("--variant", cfg.variant, "gadget variant: compatibility | optimization");
    gen->add_option("--lambda", cfg.lambda);
    gen->add_option("--max-value", cfg.max_value);
    gen->add_flag("--nmu", cfg.nmu);
    gen->add_option("--zero-density", cfg.zero_density);
    gen->add_option("--in", cfg.input, "source instance for padding");

    auto* sweep = app.add_subcommand("sweep", "price rows over a parameter grid");
    sweep->add_option("config", cfg.positional)->expected(1);
    sweep->add_option("--engine", cfg.engine, "oracle | solver");

    auto* oracle = app.add_subcommand("oracle", "exhaustive W_p optimum under a filter");
    oracle->add_option("instance", cfg.positional)->expected(1);
    oracle->add_option("--filter", cfg.filter, "all | ef | efx | efx0");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return kInputError;
    }

    try {
        numeric::set_precision_cap(cfg.precision_bits);
        if (*check) return detail::cmd_check(cfg, out);
        if (*solve) return detail::cmd_solve(cfg, out);
        if (*pr) return detail::cmd_price(cfg, out);
        if (*gen) return detail::cmd_generate(cfg, out);
        if (*sweep) return detail::cmd_sweep(cfg, out);
        if (*oracle) return detail::cmd_oracle(cfg, out);
    } catch (const BudgetExceeded& e) {
        err << "budget exceeded: " << e.what() << "\n";
        return kExhausted;
    } catch (const PrecisionExhausted& e) {
        err << "precision exhausted: " << e.what() << "\n";
        return kExhausted;
    } catch (const HardnessError& e) {
        err << "hardness: " << e.what() << "\n";
        return kExhausted;
    } catch (const ParseError& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const ValidationError& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    } catch (const std::exception& e) {
        err << "input error: " << e.what() << "\n";
        return kInputError;
    }
    return kInputError;
}

}  // namespace efxw::cli
