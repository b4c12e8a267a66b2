// lenuniv: generators, compilers, and deciders for length universality.
//
// Exit codes: 0 = yes/success, 1 = no, 2 = malformed input, 3 = resource cap.
// Every command prints one newline-terminated JSON document:
//   {"status": "ok"|"error", "payload": ..., "diagnostics": [...]}
// Lengths are decimal strings since they routinely exceed machine words.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lenuniv/automaton.hpp"
#include "lenuniv/divisibility.hpp"
#include "lenuniv/errors.hpp"
#include "lenuniv/formulas.hpp"
#include "lenuniv/gadget_compile.hpp"
#include "lenuniv/reductions.hpp"
#include "lenuniv/regex.hpp"
#include "lenuniv/solvers.hpp"

namespace {

using nlohmann::json;
using namespace lenuniv;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_json(const std::string& text, const std::string& what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw parse_error(what + ": malformed JSON");
    return j;
}

// Accept either a bare automaton document or a full command result, so
// commands can be piped into each other.
automaton load_automaton_arg(const std::string& path) {
    json j = parse_json(read_input(path), "automaton");
    if (j.is_object() && j.contains("payload")) j = j.at("payload");
    if (j.is_object() && j.contains("automaton")) j = j.at("automaton");
    return load_automaton(j);
}

bignat parse_length(const std::string& s) {
    if (s.empty()) throw parse_error("length: empty");
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw parse_error("length: expected a decimal natural, got '" + s + "'");
    return bignat(s);
}

std::size_t det_cap() {
    if (const char* e = std::getenv("LENUNIV_DETCAP")) {
        try {
            return std::stoull(e);
        } catch (...) {
            throw input_error("LENUNIV_DETCAP: not a number");
        }
    }
    return kDefaultDeterminizeCap;
}

void emit(const json& payload, const std::vector<std::string>& diagnostics = {}) {
    json out{{"status", "ok"}, {"payload", payload}, {"diagnostics", diagnostics}};
    std::cout << out.dump() << "\n";
}

json compile_metadata(const compiled_nfa& c) {
    json spans = json::object();
    for (const auto& [id, span] : c.stmt_span)
        spans[std::to_string(id)] = {{"start", span.first}, {"target", span.second}};
    return {{"q_acc", c.q_acc},
            {"start", c.start},
            {"target", c.target},
            {"width", c.m},
            {"statements", std::move(spans)}};
}

struct decide_input {
    std::string automaton_file;
    std::string regex;
    std::string program_file;
    unsigned width = 0;

    automaton load() const {
        int sources = !automaton_file.empty() + !regex.empty() + !program_file.empty();
        if (sources != 1)
            throw input_error("decide: exactly one of --automaton, --regex, --program required");
        if (!automaton_file.empty()) return load_automaton_arg(automaton_file);
        if (!regex.empty()) return regex_to_nfa(regex);
        if (width == 0) throw input_error("decide: --program needs --width");
        return compile_text(read_input(program_file), width).nfa;
    }
};

void add_decide_input(CLI::App* cmd, decide_input& in) {
    cmd->add_option("--automaton", in.automaton_file, "automaton JSON file ('-' for stdin)");
    cmd->add_option("--regex", in.regex, "regular expression");
    cmd->add_option("--program", in.program_file, "gadget program file ('-' for stdin)");
    cmd->add_option("--width", in.width, "variable width m for --program");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"length universality toolkit"};
    app.require_subcommand(1);
    int exit_code = 0;

    try {
        // ---- decide ----
        auto* decide = app.add_subcommand("decide", "decide universality questions");
        decide->require_subcommand(1);

        decide_input given_in;
        std::string given_length;
        auto* given = decide->add_subcommand("given", "is Sigma^ell subset of L(M)?");
        add_decide_input(given, given_in);
        given->add_option("--length", given_length, "length ell (decimal)")->required();
        given->callback([&] {
            automaton a = given_in.load();
            bignat ell = parse_length(given_length);
            bool yes = universal_at_length(a, ell, det_cap());
            emit({{"decision", yes}, {"length", given_length}});
            exit_code = yes ? 0 : 1;
        });

        decide_input ex_in;
        auto* ex = decide->add_subcommand("existential", "does some ell make Sigma^ell subset of L(M)?");
        add_decide_input(ex, ex_in);
        ex->callback([&] {
            automaton a = ex_in.load();
            universality_report r = minimal_universality_length(a, det_cap());
            json payload{{"exists", r.exists}};
            payload["minimal_length"] =
                r.exists ? json(r.minimal_length.str()) : json(nullptr);
            emit(payload, {"preperiod " + std::to_string(r.preperiod) + ", period " +
                               std::to_string(r.period)});
            exit_code = r.exists ? 0 : 1;
        });

        // ---- gen ----
        auto* gen = app.add_subcommand("gen", "construct witness automata");
        gen->require_subcommand(1);

        std::uint64_t pc_t = 0;
        bool pc_bin = false;
        auto* pc = gen->add_subcommand("prime-cycle", "prime cycle DFA");
        pc->add_option("--t", pc_t, "number of cycles")->required();
        pc->add_flag("--binarize", pc_bin, "replace the initial state with a binary tree");
        pc->callback([&] { emit({{"automaton", store_automaton(prime_cycle_dfa(pc_t, pc_bin))}}); });

        std::string sat_file;
        auto* sat = gen->add_subcommand("sat", "3-SAT reduction DFA");
        sat->add_option("--cnf", sat_file, "DIMACS file ('-' for stdin)")->required();
        sat->callback([&] {
            cnf c = parse_dimacs(read_input(sat_file));
            emit({{"automaton", store_automaton(sat_to_dfa(c))}});
        });

        unsigned alg3_m = 0;
        auto* a3 = gen->add_subcommand("alg3", "large minimal universality length NFA");
        a3->add_option("--m", alg3_m, "variable width")->required();
        a3->callback([&] {
            std::string text = alg3_program(alg3_m);
            compiled_nfa c = compile_text(text, alg3_m);
            emit({{"automaton", store_automaton(c.nfa)}, {"program", text}});
        });

        std::string div_formula;
        unsigned div_k = 0, div_m = 0;
        std::uint64_t div_delay = 0;
        auto* dv = gen->add_subcommand("divisibility", "counting NFA around a verifier");
        dv->add_option("--formula", div_formula, "formula s-expression file ('-' for stdin)")
            ->required();
        dv->add_option("--k", div_k, "number of quantified variables")->required();
        dv->add_option("--m", div_m, "variable width")->required();
        dv->add_option("--delay", div_delay, "override the automatic delay D");
        dv->callback([&] {
            formula f = parse_formula(read_input(div_formula));
            if (f.vars.size() != div_k)
                throw input_error("gen divisibility: --k " + std::to_string(div_k) +
                                  " does not match the formula's " +
                                  std::to_string(f.vars.size()) + " variables");
            if (f.m != div_m)
                throw input_error("gen divisibility: --m " + std::to_string(div_m) +
                                  " does not match the formula's width " + std::to_string(f.m));
            divisibility_result r = divisibility_program(f, div_delay);
            compiled_nfa c = compile(expand_macros(r.program, f.m), f.m);
            emit({{"automaton", store_automaton(c.nfa)},
                  {"r1", r.r1},
                  {"r2", r.r2},
                  {"D", r.D}});
        });

        // ---- compile ----
        std::string comp_file;
        unsigned comp_width = 0;
        auto* comp = app.add_subcommand("compile", "compile a gadget program to an NFA");
        comp->add_option("--program", comp_file, "program file ('-' for stdin)")->required();
        comp->add_option("--width", comp_width, "variable width m")->required();
        comp->callback([&] {
            compiled_nfa c = compile_text(read_input(comp_file), comp_width);
            emit({{"automaton", store_automaton(c.nfa)}, {"metadata", compile_metadata(c)}});
        });

        // ---- transform ----
        auto* tr = app.add_subcommand("transform", "automaton transformations");
        tr->require_subcommand(1);
        std::string bin_file;
        auto* bin = tr->add_subcommand("binarize", "project onto a binary alphabet");
        bin->add_option("--automaton", bin_file, "automaton JSON file ('-' for stdin)")->required();
        bin->callback(
            [&] { emit({{"automaton", store_automaton(binarize(load_automaton_arg(bin_file)))}}); });

        // ---- eval ----
        std::string eval_file, eval_ellp;
        auto* ev = app.add_subcommand("eval", "evaluate a formula at ell'");
        ev->add_option("--formula", eval_file, "formula s-expression file ('-' for stdin)")
            ->required();
        ev->add_option("--ell-prime", eval_ellp, "ell' (decimal)")->required();
        ev->callback([&] {
            formula f = parse_formula(read_input(eval_file));
            bool v = eval_formula(f, parse_length(eval_ellp));
            emit({{"value", v}});
            exit_code = v ? 0 : 1;
        });

        // ---- reduce ----
        auto* red = app.add_subcommand("reduce", "reductions to formulas");
        red->require_subcommand(1);
        std::string ntm_file;
        auto* rntm = red->add_subcommand("ntm", "Turing machine acceptance to a rejection formula");
        rntm->add_option("--machine", ntm_file, "machine JSON file ('-' for stdin)")->required();
        rntm->callback([&] {
            ntm n = load_ntm(parse_json(read_input(ntm_file), "ntm"));
            emit({{"formula", store_formula(ntm_to_formula(n))}});
        });

        CLI11_PARSE(app, argc, argv);
        return exit_code;
    } catch (const resource_limit_error& e) {
        std::cout << json{{"status", "error"},
                          {"payload", {{"message", e.what()}}},
                          {"diagnostics", json::array()}}
                         .dump()
                  << "\n";
        return 3;
    } catch (const error& e) {
        std::cout << json{{"status", "error"},
                          {"payload", {{"message", e.what()}}},
                          {"diagnostics", json::array()}}
                         .dump()
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cout << json{{"status", "error"},
                          {"payload", {{"message", e.what()}}},
                          {"diagnostics", json::array()}}
                         .dump()
                  << "\n";
        return 2;
    }
}
