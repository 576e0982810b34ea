// Command-line front end. Exit codes: 0 yes, 1 no, 2 undecided (a resource
// cap fired), 3 input error, 4 typing refused as inconsistent.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "dxd/bottom_up.hpp"
#include "dxd/regex.hpp"
#include "dxd/tree_typing.hpp"
#include "dxd/validate.hpp"
#include "dxd/word_typing.hpp"

using namespace dxd;
using json = nlohmann::json;

namespace {

enum class Answer { Yes, No, Undecided, Inconsistent, Error };

struct Verdict {
    std::string problem;
    Answer answer = Answer::Error;
    struct Entry {
        std::size_t typing = 0;  // several typings when all maximal ones are listed
        std::string function;
        std::string text;
    };
    std::vector<Entry> witness;
    std::size_t typings = 0;
    std::vector<std::string> diagnostics;
    std::string cap;
};

const char* answer_name(Answer a) {
    switch (a) {
        case Answer::Yes: return "yes";
        case Answer::No: return "no";
        case Answer::Undecided: return "undecided";
        case Answer::Inconsistent: return "inconsistent-typing";
        case Answer::Error: return "error";
    }
    return "error";
}

int exit_code(Answer a) {
    switch (a) {
        case Answer::Yes: return 0;
        case Answer::No: return 1;
        case Answer::Undecided: return 2;
        case Answer::Error: return 3;
        case Answer::Inconsistent: return 4;
    }
    return 3;
}

// A file that fails to read is reported the same way as one that fails to
// parse.
struct FileError : InputError {
    using InputError::InputError;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileError(path + ": cannot open");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

template <class F>
auto parse_file(const std::string& path, F&& parse) {
    std::string text = slurp(path);
    try {
        return parse(text);
    } catch (const InputError& e) {
        std::string where = path;
        if (e.position() != InputError::npos) where += ":" + std::to_string(e.position());
        throw FileError(where + ": " + e.what());
    }
}

std::string trimmed(std::string s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    return s.substr(b);
}

Nfa regex_file(const std::string& path) {
    return parse_file(path, [](const std::string& t) { return to_nfa(parse_regex(trimmed(t))); });
}

std::string show(const Nfa& a) { return to_string(to_regex(minimal_trim(a))); }

// "f1=path" or "@f1=path", keyed by the function symbol.
std::map<Symbol, std::string> typing_bindings(const std::vector<std::string>& specs) {
    std::map<Symbol, std::string> out;
    for (auto& s : specs) {
        auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw InputError("--typing expects NAME=FILE, got '" + s + "'");
        Symbol f = s.substr(0, eq);
        if (f[0] != '@') f = "@" + f;
        if (!out.emplace(f, s.substr(eq + 1)).second) throw InputError("function " + f + " bound twice");
    }
    return out;
}

template <class T, class Load>
std::vector<T> ordered_typing(const std::vector<Symbol>& functions, const std::vector<std::string>& specs, Load load) {
    auto b = typing_bindings(specs);
    std::vector<T> out;
    for (auto& f : functions) {
        auto it = b.find(f);
        if (it == b.end()) throw InputError("no --typing given for " + f);
        out.push_back(load(it->second));
        b.erase(it);
    }
    if (!b.empty()) throw InputError("kernel has no function " + b.begin()->first);
    return out;
}

void print(const Verdict& v, bool as_json) {
    if (as_json) {
        json j;
        j["problem"] = v.problem;
        j["answer"] = answer_name(v.answer);
        j["witness"] = json::array();
        for (auto& e : v.witness) j["witness"].push_back({{"typing", e.typing + 1}, {"function", e.function}, {"type", e.text}});
        j["diagnostics"] = v.diagnostics;
        if (!v.cap.empty()) j["cap"] = v.cap;
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::cout << v.problem << ": " << answer_name(v.answer);
    if (v.answer == Answer::Undecided) std::cout << " (resource cap " << v.cap << ")";
    std::cout << "\n";
    for (auto& e : v.witness) {
        std::cout << "== ";
        if (v.typings > 1) std::cout << "typing " << e.typing + 1 << " ";
        std::cout << e.function << "\n" << e.text;
        if (e.text.empty() || e.text.back() != '\n') std::cout << "\n";
    }
    for (auto& d : v.diagnostics) std::cout << "  " << d << "\n";
}

void write_witness(const Verdict& v, const std::string& dir, const std::string& ext) {
    if (dir.empty() || v.witness.empty()) return;
    for (auto& e : v.witness) {
        std::filesystem::path where(dir);
        if (v.typings > 1) where /= "typing" + std::to_string(e.typing + 1);
        std::filesystem::create_directories(where);
        std::string name = e.function[0] == '@' ? e.function.substr(1) : e.function;
        std::ofstream out(where / (name + ext));
        out << e.text;
        if (e.text.empty() || e.text.back() != '\n') out << "\n";
    }
}

// ---------------------------------------------------------------- word designs

struct WordInput {
    Nfa target;
    bool box = false;
    KernelWord word;
    KernelBox boxk;

    const std::vector<Symbol>& functions() const { return box ? boxk.functions : word.functions; }
};

WordInput load_word_design(const std::string& target, const std::string& kernel, bool force_box) {
    WordInput in;
    in.target = regex_file(target);
    std::string k = trimmed(slurp(kernel));
    in.box = force_box || k.find('{') != std::string::npos;
    try {
        if (in.box)
            in.boxk = parse_kernel_box(k);
        else
            in.word = parse_kernel_word(k);
    } catch (const InputError& e) {
        throw FileError(kernel + ": " + e.what());
    }
    return in;
}

void add_typing(Verdict& v, const std::vector<Symbol>& functions, const Typing& t) {
    for (std::size_t i = 0; i < t.size(); ++i) v.witness.push_back({v.typings, functions[i], show(t[i])});
    ++v.typings;
}

// Why the Omega candidate fails, as a counterexample string.
void explain_omega(Verdict& v, const Nfa& target, const PerfectAutomaton& p, const Nfa& ext, const std::string& where) {
    if (!p.compatible) {
        v.diagnostics.push_back(where + "no compatible Omega candidate (some slot has no legal automaton)");
        return;
    }
    std::string cand;
    for (auto& o : p.omega) cand += (cand.empty() ? "(" : ", ") + show(o);
    v.diagnostics.push_back(where + "Omega candidate " + cand + ")");
    if (auto w = inclusion_counterexample(ext, target))
        v.diagnostics.push_back(where + "extension accepts '" + to_string(*w) + "' outside the target");
    else if (auto w2 = inclusion_counterexample(target, ext))
        v.diagnostics.push_back(where + "target word '" + to_string(*w2) + "' is not produced");
}

Verdict find_word(const WordInput& in, const std::string& property, const Caps& caps) {
    Verdict v;
    v.problem = "exists-" + property;
    if (property == "perf") {
        std::optional<Typing> t;
        PerfectAutomaton p;
        Nfa ext;
        if (in.box) {
            BoxDesign d{in.target, in.boxk};
            auto r = exists_perfect_box(d);
            t = r.typing;
            p = build_perfect(d);
            if (p.compatible) ext = w_tau(in.boxk, p.omega);
            v.diagnostics.push_back("box kernel: the Omega criterion is applied as an extension of the word-kernel result");
        } else {
            WordDesign d{in.target, in.word};
            t = exists_perfect(d);
            p = build_perfect(d);
            if (p.compatible) ext = w_tau(in.word, p.omega);
        }
        v.answer = t ? Answer::Yes : Answer::No;
        if (t)
            add_typing(v, in.functions(), *t);
        else
            explain_omega(v, p.target, p, ext, "");
        return v;
    }
    std::vector<Typing> found;
    if (property == "loc" || property == "ml") {
        // Every local typing found by the search is already maximal.
        auto t = in.box ? exists_local_box(BoxDesign{in.target, in.boxk}, caps) : exists_local(WordDesign{in.target, in.word}, caps);
        if (t) found.push_back(*t);
    } else if (property == "ml-all") {
        found = in.box ? enumerate_ml_box(BoxDesign{in.target, in.boxk}, caps) : enumerate_ml(WordDesign{in.target, in.word}, caps);
    }
    v.answer = found.empty() ? Answer::No : Answer::Yes;
    for (auto& t : found) add_typing(v, in.functions(), t);
    return v;
}

Verdict check_word(const WordInput& in, const Typing& t, const std::string& property, const Caps& caps) {
    Verdict v;
    v.problem = "check-" + property;
    bool ok = false;
    if (in.box) {
        BoxDesign d{in.target, in.boxk};
        if (property == "loc")
            ok = check_local(d, t);
        else if (property == "ml")
            ok = check_maximal_local(d, t, caps);
        else {
            auto p = exists_perfect_box(d);
            ok = p.typing && typing_equivalent(*p.typing, t);
            v.diagnostics.push_back("box kernel: the Omega criterion is applied as an extension of the word-kernel result");
        }
    } else {
        WordDesign d{in.target, in.word};
        if (property == "loc")
            ok = check_local(d, t);
        else if (property == "ml")
            ok = check_maximal_local(d, t, caps);
        else
            ok = check_perfect(d, t);
        if (!ok && property == "loc") {
            Nfa ext = w_tau(in.word, t);
            if (auto w = inclusion_counterexample(ext, d.target))
                v.diagnostics.push_back("extension accepts '" + to_string(*w) + "' outside the target");
            else if (auto w2 = inclusion_counterexample(d.target, ext))
                v.diagnostics.push_back("target word '" + to_string(*w2) + "' is not produced");
        }
    }
    v.answer = ok ? Answer::Yes : Answer::No;
    return v;
}

// ---------------------------------------------------------------- tree designs

void add_tree_typing(Verdict& v, const KernelDoc& k, const TreeTyping& t) {
    for (std::size_t i = 0; i < t.size(); ++i) v.witness.push_back({v.typings, k.functions[i], to_text(t[i])});
    ++v.typings;
}

WordDesign word_of(const BoxDesign& b) {
    WordDesign w{b.target, {}};
    for (auto& seg : b.kernel.segments) {
        Word word;
        for (auto& c : seg.cells) word.push_back(*c.begin());
        w.kernel.segments.push_back(word);
    }
    w.kernel.functions = b.kernel.functions;
    return w;
}

std::string node_label(const std::vector<const UTree*>& pre, std::size_t i) {
    return "node " + std::to_string(i) + " (" + pre[i]->label + "): ";
}

void explain_tree_perfect(Verdict& v, const TreeDesign& d) {
    auto pre = preorder(d.kernel.tree);
    if (d.target.cls != GrammarClass::Edtd) {
        auto designs = induce_string_designs(d);
        if (!designs) {
            v.diagnostics.push_back("some kernel node has no matching name in the target");
            return;
        }
        for (auto& id : *designs) {
            WordDesign wd = word_of(id.design);
            if (exists_perfect(wd)) continue;
            auto p = build_perfect(wd);
            std::string where = node_label(pre, id.node);
            if (id.slots.empty()) {
                v.diagnostics.push_back(where + "fixed children '" + to_string(wd.kernel.segments[0]) +
                                        "' but the content model is " + show(wd.target));
                return;
            }
            explain_omega(v, p.target, p, p.compatible ? w_tau(wd.kernel, p.omega) : empty_language(), where);
            return;
        }
        return;
    }
    TreeGrammar norm = normalize(d.target);
    auto kappa = perfect_kappa(norm, d.kernel);
    if (!kappa) {
        v.diagnostics.push_back("no assignment of specialized names fits the kernel");
        return;
    }
    for (auto& id : induce_box_designs(norm, d.kernel, *kappa)) {
        if (exists_perfect_box(id.design).typing) continue;
        auto p = build_perfect(id.design);
        explain_omega(v, p.target, p, p.compatible ? w_tau(id.design.kernel, p.omega) : empty_language(),
                      node_label(pre, id.node));
        return;
    }
    v.diagnostics.push_back("per-node perfect typings exist but their combination is not local");
}

Verdict find_tree(const TreeDesign& d, const std::string& property, const Caps& caps) {
    Verdict v;
    v.problem = "exists-" + property;
    std::vector<TreeTyping> found;
    if (property == "loc") {
        if (auto t = tree_exists_local(d, caps)) found.push_back(*t);
    } else if (property == "ml") {
        if (auto t = tree_exists_ml(d, caps)) found.push_back(*t);
    } else if (property == "ml-all") {
        found = tree_enumerate_ml(d, caps);
    } else {
        if (auto t = tree_exists_perfect(d, caps)) found.push_back(*t);
    }
    v.answer = found.empty() ? Answer::No : Answer::Yes;
    if (found.empty() && property == "perf") explain_tree_perfect(v, d);
    for (auto& t : found) add_tree_typing(v, d.kernel, t);
    return v;
}

Verdict check_tree(const TreeDesign& d, const TreeTyping& t, const std::string& property, const Caps& caps) {
    Verdict v;
    v.problem = "check-" + property;
    bool ok = property == "loc" ? tree_check_local(d, t) : property == "ml" ? tree_check_ml(d, t, caps) : tree_check_perfect(d, t, caps);
    v.answer = ok ? Answer::Yes : Answer::No;
    if (!ok && property == "loc") {
        auto ext = build_t_tau(d.kernel, t);
        if (auto c = grammar_counterexample(ext, d.target))
            v.diagnostics.push_back("extension contains " + to_string(*c) + " outside the target");
        else if (auto c2 = grammar_counterexample(d.target, ext))
            v.diagnostics.push_back("target tree " + to_string(*c2) + " is not produced");
    }
    return v;
}

TreeGrammar grammar_file(const std::string& path) {
    return parse_file(path, [](const std::string& t) { return parse_grammar(t); });
}

KernelDoc kernel_file(const std::string& path) {
    return parse_file(path, [&](const std::string& t) {
        try {
            return parse_kernel(t);
        } catch (const KernelError& e) {
            throw InputError(e.what());
        }
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Checks and synthesizes typings for distributed XML designs"};
    app.require_subcommand(1);
    app.fallthrough();
    bool as_json = false;
    app.add_flag("--json", as_json, "Emit a machine-readable verdict");

    std::string doc_path, grammar_path;
    auto* validate_cmd = app.add_subcommand("validate", "Check a document against a grammar");
    validate_cmd->add_option("--doc", doc_path, "Tree term file")->required();
    validate_cmd->add_option("--grammar", grammar_path, "Grammar file")->required();

    std::string kernel_path, target_path, cls_name = "edtd", mech_name = "nfa", property = "loc", out_dir;
    std::vector<std::string> typing_specs;
    bool word_mode = false, box_mode = false, all_ml = false;

    auto* cons_cmd = app.add_subcommand("cons", "Is the extension language definable in a class?");
    auto* synth_cmd = app.add_subcommand("synth", "Print the type of the extension language");
    for (auto* c : {cons_cmd, synth_cmd}) {
        c->add_option("--kernel", kernel_path, "Kernel tree file")->required();
        c->add_option("--typing", typing_specs, "NAME=FILE, one per function");
        c->add_option("--class", cls_name, "dtd, sdtd or edtd")->check(CLI::IsMember({"dtd", "sdtd", "edtd"}));
        c->add_option("--mechanism", mech_name, "nre, dre, nfa or dfa")->check(CLI::IsMember({"nre", "dre", "nfa", "dfa"}));
    }
    synth_cmd->add_option("--out", out_dir, "Write the grammar to this file");

    auto* check_cmd = app.add_subcommand("check", "Decide a property of a given typing");
    auto* find_cmd = app.add_subcommand("find", "Search for a typing with a property");
    for (auto* c : {check_cmd, find_cmd}) {
        c->add_option("--target", target_path, "Grammar file (regex file with --word)")->required();
        c->add_option("--kernel", kernel_path, "Kernel tree file (kernel string with --word)")->required();
        c->add_option("--property", property, "loc, ml or perf")->check(CLI::IsMember({"loc", "ml", "perf"}));
        c->add_flag("--word", word_mode, "String design: regex target, kernel string, regex typings");
        c->add_flag("--box", box_mode, "With --word: read the kernel as a box kernel");
    }
    check_cmd->add_option("--typing", typing_specs, "NAME=FILE, one per function");
    find_cmd->add_flag("--all", all_ml, "With --property ml: list every maximal local typing");
    find_cmd->add_option("--out-dir", out_dir, "Write witness typings into this directory");

    CLI11_PARSE(app, argc, argv);

    Verdict v;
    if (find_cmd->parsed()) v.problem = "exists-" + property;
    if (check_cmd->parsed()) v.problem = "check-" + property;
    try {
        Caps caps = Caps::from_env();
        if (validate_cmd->parsed()) {
            v.problem = "validate";
            UTree t = parse_file(doc_path, [](const std::string& s) { return parse_tree(s); });
            TreeGrammar g = grammar_file(grammar_path);
            auto violation = first_violation(t, g);
            v.answer = violation ? Answer::No : Answer::Yes;
            if (violation) v.diagnostics.push_back("first violation at " + *violation);
        } else if (cons_cmd->parsed() || synth_cmd->parsed()) {
            v.problem = cons_cmd->parsed() ? "cons" : "synth";
            KernelDoc k = kernel_file(kernel_path);
            BottomUpDesign b{k, ordered_typing<TreeGrammar>(k.functions, typing_specs, grammar_file), parse_class(cls_name),
                             parse_mechanism(mech_name)};
            auto r = cons_and_synthesize(b);
            v.answer = r.consistent ? Answer::Yes : Answer::No;
            if (!r.consistent) v.diagnostics.push_back(r.reason);
            if (r.consistent && synth_cmd->parsed()) {
                std::string text = to_text(*r.type);
                if (!out_dir.empty()) {
                    std::ofstream(out_dir) << text;
                } else {
                    v.witness.push_back({0, "type", text});
                    v.typings = 1;
                }
            }
        } else if (word_mode) {
            WordInput in = load_word_design(target_path, kernel_path, box_mode);
            if (find_cmd->parsed()) {
                v = find_word(in, property == "ml" && all_ml ? "ml-all" : property, caps);
                v.problem = "exists-" + property;
                write_witness(v, out_dir, ".re");
            } else {
                Typing t = ordered_typing<Nfa>(in.functions(), typing_specs, regex_file);
                v = check_word(in, t, property, caps);
            }
        } else {
            TreeDesign d{grammar_file(target_path), kernel_file(kernel_path)};
            if (find_cmd->parsed()) {
                v = find_tree(d, property == "ml" && all_ml ? "ml-all" : property, caps);
                v.problem = "exists-" + property;
                write_witness(v, out_dir, ".grammar");
            } else {
                TreeTyping t = ordered_typing<TreeGrammar>(d.kernel.functions, typing_specs, grammar_file);
                try {
                    v = check_tree(d, t, property, caps);
                } catch (const InconsistentTyping& e) {
                    v.problem = "check-" + property;
                    v.answer = Answer::Inconsistent;
                    v.diagnostics.push_back(e.what());
                }
            }
        }
    } catch (const ResourceCap& e) {
        v.answer = Answer::Undecided;
        v.cap = e.cap();
        v.diagnostics.push_back(e.what());
    } catch (const EmptyLanguageError& e) {
        v.answer = Answer::Error;
        v.diagnostics.push_back(std::string("input error: ") + e.what());
    } catch (const InputError& e) {
        v.answer = Answer::Error;
        v.diagnostics.push_back(std::string("input error: ") + e.what());
    } catch (const NotRepresentable& e) {
        v.answer = Answer::Error;
        v.diagnostics.push_back(std::string("input error: ") + e.what());
    }
    if (v.problem.empty()) v.problem = app.get_subcommands().front()->get_name();
    print(v, as_json);
    return exit_code(v.answer);
}
