/*
 * Copyright 2026 The kgcal Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "kgcal/query.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace kgcal {

const std::vector<std::string>& query_type_names() {
    static const std::vector<std::string> names = {"1p", "2p",  "3p",  "2i",  "3i",
                                                   "pi", "ip",  "2u",  "up",  "2in",
                                                   "3in", "inp", "pin", "pni"};
    return names;
}

bool is_negation_type(const std::string& type) {
    return type == "2in" || type == "3in" || type == "inp" || type == "pin" || type == "pni";
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace {

/// Tokenizer for the query DSL. Identifiers may contain [A-Za-z0-9_./-] so
/// benchmark-style relation names like /film/film/genre parse unchanged; a
/// '.' acts as the exists separator only when it stands alone between
/// whitespace.
class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) {}

    struct Token {
        enum class Kind { ident, symbol, end };
        Kind kind;
        std::string value;
    };

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (pos_ >= text_.size()) return {Token::Kind::end, ""};
        const char c = text_[pos_];
        if (std::string("?:(),&|!").find(c) != std::string::npos) {
            ++pos_;
            return {Token::Kind::symbol, std::string(1, c)};
        }
        if (is_ident_char(c)) {
            std::size_t start = pos_;
            while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
            return {Token::Kind::ident, text_.substr(start, pos_ - start)};
        }
        throw ParseError("query: unexpected character '" + std::string(1, c) + "' at offset " +
                         std::to_string(pos_));
    }

    Token peek() {
        const std::size_t save = pos_;
        Token t = next();
        pos_ = save;
        return t;
    }

private:
    static bool is_ident_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '/' || c == '.' ||
               c == '-';
    }

    const std::string& text_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    Parser(const KnowledgeGraph& kg, const std::string& text) : kg_(kg), lex_(text) {}

    QueryGraph parse() {
        expect_symbol("?");
        target_name_ = expect_ident("target variable");
        var_index_[target_name_] = 0;
        expect_symbol(":");

        // Optional query-level exists clause.
        if (peek_is_ident("exists")) parse_exists();

        QueryGraph g;
        g.disjuncts.push_back(parse_disjunct());
        while (peek_is_symbol("|")) {
            expect_symbol("|");
            g.disjuncts.push_back(parse_disjunct());
        }
        if (lex_.peek().kind != Lexer::Token::Kind::end)
            throw ParseError("query: trailing input after '" + lex_.peek().value + "'");
        g.num_vars = static_cast<std::uint32_t>(var_index_.size());
        require_valid(g);
        return g;
    }

private:
    void parse_exists() {
        expect_ident_value("exists");
        for (;;) {
            const std::string name = expect_ident("variable name");
            if (name == target_name_)
                throw ParseError("query: target '" + name + "' redeclared under exists");
            if (!var_index_.count(name))
                var_index_[name] = static_cast<std::uint32_t>(var_index_.size());
            if (!peek_is_symbol(",")) break;
            expect_symbol(",");
        }
        const auto dot = lex_.next();
        if (dot.kind != Lexer::Token::Kind::ident || dot.value != ".")
            throw ParseError("query: expected ' . ' after exists variable list");
    }

    std::vector<Atom> parse_disjunct() {
        const bool parenthesized = peek_is_symbol("(");
        if (parenthesized) expect_symbol("(");
        if (peek_is_ident("exists")) parse_exists();
        std::vector<Atom> atoms;
        atoms.push_back(parse_atom());
        while (peek_is_symbol("&")) {
            expect_symbol("&");
            atoms.push_back(parse_atom());
        }
        if (parenthesized) expect_symbol(")");
        return atoms;
    }

    Atom parse_atom() {
        Atom atom;
        if (peek_is_symbol("!")) {
            expect_symbol("!");
            atom.negated = true;
        }
        const std::string pred = expect_ident("predicate name");
        if (!kg_.has_relation(pred)) throw ParseError("query: unknown relation '" + pred + "'");
        atom.predicate = kg_.relation_id(pred);
        expect_symbol("(");
        atom.arg1 = parse_term();
        expect_symbol(",");
        atom.arg2 = parse_term();
        expect_symbol(")");
        return atom;
    }

    Term parse_term() {
        const std::string name = expect_ident("term");
        const auto it = var_index_.find(name);
        if (it != var_index_.end()) return Term::var(it->second);
        if (kg_.has_entity(name)) return Term::anchor(kg_.entity_id(name));
        throw ParseError("query: '" + name + "' is neither a declared variable nor an entity");
    }

    bool peek_is_symbol(const std::string& s) {
        const auto t = lex_.peek();
        return t.kind == Lexer::Token::Kind::symbol && t.value == s;
    }
    bool peek_is_ident(const std::string& s) {
        const auto t = lex_.peek();
        return t.kind == Lexer::Token::Kind::ident && t.value == s;
    }
    void expect_symbol(const std::string& s) {
        const auto t = lex_.next();
        if (t.kind != Lexer::Token::Kind::symbol || t.value != s)
            throw ParseError("query: expected '" + s + "', got '" + t.value + "'");
    }
    std::string expect_ident(const std::string& what) {
        const auto t = lex_.next();
        if (t.kind != Lexer::Token::Kind::ident)
            throw ParseError("query: expected " + what + ", got '" + t.value + "'");
        return t.value;
    }
    void expect_ident_value(const std::string& v) {
        const auto t = lex_.next();
        if (t.kind != Lexer::Token::Kind::ident || t.value != v)
            throw ParseError("query: expected '" + v + "'");
    }

    const KnowledgeGraph& kg_;
    Lexer lex_;
    std::string target_name_;
    std::map<std::string, std::uint32_t> var_index_;
};

}  // namespace

QueryGraph parse_query(const KnowledgeGraph& kg, const std::string& text) {
    return Parser(kg, text).parse();
}

std::string serialize_query(const KnowledgeGraph& kg, const QueryGraph& graph) {
    const auto term_name = [&](const Term& t) {
        if (t.is_var()) return t.id == 0 ? std::string("T") : "V" + std::to_string(t.id);
        return kg.entity_name(t.id);
    };
    std::ostringstream os;
    os << "?T : ";
    if (graph.num_vars > 1) {
        os << "exists ";
        for (std::uint32_t v = 1; v < graph.num_vars; ++v) {
            if (v > 1) os << ", ";
            os << "V" << v;
        }
        os << " . ";
    }
    const bool parens = graph.disjuncts.size() > 1;
    for (std::size_t d = 0; d < graph.disjuncts.size(); ++d) {
        if (d > 0) os << " | ";
        if (parens) os << "(";
        const auto& atoms = graph.disjuncts[d];
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (i > 0) os << " & ";
            if (atoms[i].negated) os << "!";
            os << kg.relation_name(atoms[i].predicate) << "(" << term_name(atoms[i].arg1) << ", "
               << term_name(atoms[i].arg2) << ")";
        }
        if (parens) os << ")";
    }
    return os.str();
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

std::vector<ValidationIssue> validate_query(const QueryGraph& graph) {
    std::vector<ValidationIssue> issues;
    const auto add = [&issues](const std::string& rule, int d, int a, const std::string& msg) {
        issues.push_back({rule, d, a, msg});
    };

    if (graph.disjuncts.empty()) {
        add("non-empty", -1, -1, "query has no disjuncts");
        return issues;
    }
    if (graph.num_vars == 0) {
        add("target", -1, -1, "query has no variables");
        return issues;
    }

    std::vector<bool> var_used(graph.num_vars, false);
    for (std::size_t d = 0; d < graph.disjuncts.size(); ++d) {
        const auto& atoms = graph.disjuncts[d];
        if (atoms.empty()) {
            add("non-empty", static_cast<int>(d), -1, "empty disjunct");
            continue;
        }
        std::vector<bool> in_disjunct(graph.num_vars, false);
        std::vector<bool> positive_inbound(graph.num_vars, false);
        std::vector<bool> anchored(graph.num_vars, false);  // inbound atom with anchor source
        std::vector<bool> has_outgoing(graph.num_vars, false);
        // var -> var edges for cycle and reachability checks
        std::vector<std::vector<std::uint32_t>> succ(graph.num_vars);

        for (std::size_t a = 0; a < atoms.size(); ++a) {
            const Atom& atom = atoms[a];
            for (const Term* t : {&atom.arg1, &atom.arg2}) {
                if (t->is_var() && t->id >= graph.num_vars) {
                    add("var-range", static_cast<int>(d), static_cast<int>(a),
                        "variable index out of range");
                    return issues;
                }
            }
            if (!atom.arg2.is_var()) {
                add("anchor-position", static_cast<int>(d), static_cast<int>(a),
                    "atom object must be a variable");
                continue;
            }
            const std::uint32_t dst = atom.arg2.id;
            in_disjunct[dst] = true;
            var_used[dst] = true;
            if (atom.arg1.is_var()) {
                if (atom.arg1.id == dst)
                    add("distinct-args", static_cast<int>(d), static_cast<int>(a),
                        "atom relates a variable to itself");
                in_disjunct[atom.arg1.id] = true;
                var_used[atom.arg1.id] = true;
                has_outgoing[atom.arg1.id] = true;
                succ[atom.arg1.id].push_back(dst);
            } else {
                anchored[dst] = true;
            }
            if (!atom.negated) positive_inbound[dst] = true;
        }

        if (!in_disjunct[0])
            add("target-present", static_cast<int>(d), -1, "disjunct does not constrain the target");

        for (std::uint32_t v = 0; v < graph.num_vars; ++v) {
            if (!in_disjunct[v]) continue;
            if (!positive_inbound[v])
                add("positive-support", static_cast<int>(d), -1,
                    "variable " + std::to_string(v) +
                        " has no non-negated inbound atom (negation cannot be its only support)");
            if (v != 0 && !has_outgoing[v])
                add("unique-sink", static_cast<int>(d), -1,
                    "variable " + std::to_string(v) + " is a sink but is not the target");
        }
        if (has_outgoing[0])
            add("unique-sink", static_cast<int>(d), -1, "target has outgoing dependency edges");

        // Cycle detection over the variable dependency graph.
        std::vector<int> state(graph.num_vars, 0);
        bool cyclic = false;
        const auto dfs = [&](auto&& self, std::uint32_t v) -> void {
            state[v] = 1;
            for (std::uint32_t w : succ[v]) {
                if (state[w] == 1) {
                    cyclic = true;
                    return;
                }
                if (state[w] == 0) self(self, w);
                if (cyclic) return;
            }
            state[v] = 2;
        };
        for (std::uint32_t v = 0; v < graph.num_vars && !cyclic; ++v)
            if (in_disjunct[v] && state[v] == 0) dfs(dfs, v);
        if (cyclic) add("dag", static_cast<int>(d), -1, "dependency graph has a cycle");

        // Every variable reachable from an anchored variable.
        if (!cyclic) {
            std::vector<bool> reach = anchored;
            bool changed = true;
            while (changed) {
                changed = false;
                for (std::uint32_t v = 0; v < graph.num_vars; ++v) {
                    if (!reach[v]) continue;
                    for (std::uint32_t w : succ[v]) {
                        if (!reach[w]) {
                            reach[w] = true;
                            changed = true;
                        }
                    }
                }
            }
            for (std::uint32_t v = 0; v < graph.num_vars; ++v)
                if (in_disjunct[v] && !reach[v])
                    add("anchor-reachable", static_cast<int>(d), -1,
                        "variable " + std::to_string(v) + " is not reachable from any anchor");
        }
    }

    for (std::uint32_t v = 0; v < graph.num_vars; ++v)
        if (!var_used[v])
            add("free-variable", -1, -1, "variable " + std::to_string(v) + " never occurs");

    return issues;
}

void require_valid(const QueryGraph& graph) {
    const auto issues = validate_query(graph);
    if (issues.empty()) return;
    std::ostringstream os;
    os << "invalid query:";
    for (const auto& i : issues) os << " [" << i.rule << "] " << i.message << ";";
    throw ParseError(os.str());
}

// ---------------------------------------------------------------------------
// Exact traversal
// ---------------------------------------------------------------------------

std::vector<std::uint32_t> topo_order(const std::vector<Atom>& disjunct,
                                      std::uint32_t num_vars) {
    std::vector<std::vector<std::uint32_t>> succ(num_vars);
    std::vector<int> indegree(num_vars, 0);
    std::vector<bool> present(num_vars, false);
    for (const Atom& a : disjunct) {
        if (a.arg2.is_var()) present[a.arg2.id] = true;
        if (a.arg1.is_var()) present[a.arg1.id] = true;
        if (a.arg1.is_var() && a.arg2.is_var()) {
            succ[a.arg1.id].push_back(a.arg2.id);
            ++indegree[a.arg2.id];
        }
    }
    std::vector<std::uint32_t> order;
    std::vector<std::uint32_t> ready;
    for (std::uint32_t v = 0; v < num_vars; ++v)
        if (present[v] && indegree[v] == 0) ready.push_back(v);
    while (!ready.empty()) {
        // Smallest index first for a deterministic order.
        const auto it = std::min_element(ready.begin(), ready.end());
        const std::uint32_t v = *it;
        ready.erase(it);
        order.push_back(v);
        for (std::uint32_t w : succ[v])
            if (--indegree[w] == 0) ready.push_back(w);
    }
    return order;
}

namespace {

using EntitySet = std::vector<EntityId>;  // sorted unique

EntitySet set_intersect(const EntitySet& a, std::span<const EntityId> b) {
    EntitySet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

EntitySet set_minus(const EntitySet& a, std::span<const EntityId> b) {
    EntitySet out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

void set_union_into(EntitySet& acc, std::span<const EntityId> b) {
    EntitySet merged;
    merged.reserve(acc.size() + b.size());
    std::set_union(acc.begin(), acc.end(), b.begin(), b.end(), std::back_inserter(merged));
    acc = std::move(merged);
}

struct DisjunctView {
    const std::vector<Atom>& atoms;
    std::vector<std::uint32_t> order;                      // variables, target last
    std::vector<std::vector<std::size_t>> inbound;        // per order position, atom indexes
};

DisjunctView make_view(const std::vector<Atom>& atoms, std::uint32_t num_vars) {
    DisjunctView view{atoms, topo_order(atoms, num_vars), {}};
    view.inbound.resize(view.order.size());
    for (std::size_t pos = 0; pos < view.order.size(); ++pos) {
        for (std::size_t a = 0; a < atoms.size(); ++a)
            if (atoms[a].arg2.is_var() && atoms[a].arg2.id == view.order[pos])
                view.inbound[pos].push_back(a);
    }
    return view;
}

/// True when the per-variable set sweep is exact for this disjunct: the
/// variable-to-variable dependency graph is a forest and no negated atom
/// has a variable source. Covers all 14 benchmark shapes except pni.
bool sweep_is_exact(const std::vector<Atom>& atoms, std::uint32_t num_vars) {
    std::vector<int> var_parents(num_vars, 0);
    for (const Atom& a : atoms) {
        if (!a.arg2.is_var()) return false;
        if (a.arg1.is_var()) {
            if (a.negated) return false;
            if (++var_parents[a.arg2.id] > 1) return false;
        }
    }
    return true;
}

EntitySet image_of(const KnowledgeGraph& kg, const EntitySet& sources, RelationId p,
                   Scope scope) {
    EntitySet out;
    for (EntityId s : sources) set_union_into(out, kg.filtered_answers(s, p, scope));
    return out;
}

EntitySet all_entities(const KnowledgeGraph& kg) {
    EntitySet all(kg.num_entities());
    for (EntityId e = 0; e < kg.num_entities(); ++e) all[e] = e;
    return all;
}

EntitySet sweep_disjunct(const KnowledgeGraph& kg, const DisjunctView& view, Scope scope) {
    std::vector<EntitySet> var_sets(view.order.size());
    std::map<std::uint32_t, std::size_t> pos_of;
    for (std::size_t i = 0; i < view.order.size(); ++i) pos_of[view.order[i]] = i;

    for (std::size_t pos = 0; pos < view.order.size(); ++pos) {
        EntitySet candidates;
        bool first = true;
        for (std::size_t ai : view.inbound[pos]) {
            const Atom& a = view.atoms[ai];
            if (a.negated) continue;
            EntitySet from;
            if (a.arg1.is_var()) {
                from = image_of(kg, var_sets[pos_of[a.arg1.id]], a.predicate, scope);
            } else {
                const auto objs = kg.filtered_answers(a.arg1.id, a.predicate, scope);
                from.assign(objs.begin(), objs.end());
            }
            if (first) {
                candidates = std::move(from);
                first = false;
            } else {
                candidates = set_intersect(candidates, from);
            }
            if (candidates.empty()) break;
        }
        for (std::size_t ai : view.inbound[pos]) {
            const Atom& a = view.atoms[ai];
            if (!a.negated) continue;
            // sweep_is_exact guarantees the source is an anchor here
            candidates = set_minus(candidates, kg.filtered_answers(a.arg1.id, a.predicate, scope));
            if (candidates.empty()) break;
        }
        var_sets[pos] = std::move(candidates);
        if (var_sets[pos].empty()) return {};
    }
    return var_sets.back();  // target is last in topo order
}

/// Backtracking join, exact for any valid query. Variables are bound in
/// topological order; each candidate must satisfy every positive inbound
/// atom and violate every negated one given the bindings made so far.
void join_disjunct(const KnowledgeGraph& kg, const DisjunctView& view, Scope scope,
                   std::size_t pos, std::vector<EntityId>& binding,
                   const std::map<std::uint32_t, std::size_t>& pos_of, EntitySet& answers) {
    const auto source_value = [&](const Term& t) {
        return t.is_var() ? binding[pos_of.at(t.id)] : t.id;
    };

    EntitySet candidates;
    bool first = true;
    for (std::size_t ai : view.inbound[pos]) {
        const Atom& a = view.atoms[ai];
        if (a.negated) continue;
        const auto objs = kg.filtered_answers(source_value(a.arg1), a.predicate, scope);
        if (first) {
            candidates.assign(objs.begin(), objs.end());
            first = false;
        } else {
            candidates = set_intersect(candidates, objs);
        }
        if (candidates.empty()) return;
    }
    for (std::size_t ai : view.inbound[pos]) {
        const Atom& a = view.atoms[ai];
        if (!a.negated) continue;
        candidates = set_minus(candidates,
                               kg.filtered_answers(source_value(a.arg1), a.predicate, scope));
        if (candidates.empty()) return;
    }

    if (pos + 1 == view.order.size()) {
        set_union_into(answers, candidates);
        return;
    }
    for (EntityId c : candidates) {
        binding[pos] = c;
        join_disjunct(kg, view, scope, pos + 1, binding, pos_of, answers);
    }
}

}  // namespace

std::vector<EntityId> traverse_answers(const KnowledgeGraph& kg, const QueryGraph& graph,
                                       Scope scope) {
    EntitySet answers;
    for (const auto& atoms : graph.disjuncts) {
        const DisjunctView view = make_view(atoms, graph.num_vars);
        if (view.order.empty()) continue;
        if (sweep_is_exact(atoms, graph.num_vars)) {
            set_union_into(answers, sweep_disjunct(kg, view, scope));
        } else {
            std::map<std::uint32_t, std::size_t> pos_of;
            for (std::size_t i = 0; i < view.order.size(); ++i) pos_of[view.order[i]] = i;
            std::vector<EntityId> binding(view.order.size(), kNoEntity);
            EntitySet sub;
            join_disjunct(kg, view, scope, 0, binding, pos_of, sub);
            set_union_into(answers, sub);
        }
    }
    return answers;
}

}  // namespace kgcal
